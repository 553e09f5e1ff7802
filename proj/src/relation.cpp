#include <joinagg/relation.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>


namespace joinagg {

Relation::Relation(std::string name, std::vector<std::string> columns)
    : name_(std::move(name))
    , columns_(std::move(columns))
{ }

void Relation::add_row(std::span<const Value> values)
{
    if (values.size() != arity())
        throw InternalError("row arity mismatch in relation " + name_);
    cells_.insert(cells_.end(), values.begin(), values.end());
    ++rows_;
}

std::optional<std::size_t> Relation::find_column(std::string_view column) const
{
    for (std::size_t i = 0; i != columns_.size(); ++i) {
        if (columns_[i] == column)
            return i;
    }
    return std::nullopt;
}

std::size_t Relation::column_index(std::string_view column) const
{
    if (auto i = find_column(column))
        return *i;
    throw QueryError("unknown column '" + std::string(column) + "' in relation " + name_);
}

void Relation::sort_rows()
{
    std::vector<std::size_t> order(rows_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        return compare_values(row(a), row(b)) < 0;
    });
    std::vector<Value> sorted;
    sorted.reserve(cells_.size());
    for (auto i : order) {
        auto r = row(i);
        sorted.insert(sorted.end(), r.begin(), r.end());
    }
    cells_ = std::move(sorted);
}

uint64_t CountedRelation::total() const
{
    return std::accumulate(multiplicity.begin(), multiplicity.end(), uint64_t{0});
}


/*======================================================================================================================
 * CSV
 *====================================================================================================================*/

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_int(std::string_view s, int64_t &out)
{
    if (s.empty())
        return false;
    const char *first = s.data();
    if (*first == '+')
        return false;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() and ptr == s.data() + s.size();
}

}

Relation parse_csv(std::istream &in, std::string name, bool header, std::string_view origin)
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> fields; // column-major raw text
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    bool have_arity = false;
    std::vector<std::size_t> blank_lines;

    while (std::getline(in, line)) {
        ++line_no;
        if (not line.empty() and line.back() == '\r')
            line.pop_back();
        if (line.empty()) {
            blank_lines.push_back(line_no);
            continue;
        }
        if (not blank_lines.empty())
            throw IoError(std::string(origin) + ":" + std::to_string(blank_lines.front()) + ": empty line");
        auto parts = split_fields(line);
        if (not have_arity) {
            arity = parts.size();
            have_arity = true;
            fields.resize(arity);
            if (header) {
                for (auto p : parts) {
                    if (p.empty())
                        throw IoError(std::string(origin) + ":" + std::to_string(line_no) + ": empty column name");
                    columns.emplace_back(p);
                }
                continue;
            }
            for (std::size_t i = 0; i != arity; ++i)
                columns.push_back("c" + std::to_string(i));
        }
        if (parts.size() != arity) {
            throw IoError(std::string(origin) + ":" + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                          " fields, found " + std::to_string(parts.size()));
        }
        for (std::size_t i = 0; i != arity; ++i) {
            if (parts[i].empty())
                throw IoError(std::string(origin) + ":" + std::to_string(line_no) + ": empty field in column " +
                              std::to_string(i) + " (NULL values are not supported)");
            fields[i].emplace_back(parts[i]);
        }
    }

    if (not have_arity)
        throw IoError(std::string(origin) + ": empty file");
    const std::size_t rows = fields.empty() ? 0 : fields.front().size();
    if (rows == 0)
        throw IoError(std::string(origin) + ": empty relation");

    std::vector<std::vector<Value>> typed(arity);
    for (std::size_t c = 0; c != arity; ++c) {
        auto &out = typed[c];
        out.reserve(rows);
        bool integral = true;
        for (const auto &f : fields[c]) {
            int64_t v;
            if (not parse_int(f, v)) { integral = false; break; }
            out.push_back(Value::integer(v));
        }
        if (not integral) {
            out.clear();
            for (const auto &f : fields[c])
                out.push_back(Value::string(f));
        }
        fields[c].clear();
        fields[c].shrink_to_fit();
    }

    Relation r(std::move(name), std::move(columns));
    r.reserve(rows);
    std::vector<Value> row(arity);
    for (std::size_t i = 0; i != rows; ++i) {
        for (std::size_t c = 0; c != arity; ++c)
            row[c] = typed[c][i];
        r.add_row(row);
    }
    return r;
}

Relation load_csv(const std::filesystem::path &path, std::string name, bool header)
{
    std::ifstream in(path);
    if (not in)
        throw IoError("cannot open " + path.string());
    return parse_csv(in, std::move(name), header, path.string());
}

void write_csv(std::ostream &out, const Relation &r, bool header)
{
    if (header) {
        for (std::size_t i = 0; i != r.arity(); ++i)
            out << (i ? "," : "") << r.columns()[i];
        out << '\n';
    }
    for (std::size_t i = 0; i != r.size(); ++i)
        out << join_values(r.row(i)) << '\n';
}


/*======================================================================================================================
 * Projection and pre-aggregation
 *====================================================================================================================*/

namespace {

std::vector<std::size_t> resolve(const Relation &r, std::span<const std::string> attrs)
{
    std::vector<std::size_t> idx;
    idx.reserve(attrs.size());
    for (const auto &a : attrs)
        idx.push_back(r.column_index(a));
    return idx;
}

}

Relation project_bag(const Relation &r, std::span<const std::string> attrs)
{
    auto idx = resolve(r, attrs);
    Relation out(r.name(), std::vector<std::string>(attrs.begin(), attrs.end()));
    out.reserve(r.size());
    std::vector<Value> buf(idx.size());
    for (std::size_t i = 0; i != r.size(); ++i) {
        for (std::size_t c = 0; c != idx.size(); ++c)
            buf[c] = r.at(i, idx[c]);
        out.add_row(buf);
    }
    return out;
}

CountedRelation preaggregate(const Relation &r, std::span<const std::string> attrs)
{
    auto idx = resolve(r, attrs);
    KeyIndex index(idx.size(), r.size());
    std::vector<uint64_t> counts;
    std::vector<Value> buf(idx.size());
    for (std::size_t i = 0; i != r.size(); ++i) {
        for (std::size_t c = 0; c != idx.size(); ++c)
            buf[c] = r.at(i, idx[c]);
        auto [id, inserted] = index.insert(buf);
        if (inserted)
            counts.push_back(0);
        ++counts[id];
    }

    std::vector<uint32_t> order(index.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return compare_values(index.key(a), index.key(b)) < 0;
    });

    CountedRelation out{Relation(r.name(), std::vector<std::string>(attrs.begin(), attrs.end())), {}};
    out.rows.reserve(order.size());
    out.multiplicity.reserve(order.size());
    for (auto id : order) {
        out.rows.add_row(index.key(id));
        out.multiplicity.push_back(counts[id]);
    }
    return out;
}

Relation expand(const CountedRelation &c)
{
    Relation out(c.rows.name(), c.rows.columns());
    for (std::size_t i = 0; i != c.rows.size(); ++i) {
        for (uint64_t k = 0; k != c.multiplicity[i]; ++k)
            out.add_row(c.rows.row(i));
    }
    return out;
}


/*======================================================================================================================
 * KeyIndex
 *====================================================================================================================*/

KeyIndex::KeyIndex(std::size_t arity, std::size_t expected)
    : arity_(arity)
{
    std::size_t cap = 16;
    while (cap < expected * 2)
        cap <<= 1;
    slots_.assign(cap, 0);
}

void KeyIndex::grow()
{
    std::vector<uint32_t> slots(slots_.size() * 2, 0);
    const std::size_t mask = slots.size() - 1;
    for (uint32_t id = 0; id != count_; ++id) {
        std::size_t pos = hashes_[id] & mask;
        while (slots[pos] != 0)
            pos = (pos + 1) & mask;
        slots[pos] = id + 1;
    }
    slots_ = std::move(slots);
}

std::pair<uint32_t, bool> KeyIndex::insert(std::span<const Value> key)
{
    if ((count_ + 1) * 2 > slots_.size())
        grow();
    const std::size_t h = hash_values(key);
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = h & mask;
    while (slots_[pos] != 0) {
        const uint32_t id = slots_[pos] - 1;
        if (hashes_[id] == h and std::equal(key.begin(), key.end(), keys_.begin() + id * arity_))
            return {id, false};
        pos = (pos + 1) & mask;
    }
    const uint32_t id = static_cast<uint32_t>(count_++);
    slots_[pos] = id + 1;
    hashes_.push_back(h);
    keys_.insert(keys_.end(), key.begin(), key.end());
    return {id, true};
}

std::optional<uint32_t> KeyIndex::find(std::span<const Value> key) const
{
    const std::size_t h = hash_values(key);
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = h & mask;
    while (slots_[pos] != 0) {
        const uint32_t id = slots_[pos] - 1;
        if (hashes_[id] == h and std::equal(key.begin(), key.end(), keys_.begin() + id * arity_))
            return id;
        pos = (pos + 1) & mask;
    }
    return std::nullopt;
}

}
