#include <joinagg/datagen.hpp>

#include <joinagg/errors.hpp>
#include <joinagg/sql_parser.hpp>

#include <cmath>
#include <fstream>
#include <set>


namespace joinagg {

uint64_t SplitMix64::bounded(uint64_t bound)
{
    if (bound == 0)
        throw InternalError("empty draw range");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    uint64_t low = static_cast<uint64_t>(m);
    if (low < bound) {
        const uint64_t threshold = -bound % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * bound;
            low = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

std::string_view to_string(Family f)
{
    switch (f) {
        case Family::kSelfJoin: return "selfjoin";
        case Family::kChain4:   return "chain4";
        case Family::kBranch:   return "branch";
    }
    return "?";
}

Family parse_family(std::string_view name)
{
    if (name == "selfjoin") return Family::kSelfJoin;
    if (name == "chain4") return Family::kChain4;
    if (name == "branch") return Family::kBranch;
    throw QueryError("unknown family '" + std::string(name) + "' (expected selfjoin, chain4 or branch)");
}

std::size_t domain_size(double s, std::size_t base)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s * static_cast<double>(base))));
}

namespace {

struct ColumnSpec
{
    std::string name;
    std::size_t domain;
};

struct FileSpec
{
    std::string alias;
    std::vector<ColumnSpec> columns;
};

Relation draw(const std::string &name, const std::vector<ColumnSpec> &columns, std::size_t n, SplitMix64 &rng)
{
    std::vector<std::string> names;
    for (const auto &c : columns)
        names.push_back(c.name);
    Relation r(name, names);
    r.reserve(n);
    std::vector<Value> row(columns.size());
    for (std::size_t i = 0; i != n; ++i) {
        for (std::size_t c = 0; c != columns.size(); ++c)
            row[c] = Value::integer(static_cast<int64_t>(rng.bounded(columns[c].domain)));
        r.add_row(row);
    }
    return r;
}

void check(const GenConfig &cfg)
{
    if (cfg.n == 0)
        throw QueryError("n must be at least 1");
    const std::size_t wanted = cfg.family == Family::kBranch ? 2 : 1;
    if (cfg.s_join.empty() or cfg.s_join.size() > wanted)
        throw QueryError("expected " + std::to_string(wanted) + " join selectivit" + (wanted == 1 ? "y" : "ies"));
    auto valid = [](double s) { return s > 0 and s <= 1; };
    for (auto s : cfg.s_join) {
        if (not valid(s))
            throw QueryError("selectivity must lie in (0, 1]");
    }
    if (not valid(cfg.s_group))
        throw QueryError("selectivity must lie in (0, 1]");
}

}

GeneratedData generate(const GenConfig &cfg)
{
    check(cfg);
    const std::size_t base = cfg.domain_base.value_or(cfg.n);
    const std::size_t d_group = domain_size(cfg.s_group, base);
    const std::size_t d_join = domain_size(cfg.s_join[0], base);
    const std::size_t d_join2 = domain_size(cfg.s_join.size() > 1 ? cfg.s_join[1] : cfg.s_join[0], base);
    const std::string family(to_string(cfg.family));

    std::vector<FileSpec> files;
    std::string sql;
    switch (cfg.family) {
        case Family::kSelfJoin:
            files = {{"R", {{"g", d_group}, {"j", d_join}}}};
            sql = "SELECT R1.g, R2.g, COUNT(*) FROM selfjoin_R R1, selfjoin_R R2 WHERE R1.j = R2.j GROUP BY R1.g, R2.g";
            break;
        case Family::kChain4:
            files = {
                {"R1", {{"g1", d_group}, {"p0", d_join}}},
                {"R2", {{"p0", d_join}, {"p1", d_join}}},
                {"R3", {{"p1", d_join}, {"p2", d_join}}},
                {"R4", {{"p2", d_join}, {"g2", d_group}}},
            };
            sql = "SELECT R1.g1, R4.g2, COUNT(*) FROM chain4_R1 R1, chain4_R2 R2, chain4_R3 R3, chain4_R4 R4 "
                  "WHERE R1.p0 = R2.p0 AND R2.p1 = R3.p1 AND R3.p2 = R4.p2 GROUP BY R1.g1, R4.g2";
            break;
        case Family::kBranch:
            files = {
                {"R1", {{"g1", d_group}, {"j", d_join}}},
                {"R2", {{"j", d_join}, {"b", d_join2}}},
                {"R3", {{"b", d_join2}, {"g2", d_group}}},
                {"R4", {{"b", d_join2}, {"g3", d_group}}},
            };
            sql = "SELECT R1.g1, R3.g2, R4.g3, COUNT(*) FROM branch_R1 R1, branch_R2 R2, branch_R3 R3, branch_R4 R4 "
                  "WHERE R1.j = R2.j AND R2.b = R3.b AND R2.b = R4.b GROUP BY R1.g1, R3.g2, R4.g3";
            break;
    }

    GeneratedData out;
    SplitMix64 rng(cfg.seed);
    nlohmann::json rels = nlohmann::json::array();
    for (const auto &f : files) {
        const std::string stem = family + "_" + f.alias;
        auto rel = std::make_shared<const Relation>(draw(stem, f.columns, cfg.n, rng));
        nlohmann::json distinct = nlohmann::json::object();
        nlohmann::json domains = nlohmann::json::object();
        for (std::size_t c = 0; c != f.columns.size(); ++c) {
            std::set<int64_t> seen;
            for (std::size_t i = 0; i != rel->size(); ++i)
                seen.insert(rel->at(i, c).as_int());
            distinct[f.columns[c].name] = seen.size();
            domains[f.columns[c].name] = f.columns[c].domain;
        }
        rels.push_back({{"alias", f.alias}, {"file", stem + ".csv"}, {"rows", rel->size()}, {"domain", domains},
                        {"distinct", distinct}});
        out.files.emplace(stem, rel);
    }

    // Query aliases; the self-join reads one file twice.
    if (cfg.family == Family::kSelfJoin) {
        out.relations["R1"] = out.files.at("selfjoin_R");
        out.relations["R2"] = out.files.at("selfjoin_R");
    } else {
        for (const auto &f : files)
            out.relations[f.alias] = out.files.at(family + "_" + f.alias);
    }

    out.manifest = {
        {"family", family},
        {"n", cfg.n},
        {"s_join", cfg.s_join},
        {"s_group", cfg.s_group},
        {"seed", cfg.seed},
        {"prng", "splitmix64 (bounded draws by multiply-shift with rejection)"},
        {"domain_base", base},
        {"relations", rels},
        {"query", sql},
    };
    out.manifest["selectivity"] = "s = |distinct(column)| / |R|; values uniform in [0, round(s * domain_base))";
    out.query = parse_sql(sql);
    return out;
}

void write_dataset(const GeneratedData &data, const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto &[stem, rel] : data.files) {
        std::ofstream out(dir / (stem + ".csv"));
        if (not out)
            throw IoError("cannot write " + (dir / (stem + ".csv")).string());
        write_csv(out, *rel, true);
    }
    std::ofstream manifest(dir / "manifest.json");
    std::ofstream query(dir / "query.sql");
    if (not manifest or not query)
        throw IoError("cannot write manifest in " + dir.string());
    manifest << data.manifest.dump(2) << '\n';
    query << data.manifest.at("query").get<std::string>() << '\n';
}

}
