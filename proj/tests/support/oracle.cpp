#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>


namespace joinagg::testing {

namespace {

struct Bound
{
    std::size_t rel;    ///< position in the enumeration order
    std::size_t col;
};

struct Step
{
    const Relation *rel = nullptr;
    std::vector<std::size_t> key_cols;                  ///< this relation's columns constrained by earlier ones
    std::vector<Bound> key_from;                        ///< where their values come from
    std::vector<std::pair<std::size_t, Bound>> checks;  ///< further equalities with earlier relations
    std::unordered_map<Tuple, std::vector<std::size_t>, TupleHash> index;
};

struct Acc
{
    uint64_t count = 0;
    __int128 sum = 0;
    std::optional<Value> extreme;
};

}

std::optional<OracleResult> brute_force(const QuerySpec &q, const RelationMap &rels, uint64_t limit)
{
    const std::size_t k = q.relations.size();
    std::map<std::string, std::size_t> alias_pos;
    for (std::size_t i = 0; i != k; ++i)
        alias_pos[q.relations[i].alias] = i;

    // connected enumeration order starting from the first relation
    std::vector<std::size_t> order{0};
    std::vector<bool> placed(k, false);
    placed[0] = true;
    while (order.size() != k) {
        bool grew = false;
        for (const auto &j : q.joins) {
            std::size_t a = alias_pos.at(j.left.alias), b = alias_pos.at(j.right.alias);
            if (placed[a] != placed[b]) {
                std::size_t n = placed[a] ? b : a;
                placed[n] = true;
                order.push_back(n);
                grew = true;
            }
        }
        if (not grew)
            throw std::logic_error("oracle: disconnected query");
    }
    std::vector<std::size_t> position(k);
    for (std::size_t i = 0; i != k; ++i)
        position[order[i]] = i;

    std::vector<Step> steps(k);
    for (std::size_t i = 0; i != k; ++i)
        steps[i].rel = rels.at(q.relations[order[i]].alias).get();

    auto locate = [&](const AttributeRef &a) {
        std::size_t p = position[alias_pos.at(a.alias)];
        return Bound{p, steps[p].rel->column_index(a.column)};
    };
    for (const auto &j : q.joins) {
        Bound l = locate(j.left), r = locate(j.right);
        if (l.rel == r.rel) {
            steps[l.rel].checks.push_back({l.col, r});
            continue;
        }
        if (l.rel < r.rel)
            std::swap(l, r);
        auto &s = steps[l.rel];
        if (std::find(s.key_cols.begin(), s.key_cols.end(), l.col) == s.key_cols.end()) {
            s.key_cols.push_back(l.col);
            s.key_from.push_back(r);
        } else {
            s.checks.push_back({l.col, r});
        }
    }
    for (auto &s : steps) {
        for (std::size_t row = 0; row != s.rel->size(); ++row) {
            Tuple key;
            for (auto c : s.key_cols)
                key.push_back(s.rel->at(row, c));
            s.index[key].push_back(row);
        }
    }

    std::vector<Bound> group_at;
    for (const auto &g : q.group_by)
        group_at.push_back(locate(g));
    std::optional<Bound> agg_at;
    if (q.aggregate.attribute)
        agg_at = locate(*q.aggregate.attribute);
    const AggregateKind kind = q.aggregate.kind;

    std::map<Tuple, Acc> groups;
    uint64_t produced = 0;
    bool overflow = false;
    std::vector<std::size_t> current(k);

    auto cell = [&](const Bound &b) -> const Value & { return steps[b.rel].rel->at(current[b.rel], b.col); };

    auto emit = [&] {
        Tuple g;
        for (const auto &b : group_at)
            g.push_back(cell(b));
        Acc &a = groups[g];
        ++a.count;
        if (agg_at) {
            const Value &v = cell(*agg_at);
            if (kind == AggregateKind::kSum or kind == AggregateKind::kAvg)
                a.sum += v.as_int();
            else if (not a.extreme or (kind == AggregateKind::kMin ? v < *a.extreme : *a.extreme < v))
                a.extreme = v;
        }
    };

    auto recurse = [&](auto &self, std::size_t depth) -> void {
        if (overflow)
            return;
        if (depth == k) {
            if (++produced > limit)
                overflow = true;
            else
                emit();
            return;
        }
        const Step &s = steps[depth];
        Tuple key;
        for (const auto &b : s.key_from)
            key.push_back(cell(b));
        auto it = s.index.find(key);
        if (it == s.index.end())
            return;
        for (std::size_t row : it->second) {
            current[depth] = row;
            bool ok = true;
            for (const auto &[col, other] : s.checks)
                ok = ok and s.rel->at(row, col) == cell(other);
            if (ok)
                self(self, depth + 1);
            if (overflow)
                return;
        }
    };
    recurse(recurse, 0);
    if (overflow)
        return std::nullopt;

    OracleResult out;
    out.join_size = produced;
    for (auto &[g, a] : groups) {
        GroupResult r;
        r.group = g;
        r.count = a.count;
        switch (kind) {
        case AggregateKind::kCountStar:
            r.value = static_cast<int64_t>(a.count);
            break;
        case AggregateKind::kSum:
            r.value = static_cast<int64_t>(a.sum);
            break;
        case AggregateKind::kMin:
        case AggregateKind::kMax:
            r.value = *a.extreme;
            break;
        case AggregateKind::kAvg: {
            __int128 num = a.sum, den = a.count;
            __int128 x = num < 0 ? -num : num, y = den;
            while (y) {
                __int128 t = x % y;
                x = y;
                y = t;
            }
            r.value = Rational{static_cast<int64_t>(num / x), static_cast<int64_t>(den / x)};
            break;
        }
        }
        out.groups.push_back(std::move(r));
    }
    return out;
}

}
