#include <joinagg/baseline.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <set>


namespace joinagg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const std::string kAggColumn = "#agg";

/// Calls f(i, j) for every pair of rows with equal key columns; the table is built on the smaller side.
template<typename F>
void for_each_match(std::size_t r_rows, std::size_t s_rows, std::size_t key_arity,
                    const std::function<void(std::size_t, std::vector<Value>&, bool)> &r_key,
                    const std::function<void(std::size_t, std::vector<Value>&, bool)> &s_key, F &&f)
{
    const bool build_r = r_rows <= s_rows;
    const std::size_t build_rows = build_r ? r_rows : s_rows;
    const std::size_t probe_rows = build_r ? s_rows : r_rows;
    const auto &build_key = build_r ? r_key : s_key;
    const auto &probe_key = build_r ? s_key : r_key;

    KeyIndex index(key_arity, build_rows);
    std::vector<uint32_t> head, next(build_rows, ~0u);
    std::vector<Value> key(key_arity);
    for (std::size_t i = 0; i != build_rows; ++i) {
        build_key(i, key, build_r);
        auto [id, inserted] = index.insert(key);
        if (inserted)
            head.push_back(~0u);
        next[i] = head[id];
        head[id] = static_cast<uint32_t>(i);
    }
    for (std::size_t j = 0; j != probe_rows; ++j) {
        probe_key(j, key, not build_r);
        auto id = index.find(key);
        if (not id)
            continue;
        for (uint32_t i = head[*id]; i != ~0u; i = next[i]) {
            if (build_r)
                f(i, j);
            else
                f(j, i);
        }
    }
}

std::vector<std::size_t> indices(const std::vector<std::string> &columns, std::span<const std::string> names)
{
    std::vector<std::size_t> out;
    for (const auto &n : names) {
        auto it = std::find(columns.begin(), columns.end(), n);
        if (it == columns.end())
            throw QueryError("unknown column '" + n + "'");
        out.push_back(it - columns.begin());
    }
    return out;
}

/// Row-key extractor over a flat cell array.
std::function<void(std::size_t, std::vector<Value>&, bool)> key_of(const std::vector<Value> &cells, std::size_t arity,
                                                                  const std::vector<std::size_t> &cols)
{
    return [&cells, arity, &cols](std::size_t row, std::vector<Value> &key, bool) {
        for (std::size_t c = 0; c != cols.size(); ++c)
            key[c] = cells[row * arity + cols[c]];
    };
}

}

Relation hash_join(const Relation &r, const Relation &s, std::span<const std::string> on)
{
    const auto r_on = indices(r.columns(), on);
    const auto s_on = indices(s.columns(), on);
    std::vector<std::string> columns = r.columns();
    std::vector<std::size_t> s_keep;
    for (std::size_t c = 0; c != s.arity(); ++c) {
        if (std::find(on.begin(), on.end(), s.columns()[c]) == on.end()) {
            s_keep.push_back(c);
            columns.push_back(s.columns()[c]);
        }
    }
    Relation out(r.name() + "*" + s.name(), columns);
    std::vector<Value> row(columns.size());
    for_each_match(r.size(), s.size(), on.size(), key_of(r.cells(), r.arity(), r_on), key_of(s.cells(), s.arity(), s_on),
                   [&](std::size_t i, std::size_t j) {
                       std::size_t k = 0;
                       for (std::size_t c = 0; c != r.arity(); ++c)
                           row[k++] = r.at(i, c);
                       for (auto c : s_keep)
                           row[k++] = s.at(j, c);
                       out.add_row(row);
                   });
    return out;
}

CountedRelation hash_join(const CountedRelation &r, const CountedRelation &s, std::span<const std::string> on)
{
    const auto r_on = indices(r.rows.columns(), on);
    const auto s_on = indices(s.rows.columns(), on);
    std::vector<std::string> columns = r.rows.columns();
    std::vector<std::size_t> s_keep;
    for (std::size_t c = 0; c != s.rows.arity(); ++c) {
        if (std::find(on.begin(), on.end(), s.rows.columns()[c]) == on.end()) {
            s_keep.push_back(c);
            columns.push_back(s.rows.columns()[c]);
        }
    }
    CountedRelation out{Relation(r.rows.name() + "*" + s.rows.name(), columns), {}};
    std::vector<Value> row(columns.size());
    for_each_match(r.rows.size(), s.rows.size(), on.size(), key_of(r.rows.cells(), r.rows.arity(), r_on),
                   key_of(s.rows.cells(), s.rows.arity(), s_on), [&](std::size_t i, std::size_t j) {
                       std::size_t k = 0;
                       for (std::size_t c = 0; c != r.rows.arity(); ++c)
                           row[k++] = r.rows.at(i, c);
                       for (auto c : s_keep)
                           row[k++] = s.rows.at(j, c);
                       out.rows.add_row(row);
                       out.multiplicity.push_back(r.multiplicity[i] * s.multiplicity[j]);
                   });
    return out;
}

std::vector<GroupResult> hash_aggregate(const Relation &r, std::span<const std::string> group, AggregateKind kind,
                                        const std::optional<std::string> &agg_column,
                                        std::span<const uint64_t> multiplicity)
{
    const auto cols = indices(r.columns(), group);
    std::optional<std::size_t> agg;
    if (kind != AggregateKind::kCountStar) {
        if (not agg_column)
            throw QueryError("aggregate needs an attribute");
        agg = r.column_index(*agg_column);
    }

    struct Acc
    {
        uint64_t count = 0;
        int64_t sum = 0;
        std::optional<Value> extreme;
    };
    KeyIndex index(cols.size(), r.size());
    std::vector<Acc> accs;
    std::vector<Value> key(cols.size());
    for (std::size_t i = 0; i != r.size(); ++i) {
        for (std::size_t c = 0; c != cols.size(); ++c)
            key[c] = r.at(i, cols[c]);
        auto [id, inserted] = index.insert(key);
        if (inserted)
            accs.emplace_back();
        auto &a = accs[id];
        const uint64_t m = multiplicity.empty() ? 1 : multiplicity[i];
        a.count += m;
        if (not agg)
            continue;
        const Value &v = r.at(i, *agg);
        switch (kind) {
            case AggregateKind::kSum:
            case AggregateKind::kAvg:
                if (not v.is_int())
                    throw QueryError("SUM/AVG over non-integer column " + *agg_column);
                a.sum += v.as_int() * static_cast<int64_t>(m);
                break;
            case AggregateKind::kMin:
                if (not a.extreme or v < *a.extreme) a.extreme = v;
                break;
            case AggregateKind::kMax:
                if (not a.extreme or *a.extreme < v) a.extreme = v;
                break;
            case AggregateKind::kCountStar:
                break;
        }
    }

    std::vector<GroupResult> out;
    out.reserve(index.size());
    for (uint32_t id = 0; id != index.size(); ++id) {
        const auto &a = accs[id];
        GroupResult g;
        auto k = index.key(id);
        g.group.assign(k.begin(), k.end());
        g.count = a.count;
        switch (kind) {
            case AggregateKind::kCountStar: g.value = static_cast<int64_t>(a.count); break;
            case AggregateKind::kSum:       g.value = a.sum; break;
            case AggregateKind::kMin:
            case AggregateKind::kMax:       g.value = *a.extreme; break;
            case AggregateKind::kAvg:       g.value = Rational::make(a.sum, a.count); break;
        }
        out.push_back(std::move(g));
    }
    sort_groups(out);
    return out;
}


/*======================================================================================================================
 * Plan execution
 *====================================================================================================================*/

namespace {

/// Rows carrying an annotation instead of duplicates.
struct AnnotatedBag
{
    AnnotatedBag(std::vector<std::string> cols, std::size_t expected)
        : columns(std::move(cols))
        , keys(columns.size(), expected)
    { }

    std::vector<std::string> columns;
    KeyIndex keys;
    std::vector<Annotation> annots;

    std::size_t size() const { return keys.size(); }

    void add(std::span<const Value> key, const Annotation &a, AggregateKind kind)
    {
        auto [id, inserted] = keys.insert(key);
        if (inserted)
            annots.push_back(a);
        else
            merge_into(annots[id], a, kind);
    }
};

struct Executor
{
    const QueryPlan &plan;
    const RelationMap &rels;
    BaselineMode mode;
    AggregateKind kind;
    RunStats stats;
    std::vector<std::size_t> order;

    Executor(const QueryPlan &p, const RelationMap &r, BaselineMode m)
        : plan(p), rels(r), mode(m), kind(p.spec.aggregate.kind), order(p.tree.bfs_order)
    {
        stats.engine = m == BaselineMode::kNaive ? "naive" : "preagg";
    }

    const Relation & relation(std::size_t r) const
    {
        auto it = rels.find(plan.relation(r).alias);
        if (it == rels.end() or not it->second)
            throw QueryError("no data bound to relation alias '" + plan.relation(r).alias + "'");
        return *it->second;
    }

    std::optional<std::size_t> agg_column(std::size_t r) const
    {
        const auto &agg = plan.hypergraph.aggregate_column;
        if (not agg or agg->first != r)
            return std::nullopt;
        const auto &rel = relation(r);
        auto c = rel.find_column(agg->second);
        if (not c)
            throw QueryError("unknown column '" + agg->second + "' in relation " + plan.relation(r).source);
        return c;
    }

    std::vector<std::size_t> vertex_columns(std::size_t r) const
    {
        const auto &b = plan.relation(r);
        const auto &rel = relation(r);
        std::vector<std::size_t> cols;
        for (const auto &v : b.vertices) {
            auto c = rel.find_column(b.vertex_column.at(v));
            if (not c)
                throw QueryError("unknown column '" + b.vertex_column.at(v) + "' in relation " + b.source +
                                 " (alias " + b.alias + ")");
            cols.push_back(*c);
        }
        return cols;
    }

    /// Attributes still needed once the first `k + 1` relations of the order are joined.
    std::set<std::string> needed_after(std::size_t k) const
    {
        std::set<std::string> need(plan.hypergraph.group_vertices.begin(), plan.hypergraph.group_vertices.end());
        for (std::size_t i = k + 1; i < order.size(); ++i) {
            const auto &v = plan.relation(order[i]).vertices;
            need.insert(v.begin(), v.end());
        }
        return need;
    }

    std::vector<std::string> shared(const std::vector<std::string> &a, const std::vector<std::string> &b) const
    {
        std::vector<std::string> out;
        for (const auto &x : a) {
            if (std::find(b.begin(), b.end(), x) != b.end() and x != kAggColumn)
                out.push_back(x);
        }
        return out;
    }

    void stage(std::string name, Clock::time_point t0, uint64_t rows)
    {
        stats.stages.push_back({std::move(name), ms_since(t0), rows});
    }

    std::vector<GroupResult> finish(std::vector<GroupResult> groups)
    {
        sort_groups(groups);
        stats.output_groups = groups.size();
        stats.peak_structures = stats.peak_live_rows;
        return groups;
    }

    /*--- NAIVE ------------------------------------------------------------------------------------------------------*/

    Relation load_plain(std::size_t r)
    {
        const auto &rel = relation(r);
        auto cols = vertex_columns(r);
        std::vector<std::string> names = plan.relation(r).vertices;
        if (auto a = agg_column(r)) {
            cols.push_back(*a);
            names.push_back(kAggColumn);
        }
        Relation out(plan.relation(r).alias, names);
        out.reserve(rel.size());
        std::vector<Value> row(cols.size());
        for (std::size_t i = 0; i != rel.size(); ++i) {
            for (std::size_t c = 0; c != cols.size(); ++c)
                row[c] = rel.at(i, cols[c]);
            out.add_row(row);
        }
        return out;
    }

    std::vector<GroupResult> run_naive()
    {
        auto t0 = Clock::now();
        Relation current = load_plain(order[0]);
        stage("load:" + plan.relation(order[0]).alias, t0, current.size());
        stats.max_intermediate_rows = current.size();
        stats.peak_live_rows = current.size();

        for (std::size_t k = 1; k < order.size(); ++k) {
            t0 = Clock::now();
            Relation next = load_plain(order[k]);
            stage("load:" + plan.relation(order[k]).alias, t0, next.size());

            t0 = Clock::now();
            const auto need = needed_after(k);
            const auto on = shared(current.columns(), next.columns());
            std::vector<std::pair<bool, std::size_t>> sources; // (from next, column)
            std::vector<std::string> names;
            for (std::size_t c = 0; c != current.arity(); ++c) {
                const auto &n = current.columns()[c];
                if (need.contains(n) or n == kAggColumn) {
                    sources.emplace_back(false, c);
                    names.push_back(n);
                }
            }
            for (std::size_t c = 0; c != next.arity(); ++c) {
                const auto &n = next.columns()[c];
                if ((need.contains(n) or n == kAggColumn) and std::find(names.begin(), names.end(), n) == names.end()) {
                    sources.emplace_back(true, c);
                    names.push_back(n);
                }
            }
            Relation out("join", names);
            const auto c_on = indices(current.columns(), on);
            const auto n_on = indices(next.columns(), on);
            std::vector<Value> row(names.size());
            for_each_match(current.size(), next.size(), on.size(), key_of(current.cells(), current.arity(), c_on),
                           key_of(next.cells(), next.arity(), n_on), [&](std::size_t i, std::size_t j) {
                               for (std::size_t c = 0; c != sources.size(); ++c)
                                   row[c] = sources[c].first ? next.at(j, sources[c].second)
                                                             : current.at(i, sources[c].second);
                               out.add_row(row);
                           });
            stats.max_intermediate_rows = std::max<uint64_t>(stats.max_intermediate_rows, out.size());
            stats.peak_live_rows = std::max<uint64_t>(stats.peak_live_rows,
                                                      current.size() + next.size() + out.size());
            stage("join:" + plan.relation(order[k]).alias, t0, out.size());
            current = std::move(out);
        }

        t0 = Clock::now();
        const std::optional<std::string> agg = kind == AggregateKind::kCountStar ? std::nullopt
                                                                                  : std::optional(kAggColumn);
        auto groups = hash_aggregate(current, plan.hypergraph.group_by_vertices, kind, agg);
        stage("aggregate", t0, groups.size());
        return finish(std::move(groups));
    }

    /*--- PREAGG -----------------------------------------------------------------------------------------------------*/

    AnnotatedBag load_annotated(std::size_t r, const std::set<std::string> &need)
    {
        const auto &rel = relation(r);
        const auto &b = plan.relation(r);
        const auto all_cols = vertex_columns(r);
        std::vector<std::string> names;
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i != b.vertices.size(); ++i) {
            if (need.contains(b.vertices[i])) {
                names.push_back(b.vertices[i]);
                cols.push_back(all_cols[i]);
            }
        }
        const auto agg = agg_column(r);
        const bool numeric = kind == AggregateKind::kSum or kind == AggregateKind::kAvg;
        AnnotatedBag out(names, rel.size());
        std::vector<Value> key(cols.size());
        for (std::size_t i = 0; i != rel.size(); ++i) {
            for (std::size_t c = 0; c != cols.size(); ++c)
                key[c] = rel.at(i, cols[c]);
            Annotation a = Annotation::unit();
            if (agg) {
                const Value &v = rel.at(i, *agg);
                if (numeric) {
                    if (not v.is_int())
                        throw QueryError("SUM/AVG over non-integer column " + plan.hypergraph.aggregate_column->second);
                    a.sum = v.as_int();
                } else {
                    a.extreme = v;
                }
            }
            out.add(key, a, kind);
        }
        return out;
    }

    std::vector<GroupResult> run_preagg()
    {
        // The first relation keeps what the rest of the plan needs; later ones everything they join or group on.
        auto t0 = Clock::now();
        AnnotatedBag current = load_annotated(order[0], needed_after(0));
        stage("load:" + plan.relation(order[0]).alias, t0, current.size());
        stats.max_intermediate_rows = current.size();
        stats.peak_live_rows = current.size();

        for (std::size_t k = 1; k < order.size(); ++k) {
            t0 = Clock::now();
            const auto &nv = plan.relation(order[k]).vertices;
            AnnotatedBag next = load_annotated(order[k], std::set<std::string>(nv.begin(), nv.end()));
            stage("load:" + plan.relation(order[k]).alias, t0, next.size());

            t0 = Clock::now();
            const auto need = needed_after(k);
            const auto on = shared(current.columns, next.columns);
            std::vector<std::pair<bool, std::size_t>> sources;
            std::vector<std::string> names;
            for (std::size_t c = 0; c != current.columns.size(); ++c) {
                if (need.contains(current.columns[c])) {
                    sources.emplace_back(false, c);
                    names.push_back(current.columns[c]);
                }
            }
            for (std::size_t c = 0; c != next.columns.size(); ++c) {
                const auto &n = next.columns[c];
                if (need.contains(n) and std::find(names.begin(), names.end(), n) == names.end()) {
                    sources.emplace_back(true, c);
                    names.push_back(n);
                }
            }
            const auto c_on = indices(current.columns, on);
            const auto n_on = indices(next.columns, on);
            auto c_key = [&](std::size_t row, std::vector<Value> &key, bool) {
                auto k = current.keys.key(static_cast<uint32_t>(row));
                for (std::size_t c = 0; c != c_on.size(); ++c) key[c] = k[c_on[c]];
            };
            auto n_key = [&](std::size_t row, std::vector<Value> &key, bool) {
                auto k = next.keys.key(static_cast<uint32_t>(row));
                for (std::size_t c = 0; c != n_on.size(); ++c) key[c] = k[n_on[c]];
            };

            AnnotatedBag out(names, std::max(current.size(), next.size()));
            uint64_t produced = 0;
            std::vector<Value> row(names.size());
            for_each_match(current.size(), next.size(), on.size(), c_key, n_key, [&](std::size_t i, std::size_t j) {
                auto ck = current.keys.key(static_cast<uint32_t>(i));
                auto nk = next.keys.key(static_cast<uint32_t>(j));
                for (std::size_t c = 0; c != sources.size(); ++c)
                    row[c] = sources[c].first ? nk[sources[c].second] : ck[sources[c].second];
                out.add(row, product(current.annots[i], next.annots[j]), kind);
                ++produced;
            });
            stats.max_intermediate_rows = std::max(stats.max_intermediate_rows, produced);
            stats.peak_live_rows = std::max<uint64_t>(stats.peak_live_rows,
                                                      current.size() + next.size() + out.size());
            stage("join:" + plan.relation(order[k]).alias, t0, out.size());
            current = std::move(out);
        }

        t0 = Clock::now();
        const auto pos = indices(current.columns, plan.hypergraph.group_by_vertices);
        std::vector<GroupResult> groups;
        groups.reserve(current.size());
        for (uint32_t id = 0; id != current.size(); ++id) {
            const auto &a = current.annots[id];
            if (a.count == 0)
                continue;
            GroupResult g;
            auto k = current.keys.key(id);
            for (auto p : pos)
                g.group.push_back(k[p]);
            g.value = finalize(a, kind);
            g.count = a.count;
            groups.push_back(std::move(g));
        }
        stage("aggregate", t0, groups.size());
        return finish(std::move(groups));
    }
};

}

BaselineResult execute_plan(const QueryPlan &plan, const RelationMap &rels, BaselineMode mode)
{
    Executor ex(plan, rels, mode);
    BaselineResult out;
    out.groups = mode == BaselineMode::kNaive ? ex.run_naive() : ex.run_preagg();
    out.stats = std::move(ex.stats);
    return out;
}

}
