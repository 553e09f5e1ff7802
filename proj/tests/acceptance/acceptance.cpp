/** Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails. */

#include "../support/oracle.hpp"
#include "../support/random_queries.hpp"

#include <joinagg/baseline.hpp>
#include <joinagg/datagen.hpp>
#include <joinagg/engine.hpp>
#include <joinagg/errors.hpp>
#include <joinagg/sql_parser.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>


using namespace joinagg;
using namespace joinagg::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict
{
    bool pass = true;
    std::string detail;

    void fail(const std::string &why)
    {
        if (pass)
            detail = why;
        pass = false;
    }
    void expect(bool ok, const std::string &why)
    {
        if (not ok)
            fail(why);
    }
};

std::string describe(const QuerySpec &q) { return to_sql(q); }

std::optional<NodeId> find_node(const DataGraph &g, const std::string &relation, std::string_view value, bool group)
{
    for (NodeId n = 0; n != g.size(); ++n) {
        if (g.relation_names[g.nodes[n].relation] != relation or g.nodes[n].arity != 1)
            continue;
        if (g.values(n)[0] == Value::string(value) and g.is_group(n) == group)
            return n;
    }
    return std::nullopt;
}

std::string show_cpairs(const TraversalOutcome &o, const DataGraph &g, NodeId n)
{
    std::ostringstream s;
    s << '{';
    for (const auto &cp : o.cpairs(n)) {
        s << "([";
        auto path = o.paths.nodes(cp.path);
        for (std::size_t i = 0; i != path.size(); ++i)
            s << (i ? "," : "") << join_values(g.values(path[i]));
        s << "]," << cp.c.count << ')';
    }
    s << '}';
    return s.str();
}

/// Three-way equality with the brute-force oracle on 500 random instances, plus conservation on each of them.
struct OracleSweep
{
    Verdict equivalence;
    Verdict conservation;
    double seconds = 0;
    std::size_t instances = 0;
    uint64_t total_tuples = 0;
    std::set<std::string> shapes;
    std::set<AggregateKind> kinds;
};

OracleSweep oracle_sweep()
{
    OracleSweep out;
    const auto t0 = Clock::now();
    SplitMix64 rng(20240611);
    const Shape shapes[] = {Shape::kSelfJoin, Shape::kChain, Shape::kBranch, Shape::kTree};
    for (std::size_t i = 0; i != 500; ++i) {
        const Shape shape = shapes[i % 4];
        RandomInstance inst;
        std::optional<OracleResult> oracle;
        RandomLimits limits;
        while (not oracle) {
            inst = random_instance(rng, shape, limits);
            oracle = brute_force(inst.query, inst.rels, 1'000'000);
            if (not oracle)
                limits.max_rows = std::max<std::size_t>(8, limits.max_rows / 2);
        }
        ++out.instances;
        out.total_tuples += oracle->join_size;
        out.shapes.insert(std::string(to_string(shape)));
        out.kinds.insert(inst.query.aggregate.kind);

        EngineOptions opts;
        if (i % 3 == 1)
            opts.traversal.strategy = TraversalStrategy::kDepthFirst;
        if (i % 5 == 2)
            opts.threads = 2;
        for (auto engine : {EngineKind::kJoinAgg, EngineKind::kNaive, EngineKind::kPreagg}) {
            QueryResult r;
            try {
                r = run_query(inst.query, inst.rels, opts, engine);
            } catch (const std::exception &e) {
                out.equivalence.fail("instance " + std::to_string(i) + " " + std::string(to_string(engine)) +
                                     " threw: " + e.what() + " on " + describe(inst.query));
                continue;
            }
            if (auto d = first_difference(r.groups, oracle->groups))
                out.equivalence.fail("instance " + std::to_string(i) + ": " + std::string(to_string(engine)) +
                                     " differs from the oracle at group " + std::to_string(*d) + " on " +
                                     describe(inst.query));
            if (total_count(r.groups) != oracle->join_size)
                out.conservation.fail("instance " + std::to_string(i) + ": " + std::string(to_string(engine)) +
                                      " sums to " + std::to_string(total_count(r.groups)) + ", join has " +
                                      std::to_string(oracle->join_size));
        }
    }
    out.seconds = seconds_since(t0);
    out.equivalence.expect(out.seconds < 300, "took " + std::to_string(out.seconds) + " s (limit 300 s)");
    out.equivalence.expect(out.shapes.size() == 4 and out.kinds.size() == 5, "sweep missed a shape or aggregate kind");
    return out;
}

/// Conservation on the fixed fixtures, independent of the random sweep.
Verdict conservation_fixtures()
{
    Verdict v;
    for (auto family : {Family::kSelfJoin, Family::kChain4, Family::kBranch}) {
        GenConfig cfg;
        cfg.family = family;
        cfg.n = 400;
        cfg.s_join = family == Family::kBranch ? std::vector<double>{0.05, 0.3} : std::vector<double>{0.05};
        cfg.s_group = 0.02;
        const auto data = generate(cfg);
        const auto oracle = brute_force(data.query, data.relations, 50'000'000);
        if (not oracle) {
            v.fail("fixture join too large for the oracle");
            continue;
        }
        const auto r = run_query(data.query, data.relations);
        v.expect(total_count(r.groups) == oracle->join_size,
                 std::string(to_string(family)) + ": " + std::to_string(total_count(r.groups)) + " != " +
                 std::to_string(oracle->join_size));
    }
    return v;
}

Verdict worked_example()
{
    Verdict v;
    RelationMap rels;
    rels["R1"] = std::make_shared<const Relation>(make_relation("R1", {"g", "j"}, {{"1a", "j1"}, {"1b", "j1"}, {"1b", "j1"}}));
    rels["R2"] = std::make_shared<const Relation>(make_relation("R2", {"j", "g"}, {{"j1", "2a"}}));
    rels["R3"] = std::make_shared<const Relation>(make_relation("R3", {"j", "g"}, {{"j1", "3b"}}));
    const auto q = parse_sql("SELECT R1.g, R2.g, R3.g, COUNT(*) FROM R1, R2, R3 "
                             "WHERE R1.j = R2.j AND R1.j = R3.j GROUP BY R1.g, R2.g, R3.g");
    const auto plan = plan_query(q);
    const auto g = build_graph(plan, rels);

    const auto src = find_node(g, "R1", "1b", false);
    const auto n2a = find_node(g, "R2", "2a", true);
    const auto n3b = find_node(g, "R3", "3b", true);
    if (not src or not n2a or not n3b) {
        v.fail("fixture nodes missing from the data graph");
        return v;
    }
    const auto o = traverse_from_source(g, *src);
    v.expect(show_cpairs(o, g, *n2a) == "{([j1],1)}", "l_2a = " + show_cpairs(o, g, *n2a));
    v.expect(show_cpairs(o, g, *n3b) == "{([j1],1)}", "l_3b = " + show_cpairs(o, g, *n3b));

    const auto pairs = o.cpairs(*n2a);
    if (pairs.size() == 1) {
        const auto p = pairs[0].path;
        v.expect(o.paths.length(p) == 1 and o.path_counts[p].count == 2,
                 "C_[j1] = " + std::to_string(o.path_counts[p].count));
    }

    const auto r = run_query(q, rels);
    bool found = false;
    for (const auto &gr : r.groups) {
        if (join_values(gr.group) == "1b,2a,3b") {
            found = true;
            v.expect(gr.value == AggregateValue{int64_t{2}}, "(1b,2a,3b) -> " + to_string(gr.value));
        }
    }
    v.expect(found, "group (1b,2a,3b) not emitted");
    v.expect(r.groups.size() == 2, "expected 2 groups, got " + std::to_string(r.groups.size()));
    return v;
}

Verdict caching_soundness(std::string &info)
{
    Verdict v;
    SplitMix64 rng(777);
    const Shape shapes[] = {Shape::kBranch, Shape::kTree, Shape::kChain, Shape::kSelfJoin};
    std::size_t graphs = 0, sources = 0;
    for (std::size_t i = 0; i != 200; ++i) {
        RandomLimits limits;
        limits.max_rows = 300;
        const auto inst = random_instance(rng, shapes[i % 4], limits);
        const auto plan = plan_query(inst.query);
        const auto g = build_graph(plan, inst.rels);
        ++graphs;
        TraversalOptions on{TraversalStrategy::kDepthFirst, true, nullptr};
        TraversalOptions off{TraversalStrategy::kDepthFirst, false, nullptr};
        TraversalOptions layered{TraversalStrategy::kLayered, true, nullptr};
        for (auto s : all_sources(g)) {
            ++sources;
            const auto a = canonical(traverse_from_source(g, s, on));
            const auto b = canonical(traverse_from_source(g, s, off));
            const auto c = canonical(traverse_from_source(g, s, layered));
            if (not(a == b))
                v.fail("graph " + std::to_string(i) + ": caching on/off outcomes differ on " + describe(inst.query));
            if (not(a == c))
                v.fail("graph " + std::to_string(i) + ": layered and depth-first outcomes differ");
        }
    }

    // branching fixture: two paths reach branching node k with the same path-id
    RelationMap rels;
    rels["R1"] = std::make_shared<const Relation>(make_relation("R1", {"g", "j"}, {{"s", "j1"}, {"s", "j2"}}));
    rels["R2"] = std::make_shared<const Relation>(make_relation("R2", {"j", "k"}, {{"j1", "k"}, {"j2", "k"}}));
    rels["R3"] = std::make_shared<const Relation>(make_relation("R3", {"k", "g"}, {{"k", "x1"}, {"k", "x2"}}));
    rels["R4"] = std::make_shared<const Relation>(make_relation("R4", {"k", "g"}, {{"k", "y1"}, {"k", "y2"}}));
    const auto q = parse_sql("SELECT R1.g, R3.g, R4.g, COUNT(*) FROM R1, R2, R3, R4 "
                             "WHERE R1.j = R2.j AND R2.k = R3.k AND R2.k = R4.k GROUP BY R1.g, R3.g, R4.g");
    const auto plan = plan_query(q);
    const auto g = build_graph(plan, rels);
    uint64_t on_visits = 0, off_visits = 0;
    for (auto s : all_sources(g)) {
        on_visits += traverse_from_source(g, s, {TraversalStrategy::kDepthFirst, true, nullptr}).visits;
        off_visits += traverse_from_source(g, s, {TraversalStrategy::kDepthFirst, false, nullptr}).visits;
    }
    v.expect(on_visits < off_visits, "branching fixture: caching on " + std::to_string(on_visits) +
                                     " visits, off " + std::to_string(off_visits));
    info = std::to_string(graphs) + " graphs, " + std::to_string(sources) + " sources; fixture visits on=" +
           std::to_string(on_visits) + " off=" + std::to_string(off_visits);
    return v;
}

Verdict memory_trend(std::string &info)
{
    Verdict v;
    const auto t0 = Clock::now();
    const std::size_t sizes[] = {10'000, 25'000, 50'000, 100'000};
    std::vector<double> ns, pre, agg;
    std::ostringstream s;
    for (auto n : sizes) {
        GenConfig cfg;
        cfg.family = Family::kBranch;
        cfg.n = n;
        cfg.s_join = {0.01, 0.5};
        cfg.s_group = 0.001;
        const auto data = generate(cfg);
        const auto plan = plan_query(data.query);
        const auto joinagg = run_joinagg(plan, data.relations);
        const auto preagg = execute_plan(plan, data.relations, BaselineMode::kPreagg);
        if (auto d = first_difference(joinagg.groups, preagg.groups))
            v.fail("n=" + std::to_string(n) + ": outputs differ");
        ns.push_back(static_cast<double>(n));
        pre.push_back(static_cast<double>(preagg.stats.max_intermediate_rows));
        agg.push_back(static_cast<double>(joinagg.stats.peak_structures));
        s << " n=" << n << ":" << preagg.stats.max_intermediate_rows << "/" << joinagg.stats.peak_structures;
    }

    // PREAGG: log-log slope above 1
    double mx = 0, my = 0;
    for (std::size_t i = 0; i != ns.size(); ++i) {
        mx += std::log(ns[i]);
        my += std::log(pre[i]);
    }
    mx /= ns.size();
    my /= ns.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i != ns.size(); ++i) {
        sxy += (std::log(ns[i]) - mx) * (std::log(pre[i]) - my);
        sxx += (std::log(ns[i]) - mx) * (std::log(ns[i]) - mx);
    }
    const double slope = sxy / sxx;
    v.expect(slope > 1.0, "PREAGG log-log slope " + std::to_string(slope));

    // joinagg: within 1.5x of the least-squares line c*n through the origin
    double num = 0, den = 0;
    for (std::size_t i = 0; i != ns.size(); ++i) {
        num += ns[i] * agg[i];
        den += ns[i] * ns[i];
    }
    const double c = num / den;
    for (std::size_t i = 0; i != ns.size(); ++i)
        v.expect(agg[i] <= 1.5 * c * ns[i], "joinagg peak above 1.5*c*n at n=" + std::to_string(ns[i]));

    for (std::size_t i = 0; i != ns.size(); ++i) {
        const double ratio = pre[i] / agg[i];
        if (i)
            v.expect(ratio > pre[i - 1] / agg[i - 1], "ratio not increasing at n=" + std::to_string(ns[i]));
        s << " r=" << std::round(ratio * 100) / 100;
    }
    v.expect(pre.back() / agg.back() >= 5.0, "ratio at n=100k below 5");
    const double secs = seconds_since(t0);
    v.expect(secs < 600, "took " + std::to_string(secs) + " s");
    char buf[64];
    std::snprintf(buf, sizeof buf, " slope=%.2f c=%.2f %.0fs", slope, c, secs);
    info = "preagg/joinagg" + s.str() + buf;
    return v;
}

Verdict selfjoin_cardinality(std::string &info)
{
    Verdict v;
    GenConfig cfg;
    cfg.family = Family::kSelfJoin;
    cfg.n = 50'000;
    cfg.s_join = {0.01};
    cfg.s_group = 0.01;
    const auto data = generate(cfg);
    const auto oracle = brute_force(data.query, data.relations, 100'000'000);
    if (not oracle) {
        v.fail("oracle limit exceeded");
        return v;
    }
    const double b = static_cast<double>(domain_size(0.01, cfg.n));
    const double expected = static_cast<double>(cfg.n) * static_cast<double>(cfg.n) / b;
    const double actual = static_cast<double>(oracle->join_size);
    v.expect(std::abs(actual - expected) <= 0.1 * expected,
             "join size " + std::to_string(oracle->join_size) + " vs n^2/b " + std::to_string(expected));
    char buf[96];
    std::snprintf(buf, sizeof buf, "join=%llu n^2/b=%.0f dev=%.2f%%", static_cast<unsigned long long>(oracle->join_size),
                  expected, 100 * (actual - expected) / expected);
    info = buf;
    return v;
}

Verdict structure_sizes(std::string &info)
{
    Verdict v;
    struct Case { std::size_t n; double s_join, s_group; };
    const Case cases[] = {{200, 0.05, 0.05}, {1000, 0.01, 0.01}, {2000, 0.05, 0.1}, {5000, 0.002, 0.5}, {500, 0.5, 0.2}};
    std::ostringstream s;
    for (const auto &c : cases) {
        GenConfig cfg;
        cfg.n = c.n;
        cfg.s_join = {c.s_join};
        cfg.s_group = c.s_group;
        const auto data = generate(cfg);
        const auto &r = *data.files.begin()->second;
        std::set<Value> gs, js;
        for (std::size_t i = 0; i != r.size(); ++i) {
            gs.insert(r.at(i, r.column_index("g")));
            js.insert(r.at(i, r.column_index("j")));
        }
        const std::size_t a = gs.size(), b = js.size();
        const auto g = build_graph(plan_query(data.query), data.relations);
        v.expect(g.stats.formula_nodes() == 2 * a + 2 * b, "n=" + std::to_string(c.n) + ": |V|=" +
                 std::to_string(g.stats.formula_nodes()) + " vs 2a+2b=" + std::to_string(2 * a + 2 * b));
        v.expect(g.stats.intra_edges <= 2 * a * b, "n=" + std::to_string(c.n) + ": intra edges " +
                 std::to_string(g.stats.intra_edges) + " > 2ab=" + std::to_string(2 * a * b));
        s << " (a=" << a << ",b=" << b << ",|V|=" << g.stats.formula_nodes() << ",intra=" << g.stats.intra_edges << ")";
    }
    info = s.str().substr(1);
    return v;
}

Verdict parser_goldens()
{
    Verdict v;
    auto ref = [](std::string a, std::string c) { return AttributeRef{std::move(a), std::move(c)}; };

    const Catalog tpch = {
        {"partsupp", {"ps_partkey", "ps_suppkey", "ps_availqty"}},
        {"lineitem", {"l_orderkey", "l_partkey", "l_suppkey", "l_quantity"}},
        {"orders", {"o_orderkey", "o_custkey", "o_orderdate"}},
        {"customer", {"c_custkey", "c_name", "c_zipcode"}},
    };
    QuerySpec q1;
    q1.relations = {{"partsupp", "partsupp"}, {"lineitem", "lineitem"}, {"orders", "orders"}, {"customer", "customer"}};
    q1.joins = {{ref("partsupp", "ps_partkey"), ref("lineitem", "l_partkey")},
                {ref("orders", "o_orderkey"), ref("lineitem", "l_orderkey")},
                {ref("orders", "o_custkey"), ref("customer", "c_custkey")}};
    q1.group_by = {ref("partsupp", "ps_suppkey"), ref("customer", "c_zipcode")};
    try {
        const auto got = parse_sql("SELECT ps_suppkey, c_zipcode, COUNT(*)\n"
                                   "FROM partsupp, lineitem, orders, customer\n"
                                   "WHERE ps_partkey = l_partkey AND\n"
                                   "      o_orderkey = l_orderkey AND\n"
                                   "      o_custkey = c_custkey\n"
                                   "GROUP BY ps_suppkey, c_zipcode;", &tpch);
        v.expect(got == q1, "Q1 parsed to " + to_sql(got));
    } catch (const std::exception &e) {
        v.fail(std::string("Q1: ") + e.what());
    }

    QuerySpec q2;
    q2.relations = {{"Nodes", "n1"}, {"Edges", "e1"}, {"Edges", "e2"}, {"Nodes", "n2"}};
    q2.joins = {{ref("n1", "id"), ref("e1", "src")}, {ref("e1", "dst"), ref("e2", "src")},
                {ref("n2", "id"), ref("e2", "dst")}};
    q2.group_by = {ref("n1", "label"), ref("n2", "label")};
    try {
        const auto got = parse_sql("SELECT n1.label, n2.label, COUNT(*)\n"
                                   "FROM Nodes n1, Edges e1,\n"
                                   "     Edges e2, Nodes n2\n"
                                   "WHERE n1.id = e1.src AND\n"
                                   "      e1.dst = e2.src AND\n"
                                   "      n2.id = e2.dst\n"
                                   "GROUP BY n1.label, n2.label;");
        v.expect(got == q2, "Q2 parsed to " + to_sql(got));
    } catch (const std::exception &e) {
        v.fail(std::string("Q2: ") + e.what());
    }

    QuerySpec q3;
    q3.relations = {{"R1", "A"}, {"R2", "J"}, {"R3", "B"}, {"R4", "C"}};
    q3.joins = {{ref("A", "j1"), ref("J", "j1")}, {ref("J", "j2"), ref("B", "j2")}, {ref("J", "j3"), ref("C", "j3")}};
    q3.group_by = {ref("A", "a"), ref("B", "b"), ref("C", "c")};
    try {
        const auto got = parse_sql("SELECT A.a, B.b, C.c, COUNT(*)\n"
                                   "FROM R1 A, R2 J, R3 B, R4 C\n"
                                   "WHERE A.j1 = J.j1 AND J.j2 = B.j2 AND J.j3 = C.j3\n"
                                   "GROUP BY A.a, B.b, C.c;");
        v.expect(got == q3, "Q3 parsed to " + to_sql(got));
    } catch (const std::exception &e) {
        v.fail(std::string("Q3: ") + e.what());
    }

    try {
        parse_sql("SELECT R.x, COUNT(*) FROM R, S, T WHERE R.a = S.a AND S.b = T.b AND T.c = R.c GROUP BY R.x");
        v.fail("triangle query accepted");
    } catch (const QueryError &e) {
        v.expect(std::string(e.what()).find("cyclic query unsupported") != std::string::npos,
                 std::string("triangle rejected with '") + e.what() + "'");
    }
    return v;
}

Verdict runtime_trend(std::string &info)
{
    Verdict v;
    struct Case { const char *name; double s_join, s_group; };
    const Case cases[] = {{"large groups", 0.01, 0.001}, {"unit groups", 0.05, 1.0}};
    std::ostringstream s;
    for (const auto &c : cases) {
        GenConfig cfg;
        cfg.n = 100'000;
        cfg.s_join = {c.s_join};
        cfg.s_group = c.s_group;
        const auto data = generate(cfg);
        const auto plan = plan_query(data.query);

        // best of three for each engine
        double t_agg = 1e300, t_naive = 1e300;
        QueryResult agg;
        BaselineResult naive;
        for (int rep = 0; rep != 3; ++rep) {
            auto t0 = Clock::now();
            agg = run_joinagg(plan, data.relations);
            t_agg = std::min(t_agg, seconds_since(t0));
            t0 = Clock::now();
            naive = execute_plan(plan, data.relations, BaselineMode::kNaive);
            t_naive = std::min(t_naive, seconds_since(t0));
        }
        if (first_difference(agg.groups, naive.groups))
            v.fail(std::string(c.name) + ": outputs differ");
        const double avg_group = static_cast<double>(total_count(agg.groups)) / static_cast<double>(agg.groups.size());
        if (c.s_group < 0.5) {
            v.expect(avg_group >= 20, std::string(c.name) + ": average group size " + std::to_string(avg_group));
            v.expect(t_agg < t_naive, std::string(c.name) + ": joinagg " + std::to_string(t_agg) + " s vs naive " +
                     std::to_string(t_naive) + " s");
        } else {
            v.expect(avg_group < 1.5, std::string(c.name) + ": average group size " + std::to_string(avg_group));
            v.expect(t_agg <= 3 * t_naive, std::string(c.name) + ": joinagg " + std::to_string(t_agg) +
                     " s vs naive " + std::to_string(t_naive) + " s");
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s: avg group %.2f, joinagg %.3fs, naive %.3fs", s.tellp() ? "; " : "",
                      c.name, avg_group, t_agg, t_naive);
        s << buf;
    }
    info = s.str();
    return v;
}

}

int main()
{
    int failures = 0;
    auto report = [&](const char *name, const Verdict &v, const std::string &info) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << name;
        if (not v.pass)
            std::cout << " -- " << v.detail;
        else if (not info.empty())
            std::cout << " -- " << info;
        std::cout << std::endl;
        failures += not v.pass;
    };
    auto guarded = [&](const char *name, const std::function<Verdict(std::string &)> &f) {
        std::string info;
        Verdict v;
        try {
            v = f(info);
        } catch (const std::exception &e) {
            v.fail(std::string("exception: ") + e.what());
        }
        report(name, v, info);
    };

    OracleSweep sweep;
    try {
        sweep = oracle_sweep();
    } catch (const std::exception &e) {
        sweep.equivalence.fail(std::string("exception: ") + e.what());
        sweep.conservation.fail(std::string("exception: ") + e.what());
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu instances, %llu join tuples, %.1fs", sweep.instances,
                  static_cast<unsigned long long>(sweep.total_tuples), sweep.seconds);
    report("oracle-equivalence", sweep.equivalence, buf);

    guarded("worked-example", [](std::string &info) {
        info = "l_2a={([j1],1)} l_3b={([j1],1)} C_[j1]=2 (1b,2a,3b)->2";
        return worked_example();
    });
    guarded("conservation", [&](std::string &info) {
        Verdict v = sweep.conservation;
        Verdict f = conservation_fixtures();
        if (not f.pass)
            v.fail(f.detail);
        info = "random sweep and generated fixtures";
        return v;
    });
    guarded("caching-soundness", caching_soundness);
    guarded("memory-trend", memory_trend);
    guarded("selfjoin-cardinality", selfjoin_cardinality);
    guarded("structure-sizes", structure_sizes);
    guarded("parser-goldens", [](std::string &info) {
        info = "Q1, Q2, Q3, triangle";
        return parser_goldens();
    });
    guarded("runtime-trend", runtime_trend);
    return failures ? 1 : 0;
}
