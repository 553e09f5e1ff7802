#include <joinagg/engine.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <chrono>
#include <thread>


namespace joinagg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b)
{
    return std::chrono::duration<double, std::milli>(b - a).count();
}

/// Output and counters of one worker over a contiguous range of sources.
struct Partial
{
    std::vector<GroupResult> groups;
    double traverse_ms = 0;
    double result_ms = 0;
    uint64_t hits = 0;
    uint64_t visits = 0;
    uint64_t cpair_peak = 0;
    uint64_t live_peak = 0;
};

void run_sources(const QueryPlan &plan, const DataGraph &g, const TraversalOptions &topts,
                 std::span<const NodeId> sources, Partial &out)
{
    Traverser traverser(g, topts);
    ResultGenerator results(plan, g);
    for (auto s : sources) {
        const auto t0 = Clock::now();
        const auto &outcome = traverser.run(s);
        const auto t1 = Clock::now();
        const std::size_t ftuples = results.run(outcome, out.groups);
        const auto t2 = Clock::now();

        out.traverse_ms += ms_between(t0, t1);
        out.result_ms += ms_between(t1, t2);
        out.hits += outcome.hits.size();
        out.visits += outcome.visits;
        out.cpair_peak = std::max<uint64_t>(out.cpair_peak, outcome.hits.size());
        out.live_peak = std::max<uint64_t>(out.live_peak, outcome.hits.size() + outcome.paths.size() + ftuples);
    }
}

}

std::string_view to_string(EngineKind e)
{
    switch (e) {
        case EngineKind::kJoinAgg: return "joinagg";
        case EngineKind::kNaive:   return "naive";
        case EngineKind::kPreagg:  return "preagg";
    }
    return "?";
}

EngineKind parse_engine(std::string_view name)
{
    if (name == "joinagg") return EngineKind::kJoinAgg;
    if (name == "naive") return EngineKind::kNaive;
    if (name == "preagg") return EngineKind::kPreagg;
    throw QueryError("unknown engine '" + std::string(name) + "' (expected joinagg, naive or preagg)");
}

QueryResult run_joinagg(const QueryPlan &plan, const RelationMap &rels, const EngineOptions &options)
{
    QueryResult result;
    auto &stats = result.stats;
    stats.engine = "joinagg";

    auto t0 = Clock::now();
    const DataGraph g = build_graph(plan, rels, options.build);
    stats.stages.push_back({"load", ms_between(t0, Clock::now()), g.size()});
    stats.nodes = g.stats.nodes;
    stats.edges = g.stats.edges;
    if (options.graph_dump)
        dump_graph(*options.graph_dump, g);

    const auto sources = all_sources(g);
    unsigned threads = std::max(1u, options.threads);
    if (options.traversal.trace)
        threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, sources.size())));

    std::vector<Partial> partials(threads);
    if (threads == 1) {
        run_sources(plan, g, options.traversal, sources, partials[0]);
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (sources.size() + threads - 1) / threads;
        for (unsigned t = 0; t != threads; ++t) {
            const std::size_t lo = std::min(sources.size(), t * chunk);
            const std::size_t hi = std::min(sources.size(), lo + chunk);
            workers.emplace_back([&, t, lo, hi] {
                try {
                    run_sources(plan, g, options.traversal, sources.subspan(lo, hi - lo), partials[t]);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto &w : workers)
            w.join();
        for (auto &e : errors) {
            if (e)
                std::rethrow_exception(e);
        }
    }

    // Concatenate in source order, then sort by group values.
    double traverse_ms = 0, result_ms = 0;
    uint64_t hits = 0, live_peak = 0;
    for (auto &p : partials) {
        traverse_ms += p.traverse_ms;
        result_ms += p.result_ms;
        hits += p.hits;
        stats.visits += p.visits;
        stats.cpair_peak = std::max(stats.cpair_peak, p.cpair_peak);
        live_peak = std::max(live_peak, p.live_peak);
        result.groups.insert(result.groups.end(), std::make_move_iterator(p.groups.begin()),
                             std::make_move_iterator(p.groups.end()));
    }
    t0 = Clock::now();
    sort_groups(result.groups);
    result_ms += ms_between(t0, Clock::now());

    stats.stages.push_back({"traverse", traverse_ms, hits});
    stats.stages.push_back({"result", result_ms, result.groups.size()});
    stats.output_groups = result.groups.size();
    stats.peak_structures = stats.nodes + stats.edges + live_peak;
    return result;
}

QueryResult run_query(const QuerySpec &spec, const RelationMap &rels, const EngineOptions &options, EngineKind engine)
{
    const auto t0 = Clock::now();
    const QueryPlan plan = plan_query(spec, options.root);
    const double plan_ms = ms_between(t0, Clock::now());

    QueryResult result;
    if (engine == EngineKind::kJoinAgg) {
        result = run_joinagg(plan, rels, options);
    } else {
        auto b = execute_plan(plan, rels, engine == EngineKind::kNaive ? BaselineMode::kNaive : BaselineMode::kPreagg);
        result.groups = std::move(b.groups);
        result.stats = std::move(b.stats);
    }
    result.stats.stages.insert(result.stats.stages.begin(), {"plan", plan_ms, plan.hypergraph.relations.size()});
    return result;
}

}
