#pragma once

#include <joinagg/baseline.hpp>
#include <joinagg/data_graph.hpp>
#include <joinagg/query_model.hpp>
#include <joinagg/result_gen.hpp>
#include <joinagg/results.hpp>
#include <joinagg/traversal.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace joinagg {

enum class EngineKind { kJoinAgg, kNaive, kPreagg };

std::string_view to_string(EngineKind e);
EngineKind parse_engine(std::string_view name);

struct EngineOptions
{
    std::optional<std::string> root;    ///< decomposition root alias; smallest group-relation alias when absent
    unsigned threads = 1;               ///< per-source parallelism (joinagg)
    TraversalOptions traversal;
    BuildOptions build;
    std::ostream *graph_dump = nullptr;
};

struct QueryResult
{
    std::vector<GroupResult> groups;    ///< sorted by group values
    RunStats stats;
};

/// Stages 1-3 over an already planned query.
QueryResult run_joinagg(const QueryPlan &plan, const RelationMap &rels, const EngineOptions &options = {});

/// Plans `spec` and runs it on the chosen engine.
QueryResult run_query(const QuerySpec &spec, const RelationMap &rels, const EngineOptions &options = {},
                      EngineKind engine = EngineKind::kJoinAgg);

}
