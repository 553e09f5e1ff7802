#pragma once

#include <joinagg/query_model.hpp>
#include <joinagg/relation.hpp>
#include <joinagg/results.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace joinagg {

/** Bag equijoin: output columns are r's columns followed by s's columns not in `on`.  The hash table is built on the
 * smaller input. */
Relation hash_join(const Relation &r, const Relation &s, std::span<const std::string> on);

/// Equijoin of counted relations; output multiplicities are the products of the input multiplicities.
CountedRelation hash_join(const CountedRelation &r, const CountedRelation &s, std::span<const std::string> on);

/** Group-by over `group` columns with the given aggregate over `agg_column` (ignored for COUNT(*)).  Rows weigh their
 * multiplicity when `multiplicity` is given.  Output is sorted by group values. */
std::vector<GroupResult> hash_aggregate(const Relation &r, std::span<const std::string> group, AggregateKind kind,
                                        const std::optional<std::string> &agg_column = std::nullopt,
                                        std::span<const uint64_t> multiplicity = {});

enum class BaselineMode
{
    kNaive,     ///< joins in decomposition order, one final aggregation
    kPreagg,    ///< eager pre-aggregation after load and after every join
};

struct BaselineResult
{
    std::vector<GroupResult> groups;    ///< sorted by group values
    RunStats stats;
};

/** Join-then-aggregate reference executor over the decomposition-tree BFS order.  Both modes keep only attributes that
 * are group attributes or still needed by a later join; NAIVE keeps duplicates, PREAGG collapses them into annotated
 * rows. */
BaselineResult execute_plan(const QueryPlan &plan, const RelationMap &rels, BaselineMode mode);

}
