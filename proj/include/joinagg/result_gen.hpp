#pragma once

#include <joinagg/query_model.hpp>
#include <joinagg/results.hpp>
#include <joinagg/traversal.hpp>

#include <boost/container/small_vector.hpp>

#include <optional>
#include <vector>

namespace joinagg {

inline constexpr NodeId kNoNode = ~NodeId{0};

/** A partial result of Stage 3: group nodes collected so far (one per slot), a representative path-id, the combined
 * annotation and the path-ids whose C_p has been multiplied in. */
struct FTuple
{
    boost::container::small_vector<NodeId, 4> nodes;        ///< per slot, kNoNode where not yet joined
    PathIndex rep = 0;
    Annotation annotation;
    boost::container::small_vector<PathIndex, 4> consumed;  ///< sorted
    boost::container::small_vector<PathIndex, 2> constituents;
};

using FList = std::vector<FTuple>;

/// Reached group nodes per slot, in node order.  A slot with an empty bucket means the source yields nothing.
std::vector<std::vector<NodeId>> bucketize(const TraversalOutcome &o, const DataGraph &g);

/// k-way merge of the bucket's c-pair lists into one FTuple list ordered by path-id (ties by node).
FList merge_bucket(const TraversalOutcome &o, const DataGraph &g, const std::vector<NodeId> &bucket);

/** Folds lists pairwise, longest representative first and then smallest, joining tuples whose representatives share
 * the prefix of length `depth` (default: the shorter representative, i.e. the plain prefix relation).  Every list must
 * be sorted by path-id and hold representatives of one length. */
FList prefix_join(std::vector<FList> lists, const TraversalOutcome &o, std::optional<uint32_t> depth = std::nullopt);

/// Multiplies C_q for every not yet consumed nonempty prefix q of the tuple's constituent path-ids.
void finalize_tuple(FTuple &f, const TraversalOutcome &o, AggregateKind kind);

/** Stage 3 for one query plan and graph. */
class ResultGenerator
{
    public:
    ResultGenerator(const QueryPlan &plan, const DataGraph &g);

    /// Appends the groups of one source (unsorted) and returns the number of FTuples materialized at the peak.
    std::size_t run(const TraversalOutcome &o, std::vector<GroupResult> &out) const;

    /// All joined, finalized tuples of one source (empty when some slot is unreached).
    FList joined(const TraversalOutcome &o, std::size_t *peak = nullptr) const;

    private:
    FList combine(std::size_t relation, std::vector<FList> &slot_lists, const TraversalOutcome &o,
                  std::size_t &live, std::size_t &peak) const;

    const QueryPlan &plan_;
    const DataGraph &g_;
};

}
