#pragma once

#include <joinagg/query_spec.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace joinagg {

/** One relation of the query as seen by the hypergraph: its relevant vertices and where they live in the source. */
struct RelationBinding
{
    std::string alias;
    std::string source;
    std::vector<std::string> vertices;                  ///< sorted; the hyperedge e_R
    std::map<std::string, std::string> vertex_column;   ///< vertex -> source column
    std::vector<std::string> group_vertices;            ///< sorted subset of `vertices`
};

/** H(X ∪ G, E): one hyperedge per relation over canonical vertex names.
 *
 * Every equality class of join attributes becomes one vertex named after its smallest member's column, qualified as
 * `alias.column` when that name collides.  A group attribute that is also joined gets its own copy vertex. */
struct QueryHypergraph
{
    std::vector<std::string> vertices;                  ///< sorted
    std::vector<RelationBinding> relations;             ///< in query order
    std::set<std::string> join_vertices;
    std::set<std::string> group_vertices;
    std::vector<std::string> group_by_vertices;         ///< parallel to QuerySpec::group_by

    /// Relation owning the aggregated attribute and its source column (absent for COUNT(*)).
    std::optional<std::pair<std::size_t, std::string>> aggregate_column;

    std::size_t relation_index(const std::string &alias) const;
    std::vector<std::set<std::string>> hyperedges() const;
};

QueryHypergraph build_hypergraph(const QuerySpec &q);

/// GYO ear removal: true iff the hypergraph reduces to at most one (empty) edge.
bool check_acyclic(const std::vector<std::set<std::string>> &edges);
inline bool check_acyclic(const QueryHypergraph &h) { return check_acyclic(h.hyperedges()); }

/// Checks alias resolution, attribute sanity, connectivity and acyclicity; throws QueryError.
void validate_query(const QuerySpec &q);

/** Rooted decomposition tree with one node per relation (indices into QueryHypergraph::relations). */
struct DecompositionTree
{
    std::size_t root = 0;
    std::vector<std::optional<std::size_t>> parent;
    std::vector<std::vector<std::size_t>> children;     ///< ordered by alias
    std::vector<std::size_t> bfs_order;
    std::vector<std::size_t> bfs_index;                 ///< inverse of bfs_order
    bool spanning_tree_fallback = false;                ///< BFS tree violated running intersection

    std::size_t size() const { return parent.size(); }
    bool is_leaf(std::size_t r) const { return children[r].empty(); }
};

/// BFS tree from `root` (alias; AUTO when absent = smallest group-relation alias).  Falls back to a maximum-weight
/// spanning tree when the BFS tree is not a join tree.
DecompositionTree build_decomposition(const QueryHypergraph &h, const std::optional<std::string> &root = std::nullopt);

/// Every vertex induces a connected subtree.
bool has_running_intersection(const QueryHypergraph &h, const DecompositionTree &t);

enum RelationType : unsigned
{
    kSource       = 1u << 0,
    kGroup        = 1u << 1,
    kBranching    = 1u << 2,
    kIntermediate = 1u << 3,
    kTerminal     = 1u << 4,   ///< non-group leaf (or childless root): its x_r is empty
};

std::string type_names(unsigned types);

enum class Side : uint8_t { kLeft, kRight };

struct RelationSplit
{
    std::vector<std::string> x_l;       ///< sorted
    std::vector<std::string> x_r;       ///< sorted
    unsigned types = 0;
    std::optional<Side> branching_side; ///< which node of the split is the branching designee
    std::optional<std::size_t> slot;    ///< output slot fed by this relation's x_r nodes
    uint32_t depth = 0;                 ///< branching relations on the root path, inclusive

    bool has(RelationType t) const { return (types & t) != 0; }
};

/** A sink class of Stage 3: the x_r nodes of one non-source group relation, or of a terminal relation. */
struct GroupSlot
{
    std::size_t relation;
    bool terminal;                      ///< contributes no output column
    uint32_t path_length;               ///< length of every path-id recorded at this slot
};

/// Position of one output group column.
struct OutputColumn
{
    std::optional<std::size_t> slot;    ///< absent: the source node
    std::size_t position;               ///< index into that node's values
};

struct QueryPlan
{
    QuerySpec spec;
    QueryHypergraph hypergraph;
    DecompositionTree tree;
    std::vector<RelationSplit> splits;  ///< per relation
    std::vector<GroupSlot> slots;       ///< in BFS order of their relations
    std::vector<OutputColumn> output;   ///< parallel to spec.group_by

    const RelationBinding & relation(std::size_t r) const { return hypergraph.relations[r]; }
};

std::vector<RelationSplit> classify_and_split(const QueryHypergraph &h, const DecompositionTree &t);

/// Validates, builds the hypergraph, decomposes and splits.  Throws QueryError on unsupported queries.
QueryPlan plan_query(const QuerySpec &q, const std::optional<std::string> &root = std::nullopt);

std::string explain_text(const QueryPlan &plan);
nlohmann::json explain_json(const QueryPlan &plan);

}
