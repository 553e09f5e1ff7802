#pragma once

#include <joinagg/aggregates.hpp>
#include <joinagg/query_model.hpp>
#include <joinagg/relation.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace joinagg {

using NodeId = uint32_t;

enum class NodeType : uint8_t { kSource, kGroup, kBranching, kIntermediate };

std::string_view to_string(NodeType t);

struct GraphNode
{
    uint32_t relation;          ///< index into the plan's relations
    Side side;
    NodeType type;
    int32_t slot = -1;          ///< group slot, GROUP nodes only
    uint32_t offset = 0;        ///< first out-edge
    uint32_t degree = 0;
    uint32_t values = 0;        ///< first value in DataGraph::node_values
    uint32_t arity = 0;
};

struct GraphEdge
{
    NodeId target;
    uint32_t multiplicity;
};

struct GraphStats
{
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t intra_edges = 0;
    std::size_t join_edges = 0;
    std::size_t unit_nodes = 0;         ///< empty-tuple sinks of terminal relations
    std::size_t pruned_nodes = 0;
    std::size_t by_type[4] = {};        ///< indexed by NodeType
    std::size_t resident_bytes = 0;

    /// Node count comparable with closed-form structure sizes (unit sinks excluded).
    std::size_t formula_nodes() const { return nodes - unit_nodes; }
};

/** The compiled join: typed value nodes with multiplicity-weighted edges in CSR layout.
 *
 * Node ids are assigned relation by relation in BFS order of the decomposition, x_l nodes before x_r nodes, each side
 * sorted by values; every edge therefore points to a larger id.  Each node's edge block lists intra-relation edges
 * first, then join edges, each ordered by target. */
struct DataGraph
{
    std::vector<GraphNode> nodes;
    std::vector<Value> node_values;
    std::vector<GraphEdge> edges;
    std::vector<Annotation> payload;    ///< per edge; empty for COUNT(*)
    std::vector<NodeId> sources;        ///< sorted by value
    std::size_t slot_count = 0;
    AggregateKind kind = AggregateKind::kCountStar;
    std::vector<std::string> relation_names;
    GraphStats stats;

    std::size_t size() const { return nodes.size(); }
    std::span<const Value> values(NodeId n) const { return {node_values.data() + nodes[n].values, nodes[n].arity}; }
    std::span<const GraphEdge> out_edges(NodeId n) const { return {edges.data() + nodes[n].offset, nodes[n].degree}; }
    bool is_branching(NodeId n) const { return nodes[n].type == NodeType::kBranching; }
    bool is_group(NodeId n) const { return nodes[n].type == NodeType::kGroup; }

    /// Annotation carried by edge `e` (its multiplicity, plus any aggregated payload).
    Annotation edge_annotation(std::size_t e) const
    {
        return payload.empty() ? Annotation{edges[e].multiplicity, 0, std::nullopt} : payload[e];
    }

    /// `A.l(1)` or `A.r(1,7)`: relation alias, side, values.
    std::string label(NodeId n) const;
};

struct BuildOptions
{
    bool prune = true;          ///< drop nodes unreachable from every source
};

/// Stage 1.  `rels` maps every query alias to its relation.
DataGraph build_graph(const QueryPlan &plan, const RelationMap &rels, const BuildOptions &options = {});

/// One line per edge: `A.l(1) -> A.r(7) [m=2] (SOURCE->INTERMEDIATE)`.
void dump_graph(std::ostream &out, const DataGraph &g);

/// FNV-1a over the CSR arrays, used to check that a graph was not modified.
uint64_t graph_checksum(const DataGraph &g);

}
