#include <joinagg/data_graph.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>


namespace joinagg {

std::string_view to_string(NodeType t)
{
    switch (t) {
        case NodeType::kSource:       return "SOURCE";
        case NodeType::kGroup:        return "GROUP";
        case NodeType::kBranching:    return "BRANCHING";
        case NodeType::kIntermediate: return "INTERMEDIATE";
    }
    return "?";
}

std::string DataGraph::label(NodeId n) const
{
    const auto &node = nodes[n];
    return relation_names[node.relation] + (node.side == Side::kLeft ? ".l(" : ".r(") + join_values(values(n)) + ")";
}

namespace {

std::vector<std::size_t> positions_of(const std::vector<std::string> &subset, const std::vector<std::string> &attrs)
{
    std::vector<std::size_t> pos;
    for (const auto &a : subset) {
        auto it = std::lower_bound(attrs.begin(), attrs.end(), a);
        if (it == attrs.end() or *it != a)
            throw InternalError("attribute " + a + " missing from node attributes");
        pos.push_back(it - attrs.begin());
    }
    return pos;
}

void project(std::span<const Value> from, const std::vector<std::size_t> &pos, std::vector<Value> &to)
{
    to.resize(pos.size());
    for (std::size_t i = 0; i != pos.size(); ++i)
        to[i] = from[pos[i]];
}

/// Distinct values of one relation side, with ids local to that side.
struct SideNodes
{
    explicit SideNodes(std::size_t arity) : index(arity) { }

    KeyIndex index;
    std::vector<NodeId> global;         ///< local id -> global id
};

struct Intra
{
    uint32_t l, r;
    uint64_t multiplicity;
    Annotation payload;
};

struct RelationNodes
{
    RelationNodes(std::size_t l_arity, std::size_t r_arity) : left(l_arity), right(r_arity) { }

    SideNodes left;
    SideNodes right;
    std::vector<Intra> intra;
};

struct PendingEdge
{
    NodeId source;
    NodeId target;
    bool join;
    uint64_t multiplicity;
    Annotation payload;
};

/// Side whose nodes carry the join edges to children: x_l for internal non-root group relations, x_r otherwise.
Side downward_side(const QueryPlan &plan, std::size_t r)
{
    const bool internal_group = r != plan.tree.root and plan.splits[r].has(kGroup) and not plan.tree.is_leaf(r);
    return internal_group ? Side::kLeft : Side::kRight;
}

RelationNodes load_relation(const QueryPlan &plan, std::size_t r, const Relation &rel, AggregateKind kind)
{
    const auto &binding = plan.relation(r);
    const auto &split = plan.splits[r];
    std::vector<std::string> attrs;
    std::set_union(split.x_l.begin(), split.x_l.end(), split.x_r.begin(), split.x_r.end(), std::back_inserter(attrs));

    std::vector<std::size_t> columns;
    for (const auto &a : attrs) {
        auto col = rel.find_column(binding.vertex_column.at(a));
        if (not col)
            throw QueryError("unknown column '" + binding.vertex_column.at(a) + "' in relation " + binding.source +
                             " (alias " + binding.alias + ")");
        columns.push_back(*col);
    }
    std::optional<std::size_t> agg_col;
    if (plan.hypergraph.aggregate_column and plan.hypergraph.aggregate_column->first == r) {
        const auto &name = plan.hypergraph.aggregate_column->second;
        agg_col = rel.find_column(name);
        if (not agg_col)
            throw QueryError("unknown column '" + name + "' in relation " + binding.source + " (alias " +
                             binding.alias + ")");
    }
    const bool numeric = kind == AggregateKind::kSum or kind == AggregateKind::kAvg;

    // Pre-aggregate on x_l ∪ x_r, folding the aggregated attribute into the row annotation.
    KeyIndex rows(attrs.size(), rel.size());
    std::vector<Annotation> annots;
    std::vector<Value> key(attrs.size());
    for (std::size_t i = 0; i != rel.size(); ++i) {
        for (std::size_t c = 0; c != columns.size(); ++c)
            key[c] = rel.at(i, columns[c]);
        auto [id, inserted] = rows.insert(key);
        if (inserted)
            annots.emplace_back();
        Annotation one = Annotation::unit();
        if (agg_col) {
            const Value &v = rel.at(i, *agg_col);
            if (numeric) {
                if (not v.is_int())
                    throw QueryError(std::string(to_string(kind)) + " over non-integer column " +
                                     plan.hypergraph.aggregate_column->second);
                one.sum = v.as_int();
            } else {
                one.extreme = v;
            }
        }
        merge_into(annots[id], one, kind);
    }

    std::vector<uint32_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return compare_values(rows.key(a), rows.key(b)) < 0;
    });

    const auto l_pos = positions_of(split.x_l, attrs);
    const auto r_pos = positions_of(split.x_r, attrs);
    RelationNodes out(split.x_l.size(), split.x_r.size());
    std::vector<Value> l_key, r_key;
    for (auto id : order) {
        project(rows.key(id), l_pos, l_key);
        project(rows.key(id), r_pos, r_key);
        auto l = out.left.index.insert(l_key).first;
        auto rr = out.right.index.insert(r_key).first;
        out.intra.push_back({l, rr, annots[id].count, annots[id]});
    }
    return out;
}

/// Assigns global ids to one side in value order.
void number_side(SideNodes &side, std::uint32_t relation, Side which, NodeType type, int32_t slot, DataGraph &g)
{
    std::vector<uint32_t> order(side.index.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return compare_values(side.index.key(a), side.index.key(b)) < 0;
    });
    side.global.assign(order.size(), 0);
    for (auto local : order) {
        side.global[local] = static_cast<NodeId>(g.nodes.size());
        GraphNode node{relation, which, type, slot, 0, 0, static_cast<uint32_t>(g.node_values.size()),
                       static_cast<uint32_t>(side.index.arity())};
        auto key = side.index.key(local);
        g.node_values.insert(g.node_values.end(), key.begin(), key.end());
        g.nodes.push_back(node);
    }
}

uint32_t checked_multiplicity(uint64_t m)
{
    if (m > std::numeric_limits<uint32_t>::max())
        throw InternalError("edge multiplicity overflow");
    return static_cast<uint32_t>(m);
}

}

DataGraph build_graph(const QueryPlan &plan, const RelationMap &rels, const BuildOptions &options)
{
    DataGraph g;
    g.kind = plan.spec.aggregate.kind;
    g.slot_count = plan.slots.size();
    for (const auto &r : plan.hypergraph.relations)
        g.relation_names.push_back(r.alias);

    const std::size_t n_rel = plan.hypergraph.relations.size();
    std::vector<std::optional<RelationNodes>> per_rel(n_rel);
    for (auto r : plan.tree.bfs_order) {
        const auto &alias = plan.relation(r).alias;
        auto it = rels.find(alias);
        if (it == rels.end() or not it->second)
            throw QueryError("no data bound to relation alias '" + alias + "'");
        per_rel[r].emplace(load_relation(plan, r, *it->second, g.kind));
    }

    // Node numbering: relation by relation in BFS order, x_l before x_r.
    for (auto r : plan.tree.bfs_order) {
        const auto &split = plan.splits[r];
        auto &rn = *per_rel[r];
        const bool root = r == plan.tree.root;
        NodeType l_type = root ? NodeType::kSource
                        : split.branching_side == Side::kLeft ? NodeType::kBranching : NodeType::kIntermediate;
        NodeType r_type = split.slot ? NodeType::kGroup
                        : split.branching_side == Side::kRight ? NodeType::kBranching : NodeType::kIntermediate;
        const int32_t slot = split.slot ? static_cast<int32_t>(*split.slot) : -1;
        number_side(rn.left, static_cast<uint32_t>(r), Side::kLeft, l_type, -1, g);
        number_side(rn.right, static_cast<uint32_t>(r), Side::kRight, r_type, slot, g);
    }

    std::vector<PendingEdge> pending;
    const bool with_payload = g.kind != AggregateKind::kCountStar;
    for (auto r : plan.tree.bfs_order) {
        auto &rn = *per_rel[r];
        for (const auto &e : rn.intra)
            pending.push_back({rn.left.global[e.l], rn.right.global[e.r], false, e.multiplicity,
                               with_payload ? e.payload : Annotation{}});
    }

    // Join edges: parent's downward node -> child x_l node agreeing on the shared attributes.
    for (auto c : plan.tree.bfs_order) {
        auto p = plan.tree.parent[c];
        if (not p)
            continue;
        const auto &pv = plan.relation(*p).vertices;
        const auto &cv = plan.relation(c).vertices;
        std::vector<std::string> shared;
        std::set_intersection(pv.begin(), pv.end(), cv.begin(), cv.end(), std::back_inserter(shared));

        const Side side = downward_side(plan, *p);
        const auto &p_attrs = side == Side::kLeft ? plan.splits[*p].x_l : plan.splits[*p].x_r;
        auto &p_nodes = side == Side::kLeft ? per_rel[*p]->left : per_rel[*p]->right;
        auto &c_nodes = per_rel[c]->left;
        const auto p_pos = positions_of(shared, p_attrs);
        const auto c_pos = positions_of(shared, plan.splits[c].x_l);

        KeyIndex buckets_index(shared.size(), c_nodes.index.size());
        std::vector<std::vector<uint32_t>> buckets;
        std::vector<Value> key;
        for (uint32_t local = 0; local != c_nodes.index.size(); ++local) {
            project(c_nodes.index.key(local), c_pos, key);
            auto [b, inserted] = buckets_index.insert(key);
            if (inserted)
                buckets.emplace_back();
            buckets[b].push_back(local);
        }
        for (uint32_t local = 0; local != p_nodes.index.size(); ++local) {
            project(p_nodes.index.key(local), p_pos, key);
            auto b = buckets_index.find(key);
            if (not b)
                continue;
            for (auto child : buckets[*b])
                pending.push_back({p_nodes.global[local], c_nodes.global[child], true, 1,
                                   with_payload ? Annotation::unit() : Annotation{}});
        }
    }
    per_rel.clear();

    std::sort(pending.begin(), pending.end(), [](const PendingEdge &a, const PendingEdge &b) {
        return std::tie(a.source, a.join, a.target) < std::tie(b.source, b.join, b.target);
    });

    for (NodeId n = 0; n != g.nodes.size(); ++n) {
        if (g.nodes[n].type == NodeType::kSource)
            g.sources.push_back(n);
    }

    // Forward reachability from the sources; ids are topologically ordered.
    std::vector<bool> keep(g.nodes.size(), true);
    if (options.prune) {
        std::fill(keep.begin(), keep.end(), false);
        for (auto s : g.sources)
            keep[s] = true;
        for (const auto &e : pending) {
            if (keep[e.source])
                keep[e.target] = true;
        }
    }
    std::vector<NodeId> remap(g.nodes.size());
    std::vector<GraphNode> nodes;
    std::vector<Value> values;
    for (NodeId n = 0; n != g.nodes.size(); ++n) {
        if (not keep[n]) {
            ++g.stats.pruned_nodes;
            continue;
        }
        remap[n] = static_cast<NodeId>(nodes.size());
        GraphNode node = g.nodes[n];
        auto vals = g.values(n);
        node.values = static_cast<uint32_t>(values.size());
        values.insert(values.end(), vals.begin(), vals.end());
        nodes.push_back(node);
    }
    g.nodes = std::move(nodes);
    g.node_values = std::move(values);
    for (auto &s : g.sources)
        s = remap[s];

    // CSR.
    g.edges.reserve(pending.size());
    if (with_payload)
        g.payload.reserve(pending.size());
    for (const auto &e : pending) {
        if (not keep[e.source])
            continue;
        ++g.nodes[remap[e.source]].degree;
        g.edges.push_back({remap[e.target], checked_multiplicity(e.multiplicity)});
        if (with_payload)
            g.payload.push_back(e.payload);
        ++(e.join ? g.stats.join_edges : g.stats.intra_edges);
    }
    uint32_t offset = 0;
    for (auto &node : g.nodes) {
        node.offset = offset;
        offset += node.degree;
    }

    g.stats.nodes = g.nodes.size();
    g.stats.edges = g.edges.size();
    for (const auto &node : g.nodes) {
        ++g.stats.by_type[static_cast<std::size_t>(node.type)];
        if (node.arity == 0)
            ++g.stats.unit_nodes;
    }
    g.stats.resident_bytes = g.nodes.size() * sizeof(GraphNode) + g.node_values.size() * sizeof(Value) +
                             g.edges.size() * sizeof(GraphEdge) + g.payload.size() * sizeof(Annotation);
    return g;
}

void dump_graph(std::ostream &out, const DataGraph &g)
{
    for (NodeId n = 0; n != g.size(); ++n) {
        const auto edges = g.out_edges(n);
        for (std::size_t k = 0; k != edges.size(); ++k) {
            const auto &e = edges[k];
            out << g.label(n) << " -> " << g.label(e.target) << " [m=" << e.multiplicity << "] ("
                << to_string(g.nodes[n].type) << "->" << to_string(g.nodes[e.target].type) << ")\n";
        }
    }
}

uint64_t graph_checksum(const DataGraph &g)
{
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](uint64_t x) {
        for (int b = 0; b != 8; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto &n : g.nodes) {
        mix(n.relation);
        mix(static_cast<uint64_t>(n.side));
        mix(static_cast<uint64_t>(n.type));
        mix(static_cast<uint64_t>(n.slot));
        mix(n.offset);
        mix(n.degree);
        mix(n.values);
        mix(n.arity);
    }
    for (const auto &v : g.node_values)
        mix(v.hash());
    for (const auto &e : g.edges) {
        mix(e.target);
        mix(e.multiplicity);
    }
    for (const auto &p : g.payload) {
        mix(p.count);
        mix(static_cast<uint64_t>(p.sum));
        mix(p.extreme ? p.extreme->hash() : 0);
    }
    return h;
}

}
