#pragma once

#include <joinagg/data_graph.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace joinagg {

/// Index of an interned path-id; 0 is the empty path.
using PathIndex = uint32_t;

/** Interned path-ids (sequences of branching nodes) stored as a trie.
 *
 * Ranks order paths lexicographically by node id with every prefix before its extensions, so all paths sharing a
 * prefix form one contiguous range. */
class PathTrie
{
    public:
    PathTrie() { clear(); }

    void clear();

    /// Path `parent ⧺ [node]`, interned on first use.
    PathIndex extend(PathIndex parent, NodeId node);

    std::size_t size() const { return entries_.size(); }
    uint32_t length(PathIndex p) const { return entries_[p].length; }
    PathIndex parent(PathIndex p) const { return entries_[p].parent; }
    NodeId last(PathIndex p) const { return entries_[p].node; }

    /// Prefix of `p` with `len` elements (`len` ≤ length(p)).
    PathIndex ancestor(PathIndex p, uint32_t len) const;

    std::vector<NodeId> nodes(PathIndex p) const;

    /// Assigns ranks; required before rank().
    void compute_ranks();
    uint32_t rank(PathIndex p) const { return ranks_[p]; }

    private:
    struct Entry
    {
        PathIndex parent;
        NodeId node;
        uint32_t length;
    };

    std::vector<Entry> entries_;
    std::unordered_map<uint64_t, PathIndex> index_;
    std::vector<uint32_t> ranks_;
};

/// A c-pair `(p, c)` recorded at a group node.
struct CPair
{
    PathIndex path;
    Annotation c;
};

struct GroupHit
{
    NodeId node;
    CPair pair;
};

/** Everything Stage 2 learns from one source. */
struct TraversalOutcome
{
    NodeId source = 0;
    PathTrie paths;
    std::vector<Annotation> path_counts;    ///< C_p by PathIndex; C_[] = unit
    std::vector<GroupHit> hits;             ///< sorted by node, then path rank; one entry per (node, path)
    std::vector<uint8_t> reached_slots;
    uint64_t visits = 0;

    /// c-pair list l_n of a group node, sorted by path-id.
    std::vector<CPair> cpairs(NodeId n) const;

    /// Every slot has at least one reached node.
    bool complete() const;
};

enum class TraversalStrategy
{
    kLayered,       ///< per (node, path-id) accumulation in topological node order
    kDepthFirst,    ///< the recursive visit() with an explicit stack
};

struct TraversalOptions
{
    TraversalStrategy strategy = TraversalStrategy::kLayered;
    bool path_caching = true;       ///< depth-first only: off re-explores repeated path-ids without recording
    std::ostream *trace = nullptr;  ///< emits `visit(node, path, c)` lines
};

/** Reusable Stage 2 worker; owns scratch space so repeated runs do not reallocate. */
class Traverser
{
    public:
    explicit Traverser(const DataGraph &g, TraversalOptions options = {});

    /// Traverses from source `s`; the returned reference is valid until the next run.
    const TraversalOutcome & run(NodeId s);

    private:
    void record_group(NodeId n, PathIndex p, const Annotation &c);
    void add_path_count(PathIndex p, const Annotation &c);
    Annotation step(const Annotation &c, std::size_t edge) const;
    void trace(NodeId n, PathIndex p, const Annotation &c) const;
    void run_layered();
    void run_depth_first();
    void finish();

    const DataGraph &g_;
    TraversalOptions options_;
    TraversalOutcome out_;
    std::vector<uint8_t> recorded_;                         ///< per PathIndex
    std::unordered_map<uint64_t, uint32_t> hit_index_;      ///< (node, path) -> hits index
    std::unordered_map<uint64_t, uint32_t> pending_index_;  ///< layered: (node, path) -> pending index
    std::vector<Annotation> pending_;
    std::vector<uint64_t> heap_;
};

TraversalOutcome traverse_from_source(const DataGraph &g, NodeId s, const TraversalOptions &options = {});

/// Source nodes in value order.
inline std::span<const NodeId> all_sources(const DataGraph &g) { return g.sources; }

/** Outcome with path-ids spelled out, for comparisons independent of interning order. */
struct CanonicalOutcome
{
    std::map<NodeId, std::vector<std::pair<std::vector<NodeId>, Annotation>>> lists;
    std::map<std::vector<NodeId>, Annotation> path_counts;
    std::vector<uint8_t> reached_slots;

    friend bool operator==(const CanonicalOutcome&, const CanonicalOutcome&) = default;
};

CanonicalOutcome canonical(const TraversalOutcome &o);

}
