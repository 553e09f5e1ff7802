#include <joinagg/traversal.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <functional>
#include <ostream>


namespace joinagg {

/*======================================================================================================================
 * PathTrie
 *====================================================================================================================*/

void PathTrie::clear()
{
    entries_.clear();
    entries_.push_back({0, 0, 0});
    index_.clear();
    ranks_.clear();
}

PathIndex PathTrie::extend(PathIndex parent, NodeId node)
{
    const uint64_t key = (static_cast<uint64_t>(parent) << 32) | node;
    auto [it, inserted] = index_.try_emplace(key, static_cast<PathIndex>(entries_.size()));
    if (inserted)
        entries_.push_back({parent, node, entries_[parent].length + 1});
    return it->second;
}

PathIndex PathTrie::ancestor(PathIndex p, uint32_t len) const
{
    while (entries_[p].length > len)
        p = entries_[p].parent;
    return p;
}

std::vector<NodeId> PathTrie::nodes(PathIndex p) const
{
    std::vector<NodeId> out(entries_[p].length);
    for (auto i = out.size(); i != 0; --i) {
        out[i - 1] = entries_[p].node;
        p = entries_[p].parent;
    }
    return out;
}

void PathTrie::compute_ranks()
{
    ranks_.assign(entries_.size(), 0);
    if (entries_.size() == 1)
        return;

    // Children grouped by parent and ordered by node id, then a preorder walk.
    std::vector<PathIndex> order(entries_.size() - 1);
    for (PathIndex i = 1; i != entries_.size(); ++i)
        order[i - 1] = i;
    std::sort(order.begin(), order.end(), [this](PathIndex a, PathIndex b) {
        return std::tie(entries_[a].parent, entries_[a].node) < std::tie(entries_[b].parent, entries_[b].node);
    });
    std::vector<uint32_t> first(entries_.size() + 1, 0);
    for (auto i : order)
        ++first[entries_[i].parent + 1];
    for (std::size_t i = 1; i != first.size(); ++i)
        first[i] += first[i - 1];

    uint32_t next_rank = 0;
    std::vector<PathIndex> stack{0};
    while (not stack.empty()) {
        auto p = stack.back();
        stack.pop_back();
        ranks_[p] = next_rank++;
        for (auto k = first[p + 1]; k != first[p]; --k)
            stack.push_back(order[k - 1]);
    }
}


/*======================================================================================================================
 * TraversalOutcome
 *====================================================================================================================*/

std::vector<CPair> TraversalOutcome::cpairs(NodeId n) const
{
    auto lo = std::lower_bound(hits.begin(), hits.end(), n, [](const GroupHit &h, NodeId x) { return h.node < x; });
    std::vector<CPair> out;
    for (; lo != hits.end() and lo->node == n; ++lo)
        out.push_back(lo->pair);
    return out;
}

bool TraversalOutcome::complete() const
{
    return std::all_of(reached_slots.begin(), reached_slots.end(), [](uint8_t r) { return r != 0; });
}


/*======================================================================================================================
 * Traverser
 *====================================================================================================================*/

namespace {

uint64_t pack(NodeId n, PathIndex p) { return (static_cast<uint64_t>(n) << 32) | p; }

}

Traverser::Traverser(const DataGraph &g, TraversalOptions options)
    : g_(g)
    , options_(options)
{ }

Annotation Traverser::step(const Annotation &c, std::size_t edge) const
{
    if (g_.payload.empty())
        return {c.count * g_.edges[edge].multiplicity, 0, std::nullopt};
    return product(c, g_.payload[edge]);
}

void Traverser::record_group(NodeId n, PathIndex p, const Annotation &c)
{
    auto [it, inserted] = hit_index_.try_emplace(pack(n, p), static_cast<uint32_t>(out_.hits.size()));
    if (inserted)
        out_.hits.push_back({n, {p, c}});
    else
        merge_into(out_.hits[it->second].pair.c, c, g_.kind);
}

void Traverser::add_path_count(PathIndex p, const Annotation &c)
{
    if (out_.path_counts.size() <= p) {
        out_.path_counts.resize(p + 1);
        recorded_.resize(p + 1, 0);
    }
    merge_into(out_.path_counts[p], c, g_.kind);
}

void Traverser::trace(NodeId n, PathIndex p, const Annotation &c) const
{
    auto &os = *options_.trace;
    os << "visit(" << g_.label(n) << ", [";
    auto path = out_.paths.nodes(p);
    for (std::size_t i = 0; i != path.size(); ++i)
        os << (i ? ", " : "") << g_.label(path[i]);
    os << "], " << c.count;
    if (g_.kind == AggregateKind::kSum or g_.kind == AggregateKind::kAvg)
        os << " sum=" << c.sum;
    if (c.extreme)
        os << " value=" << c.extreme->to_string();
    os << ")\n";
}

const TraversalOutcome & Traverser::run(NodeId s)
{
    if (s >= g_.size() or g_.nodes[s].type != NodeType::kSource)
        throw InternalError("traversal must start at a source node");
    out_.source = s;
    out_.paths.clear();
    out_.path_counts.assign(1, Annotation::unit());
    out_.hits.clear();
    out_.reached_slots.assign(g_.slot_count, 0);
    out_.visits = 0;
    recorded_.assign(1, 1);
    hit_index_.clear();

    if (options_.strategy == TraversalStrategy::kLayered)
        run_layered();
    else
        run_depth_first();
    finish();
    return out_;
}

void Traverser::run_layered()
{
    pending_index_.clear();
    pending_.clear();
    heap_.clear();
    const std::greater<uint64_t> after;

    auto enqueue = [&](NodeId n, PathIndex p, const Annotation &a) {
        auto [it, inserted] = pending_index_.try_emplace(pack(n, p), static_cast<uint32_t>(pending_.size()));
        if (inserted) {
            pending_.push_back(a);
            heap_.push_back(pack(n, p));
            std::push_heap(heap_.begin(), heap_.end(), after);
        } else {
            merge_into(pending_[it->second], a, g_.kind);
        }
    };

    enqueue(out_.source, 0, Annotation::unit());
    while (not heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), after);
        const uint64_t key = heap_.back();
        heap_.pop_back();
        const NodeId n = static_cast<NodeId>(key >> 32);
        const PathIndex p = static_cast<PathIndex>(key & 0xffffffffu);
        const Annotation c = pending_[pending_index_.at(key)];
        ++out_.visits;
        if (options_.trace)
            trace(n, p, c);

        if (g_.is_group(n)) {
            record_group(n, p, c);
            continue;
        }
        const auto &node = g_.nodes[n];
        for (std::size_t e = node.offset; e != node.offset + node.degree; ++e) {
            const NodeId t = g_.edges[e].target;
            if (t <= n)
                throw InternalError("cycle in data graph");
            Annotation contribution = step(c, e);
            if (g_.is_branching(t)) {
                const PathIndex q = out_.paths.extend(p, t);
                const bool fresh = q >= recorded_.size() or not recorded_[q];
                add_path_count(q, contribution);
                if (fresh) {
                    recorded_[q] = 1;
                    enqueue(t, q, Annotation::unit());
                }
            } else {
                enqueue(t, p, contribution);
            }
        }
    }
}

void Traverser::run_depth_first()
{
    struct Frame
    {
        NodeId node;
        PathIndex path;
        Annotation c;
        bool entering;      ///< arriving at a branching node under a new path-id
        bool shadow;        ///< re-exploration of an already recorded path-id
    };
    std::vector<Frame> stack;
    stack.push_back({out_.source, 0, Annotation::unit(), false, false});

    while (not stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.entering) {
            if (not f.shadow) {
                const bool fresh = f.path >= recorded_.size() or not recorded_[f.path];
                add_path_count(f.path, f.c);
                if (fresh)
                    recorded_[f.path] = 1;
                else if (options_.path_caching)
                    continue;
                else
                    f.shadow = true;
            }
            f.c = Annotation::unit();
        }
        ++out_.visits;
        if (options_.trace and not f.shadow)
            trace(f.node, f.path, f.c);

        if (g_.is_group(f.node)) {
            if (not f.shadow)
                record_group(f.node, f.path, f.c);
            continue;
        }
        const auto &node = g_.nodes[f.node];
        for (std::size_t e = node.offset + node.degree; e-- != node.offset; ) {
            const NodeId t = g_.edges[e].target;
            if (t <= f.node)
                throw InternalError("cycle in data graph");
            if (g_.is_branching(t))
                stack.push_back({t, out_.paths.extend(f.path, t), step(f.c, e), true, f.shadow});
            else
                stack.push_back({t, f.path, step(f.c, e), false, f.shadow});
        }
    }
}

void Traverser::finish()
{
    auto &paths = out_.paths;
    out_.path_counts.resize(paths.size());
    paths.compute_ranks();
    std::sort(out_.hits.begin(), out_.hits.end(), [&](const GroupHit &a, const GroupHit &b) {
        return a.node != b.node ? a.node < b.node : paths.rank(a.pair.path) < paths.rank(b.pair.path);
    });
    for (const auto &h : out_.hits)
        out_.reached_slots[g_.nodes[h.node].slot] = 1;
}

TraversalOutcome traverse_from_source(const DataGraph &g, NodeId s, const TraversalOptions &options)
{
    Traverser t(g, options);
    return t.run(s);
}

CanonicalOutcome canonical(const TraversalOutcome &o)
{
    CanonicalOutcome c;
    for (const auto &h : o.hits)
        c.lists[h.node].emplace_back(o.paths.nodes(h.pair.path), h.pair.c);
    for (PathIndex p = 1; p < o.path_counts.size(); ++p) {
        if (o.path_counts[p].count != 0)
            c.path_counts[o.paths.nodes(p)] = o.path_counts[p];
    }
    c.reached_slots = o.reached_slots;
    return c;
}

}
