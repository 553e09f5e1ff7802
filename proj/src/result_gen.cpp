#include <joinagg/result_gen.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <queue>


namespace joinagg {

namespace {

bool contains(const boost::container::small_vector<PathIndex, 4> &v, PathIndex p)
{
    return std::binary_search(v.begin(), v.end(), p);
}

void insert_sorted(boost::container::small_vector<PathIndex, 4> &v, PathIndex p)
{
    v.insert(std::lower_bound(v.begin(), v.end(), p), p);
}

/// Multiplies C_p into `f` unless p is empty or already consumed.
void consume(FTuple &f, PathIndex p, const TraversalOutcome &o)
{
    if (p == 0 or contains(f.consumed, p))
        return;
    f.annotation = product(f.annotation, o.path_counts[p]);
    insert_sorted(f.consumed, p);
}

FTuple combine_pair(const FTuple &a, const FTuple &b, uint32_t depth, const TraversalOutcome &o)
{
    FTuple out;
    out.nodes = a.nodes;
    for (std::size_t s = 0; s != b.nodes.size(); ++s) {
        if (b.nodes[s] == kNoNode)
            continue;
        if (out.nodes[s] != kNoNode)
            throw InternalError("two group nodes of one slot in a joined tuple");
        out.nodes[s] = b.nodes[s];
    }
    out.annotation = product(a.annotation, b.annotation);
    std::set_union(a.consumed.begin(), a.consumed.end(), b.consumed.begin(), b.consumed.end(),
                   std::back_inserter(out.consumed));
    consume(out, a.rep, o);
    consume(out, b.rep, o);
    out.rep = o.paths.ancestor(a.rep, depth);
    out.constituents = a.constituents;
    out.constituents.insert(out.constituents.end(), b.constituents.begin(), b.constituents.end());
    return out;
}

/// Sort-merge join of two lists on the length-`depth` prefix of their representatives.
FList join_pair(const FList &a, const FList &b, uint32_t depth, const TraversalOutcome &o)
{
    FList out;
    const auto &paths = o.paths;
    auto key = [&](const FTuple &f) { return paths.rank(paths.ancestor(f.rep, depth)); };
    std::size_t i = 0, j = 0;
    while (i != a.size() and j != b.size()) {
        const auto ka = key(a[i]);
        const auto kb = key(b[j]);
        if (ka < kb) { ++i; continue; }
        if (kb < ka) { ++j; continue; }
        std::size_t i_end = i, j_end = j;
        while (i_end != a.size() and key(a[i_end]) == ka) ++i_end;
        while (j_end != b.size() and key(b[j_end]) == kb) ++j_end;
        for (std::size_t x = i; x != i_end; ++x)
            for (std::size_t y = j; y != j_end; ++y)
                out.push_back(combine_pair(a[x], b[y], depth, o));
        i = i_end;
        j = j_end;
    }
    return out;
}

}

std::vector<std::vector<NodeId>> bucketize(const TraversalOutcome &o, const DataGraph &g)
{
    std::vector<std::vector<NodeId>> buckets(g.slot_count);
    for (const auto &h : o.hits) {
        auto &b = buckets[g.nodes[h.node].slot];
        if (b.empty() or b.back() != h.node)
            b.push_back(h.node);
    }
    return buckets;
}

FList merge_bucket(const TraversalOutcome &o, const DataGraph &g, const std::vector<NodeId> &bucket)
{
    struct Cursor
    {
        uint32_t rank;
        NodeId node;
        std::size_t pos;
        std::size_t end;

        bool operator>(const Cursor &c) const { return std::tie(rank, node) > std::tie(c.rank, c.node); }
    };
    std::priority_queue<Cursor, std::vector<Cursor>, std::greater<Cursor>> heap;
    for (auto n : bucket) {
        auto lo = std::lower_bound(o.hits.begin(), o.hits.end(), n,
                                   [](const GroupHit &h, NodeId x) { return h.node < x; });
        auto hi = lo;
        while (hi != o.hits.end() and hi->node == n) ++hi;
        if (lo != hi)
            heap.push({o.paths.rank(lo->pair.path), n, static_cast<std::size_t>(lo - o.hits.begin()),
                       static_cast<std::size_t>(hi - o.hits.begin())});
    }

    FList out;
    while (not heap.empty()) {
        Cursor c = heap.top();
        heap.pop();
        const auto &hit = o.hits[c.pos];
        FTuple f;
        f.nodes.assign(g.slot_count, kNoNode);
        f.nodes[g.nodes[hit.node].slot] = hit.node;
        f.rep = hit.pair.path;
        f.annotation = hit.pair.c;
        f.constituents.push_back(hit.pair.path);
        out.push_back(std::move(f));
        if (++c.pos != c.end) {
            c.rank = o.paths.rank(o.hits[c.pos].pair.path);
            heap.push(c);
        }
    }
    return out;
}

FList prefix_join(std::vector<FList> lists, const TraversalOutcome &o, std::optional<uint32_t> depth)
{
    if (lists.empty())
        return {};
    for (const auto &l : lists) {
        if (l.empty())
            return {};
    }
    std::stable_sort(lists.begin(), lists.end(), [&](const FList &a, const FList &b) {
        const auto la = o.paths.length(a.front().rep), lb = o.paths.length(b.front().rep);
        return la != lb ? la > lb : a.size() < b.size();
    });
    FList acc = std::move(lists.front());
    for (std::size_t i = 1; i != lists.size() and not acc.empty(); ++i) {
        const uint32_t k = depth ? *depth : std::min(o.paths.length(acc.front().rep),
                                                     o.paths.length(lists[i].front().rep));
        acc = join_pair(acc, lists[i], k, o);
    }
    return acc;
}

void finalize_tuple(FTuple &f, const TraversalOutcome &o, AggregateKind)
{
    for (auto p : f.constituents) {
        for (; p != 0; p = o.paths.parent(p))
            consume(f, p, o);
    }
}


/*======================================================================================================================
 * ResultGenerator
 *====================================================================================================================*/

ResultGenerator::ResultGenerator(const QueryPlan &plan, const DataGraph &g)
    : plan_(plan)
    , g_(g)
{ }

FList ResultGenerator::combine(std::size_t relation, std::vector<FList> &slot_lists, const TraversalOutcome &o,
                               std::size_t &live, std::size_t &peak) const
{
    std::vector<FList> gathered;
    for (auto c : plan_.tree.children[relation]) {
        auto l = combine(c, slot_lists, o, live, peak);
        if (l.empty())
            return {};
        gathered.push_back(std::move(l));
    }
    if (auto slot = plan_.splits[relation].slot)
        gathered.push_back(std::move(slot_lists[*slot]));
    if (gathered.empty())
        throw InternalError("relation " + plan_.relation(relation).alias + " contributes no tuples");
    if (gathered.size() == 1)
        return std::move(gathered.front());

    auto joined = prefix_join(std::move(gathered), o, plan_.splits[relation].depth);
    live += joined.size();
    peak = std::max(peak, live);
    return joined;
}

FList ResultGenerator::joined(const TraversalOutcome &o, std::size_t *peak) const
{
    if (not o.complete())
        return {};
    auto buckets = bucketize(o, g_);
    std::vector<FList> slot_lists;
    std::size_t live = 0;
    for (const auto &b : buckets) {
        slot_lists.push_back(merge_bucket(o, g_, b));
        live += slot_lists.back().size();
    }
    std::size_t top = live;
    auto out = combine(plan_.tree.root, slot_lists, o, live, top);
    for (auto &f : out)
        finalize_tuple(f, o, g_.kind);
    if (peak)
        *peak = top;
    return out;
}

std::size_t ResultGenerator::run(const TraversalOutcome &o, std::vector<GroupResult> &out) const
{
    std::size_t peak = 0;
    auto tuples = joined(o, &peak);
    std::sort(tuples.begin(), tuples.end(), [](const FTuple &a, const FTuple &b) {
        return std::lexicographical_compare(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end());
    });

    const auto source_values = g_.values(o.source);
    for (std::size_t i = 0; i != tuples.size(); ) {
        Annotation total = tuples[i].annotation;
        std::size_t j = i + 1;
        for (; j != tuples.size() and tuples[j].nodes == tuples[i].nodes; ++j)
            merge_into(total, tuples[j].annotation, g_.kind);
        if (total.count != 0) {
            GroupResult r;
            r.group.reserve(plan_.output.size());
            for (const auto &col : plan_.output) {
                const auto vals = col.slot ? g_.values(tuples[i].nodes[*col.slot]) : source_values;
                r.group.push_back(vals[col.position]);
            }
            r.value = finalize(total, g_.kind);
            r.count = total.count;
            out.push_back(std::move(r));
        }
        i = j;
    }
    return peak;
}

}
