#include <joinagg/query_model.hpp>

#include <joinagg/errors.hpp>

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>


namespace joinagg {

namespace {

/// Union-find over dense indices.
class DisjointSets
{
    public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

    private:
    std::vector<std::size_t> parent_;
};

std::vector<std::string> set_intersection(const std::vector<std::string> &a, const std::vector<std::string> &b)
{
    std::vector<std::string> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> set_union(const std::vector<std::string> &a, const std::vector<std::string> &b)
{
    std::vector<std::string> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> set_difference(const std::vector<std::string> &a, const std::vector<std::string> &b)
{
    std::vector<std::string> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string braces(const std::vector<std::string> &v)
{
    std::string s = "{";
    for (std::size_t i = 0; i != v.size(); ++i)
        s += (i ? ", " : "") + v[i];
    return s + "}";
}

}

std::size_t QueryHypergraph::relation_index(const std::string &alias) const
{
    for (std::size_t i = 0; i != relations.size(); ++i) {
        if (relations[i].alias == alias)
            return i;
    }
    throw QueryError("unknown alias '" + alias + "'");
}

std::vector<std::set<std::string>> QueryHypergraph::hyperedges() const
{
    std::vector<std::set<std::string>> edges;
    for (const auto &r : relations)
        edges.emplace_back(r.vertices.begin(), r.vertices.end());
    return edges;
}


/*======================================================================================================================
 * Hypergraph
 *====================================================================================================================*/

QueryHypergraph build_hypergraph(const QuerySpec &q)
{
    QueryHypergraph h;

    // Equality classes of joined attributes.
    std::map<AttributeRef, std::size_t> ids;
    std::vector<AttributeRef> refs;
    auto id_of = [&](const AttributeRef &a) {
        auto [it, inserted] = ids.emplace(a, refs.size());
        if (inserted)
            refs.push_back(a);
        return it->second;
    };
    for (const auto &j : q.joins) {
        id_of(j.left);
        id_of(j.right);
    }
    DisjointSets sets(refs.size());
    for (const auto &j : q.joins)
        sets.unite(ids.at(j.left), ids.at(j.right));

    std::map<std::size_t, std::vector<AttributeRef>> classes;
    for (const auto &[ref, id] : ids)
        classes[sets.find(id)].push_back(ref); // map iteration keeps members sorted
    for (const auto &[_, members] : classes) {
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (members[i].alias == members[i - 1].alias)
                throw QueryError("join condition equates two columns of relation " + members[i].alias + " (" +
                                 members[i - 1].to_string() + " = " + members[i].to_string() + ")");
        }
    }

    // Name candidates: join classes first, then group attributes.
    struct Candidate
    {
        std::string name;
        std::string qualified;
    };
    std::vector<Candidate> candidates;
    std::vector<const std::vector<AttributeRef>*> class_members;
    for (const auto &[_, members] : classes) {
        candidates.push_back({members.front().column, members.front().to_string()});
        class_members.push_back(&members);
    }
    for (const auto &g : q.group_by)
        candidates.push_back({g.column, g.to_string()});

    std::map<std::string, std::size_t> uses;
    for (const auto &c : candidates)
        ++uses[c.name];
    std::vector<std::string> names;
    for (const auto &c : candidates)
        names.push_back(uses[c.name] > 1 ? c.qualified : c.name);
    std::set<std::string> taken;
    for (auto &n : names) {
        std::string base = n;
        for (int k = 2; not taken.insert(n).second; ++k)
            n = base + "#" + std::to_string(k);
    }

    for (const auto &r : q.relations)
        h.relations.push_back({r.alias, r.source, {}, {}, {}});
    auto binding = [&](const std::string &alias) -> RelationBinding& {
        return h.relations[h.relation_index(alias)];
    };

    for (std::size_t c = 0; c != class_members.size(); ++c) {
        h.join_vertices.insert(names[c]);
        for (const auto &m : *class_members[c]) {
            auto &b = binding(m.alias);
            b.vertices.push_back(names[c]);
            b.vertex_column[names[c]] = m.column;
        }
    }
    for (std::size_t g = 0; g != q.group_by.size(); ++g) {
        const auto &name = names[class_members.size() + g];
        auto &b = binding(q.group_by[g].alias);
        b.vertices.push_back(name);
        b.group_vertices.push_back(name);
        b.vertex_column[name] = q.group_by[g].column;
        h.group_vertices.insert(name);
        h.group_by_vertices.push_back(name);
    }

    std::set<std::string> all;
    for (auto &b : h.relations) {
        std::sort(b.vertices.begin(), b.vertices.end());
        std::sort(b.group_vertices.begin(), b.group_vertices.end());
        all.insert(b.vertices.begin(), b.vertices.end());
    }
    h.vertices.assign(all.begin(), all.end());

    if (q.aggregate.attribute)
        h.aggregate_column.emplace(h.relation_index(q.aggregate.attribute->alias), q.aggregate.attribute->column);
    return h;
}

bool check_acyclic(const std::vector<std::set<std::string>> &input)
{
    std::vector<std::set<std::string>> edges = input;
    for (bool changed = true; changed; ) {
        changed = false;

        std::map<std::string, std::size_t> occurrences;
        for (const auto &e : edges)
            for (const auto &v : e)
                ++occurrences[v];
        for (auto &e : edges) {
            for (auto it = e.begin(); it != e.end(); ) {
                if (occurrences[*it] == 1) {
                    it = e.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }

        for (std::size_t i = 0; i != edges.size() and edges.size() > 1; ++i) {
            for (std::size_t j = 0; j != edges.size(); ++j) {
                if (i != j and std::includes(edges[j].begin(), edges[j].end(), edges[i].begin(), edges[i].end())) {
                    edges.erase(edges.begin() + i);
                    changed = true;
                    --i;
                    break;
                }
            }
        }
    }
    return edges.size() <= 1;
}

void validate_query(const QuerySpec &q)
{
    if (q.relations.empty())
        throw QueryError("query has no relations");
    std::set<std::string> aliases;
    for (const auto &r : q.relations) {
        if (r.alias.empty() or r.source.empty())
            throw QueryError("relation with empty name or alias");
        if (not aliases.insert(r.alias).second)
            throw QueryError("duplicate alias '" + r.alias + "'");
    }
    auto check_ref = [&](const AttributeRef &a) {
        if (a.column.empty())
            throw QueryError("empty column name in " + a.to_string());
        if (not aliases.contains(a.alias))
            throw QueryError("unknown alias '" + a.alias + "' in " + a.to_string());
    };
    for (const auto &j : q.joins) {
        check_ref(j.left);
        check_ref(j.right);
    }
    if (q.group_by.empty())
        throw QueryError("query needs at least one GROUP BY attribute");
    std::set<AttributeRef> groups;
    for (const auto &g : q.group_by) {
        check_ref(g);
        if (not groups.insert(g).second)
            throw QueryError("duplicate GROUP BY attribute " + g.to_string());
    }
    if ((q.aggregate.kind == AggregateKind::kCountStar) != (not q.aggregate.attribute))
        throw QueryError("aggregate " + std::string(to_string(q.aggregate.kind)) + " has a malformed argument");
    if (q.aggregate.attribute)
        check_ref(*q.aggregate.attribute);

    auto h = build_hypergraph(q);
    DisjointSets components(h.relations.size());
    std::map<std::string, std::size_t> first_owner;
    for (std::size_t r = 0; r != h.relations.size(); ++r) {
        for (const auto &v : h.relations[r].vertices) {
            auto [it, inserted] = first_owner.emplace(v, r);
            if (not inserted)
                components.unite(it->second, r);
        }
    }
    for (std::size_t r = 0; r != h.relations.size(); ++r) {
        if (components.find(r) != components.find(0))
            throw QueryError("disconnected join graph: relation " + h.relations[r].alias +
                             " is not joined with " + h.relations[0].alias);
    }
    if (not check_acyclic(h))
        throw QueryError("cyclic query unsupported");
}


/*======================================================================================================================
 * Decomposition
 *====================================================================================================================*/

bool has_running_intersection(const QueryHypergraph &h, const DecompositionTree &t)
{
    for (const auto &v : h.vertices) {
        std::size_t holders = 0, attached = 0;
        for (std::size_t r = 0; r != h.relations.size(); ++r) {
            const auto &verts = h.relations[r].vertices;
            if (not std::binary_search(verts.begin(), verts.end(), v))
                continue;
            ++holders;
            if (auto p = t.parent[r]) {
                const auto &pv = h.relations[*p].vertices;
                if (std::binary_search(pv.begin(), pv.end(), v))
                    ++attached;
            }
        }
        if (holders - attached != 1)
            return false;
    }
    return true;
}

namespace {

std::size_t shared_count(const RelationBinding &a, const RelationBinding &b)
{
    return set_intersection(a.vertices, b.vertices).size();
}

void finish_tree(const QueryHypergraph &h, DecompositionTree &t)
{
    const std::size_t n = h.relations.size();
    t.children.assign(n, {});
    for (std::size_t r = 0; r != n; ++r) {
        if (t.parent[r])
            t.children[*t.parent[r]].push_back(r);
    }
    for (auto &c : t.children) {
        std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
            return h.relations[a].alias < h.relations[b].alias;
        });
    }
    t.bfs_order.clear();
    std::deque<std::size_t> queue{t.root};
    while (not queue.empty()) {
        auto r = queue.front();
        queue.pop_front();
        t.bfs_order.push_back(r);
        queue.insert(queue.end(), t.children[r].begin(), t.children[r].end());
    }
    t.bfs_index.assign(n, 0);
    for (std::size_t i = 0; i != n; ++i)
        t.bfs_index[t.bfs_order[i]] = i;
}

}

DecompositionTree build_decomposition(const QueryHypergraph &h, const std::optional<std::string> &root)
{
    const std::size_t n = h.relations.size();
    DecompositionTree t;
    t.parent.assign(n, std::nullopt);

    if (root) {
        t.root = h.relation_index(*root);
        if (h.relations[t.root].group_vertices.empty())
            throw QueryError("root '" + *root + "' is not a group relation");
    } else {
        std::optional<std::size_t> best;
        for (std::size_t r = 0; r != n; ++r) {
            if (not h.relations[r].group_vertices.empty() and
                (not best or h.relations[r].alias < h.relations[*best].alias))
                best = r;
        }
        if (not best)
            throw QueryError("query has no group relation");
        t.root = *best;
    }

    std::vector<std::size_t> by_alias(n);
    std::iota(by_alias.begin(), by_alias.end(), 0);
    std::sort(by_alias.begin(), by_alias.end(), [&](std::size_t a, std::size_t b) {
        return h.relations[a].alias < h.relations[b].alias;
    });

    // Breadth-first discovery over shared-attribute adjacency.
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{t.root};
    seen[t.root] = true;
    while (not queue.empty()) {
        auto r = queue.front();
        queue.pop_front();
        for (auto c : by_alias) {
            if (not seen[c] and shared_count(h.relations[r], h.relations[c]) > 0) {
                seen[c] = true;
                t.parent[c] = r;
                queue.push_back(c);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw QueryError("disconnected join graph");
    finish_tree(h, t);
    if (has_running_intersection(h, t))
        return t;

    // Maximum-weight spanning tree (Prim from the root); a join tree exists for every acyclic query.
    t.spanning_tree_fallback = true;
    t.parent.assign(n, std::nullopt);
    std::vector<bool> in_tree(n, false);
    std::vector<std::size_t> order{t.root};
    in_tree[t.root] = true;
    while (order.size() != n) {
        std::size_t best_w = 0, best_p = 0, best_c = 0;
        bool found = false;
        for (auto p : order) {
            for (auto c : by_alias) {
                if (in_tree[c])
                    continue;
                auto w = shared_count(h.relations[p], h.relations[c]);
                if (w > best_w) {
                    best_w = w; best_p = p; best_c = c;
                    found = true;
                }
            }
        }
        if (not found)
            throw QueryError("disconnected join graph");
        t.parent[best_c] = best_p;
        in_tree[best_c] = true;
        order.push_back(best_c);
    }
    finish_tree(h, t);
    if (not has_running_intersection(h, t))
        throw QueryError("cyclic query unsupported");
    return t;
}


/*======================================================================================================================
 * Classification and splits
 *====================================================================================================================*/

std::string type_names(unsigned types)
{
    static const std::pair<RelationType, const char*> names[] = {
        {kSource, "SOURCE"}, {kGroup, "GROUP"}, {kBranching, "BRANCHING"}, {kIntermediate, "INTERMEDIATE"},
        {kTerminal, "TERMINAL"},
    };
    std::string out;
    for (auto [t, name] : names) {
        if (types & t)
            out += (out.empty() ? "" : ", ") + std::string(name);
    }
    return out;
}

std::vector<RelationSplit> classify_and_split(const QueryHypergraph &h, const DecompositionTree &t)
{
    std::vector<RelationSplit> splits(h.relations.size());
    for (auto r : t.bfs_order) {
        const auto &rel = h.relations[r];
        auto &s = splits[r];
        const bool root = r == t.root;
        const bool group = not rel.group_vertices.empty();
        const bool leaf = t.is_leaf(r);

        if (root) s.types |= kSource;
        if (group) s.types |= kGroup;
        if (t.children[r].size() > 1 or (not root and not leaf and group)) s.types |= kBranching;
        if (not root and not group and t.children[r].size() == 1) s.types |= kIntermediate;
        if (leaf and (root or not group)) s.types |= kTerminal;

        std::vector<std::string> downward;
        for (auto c : t.children[r])
            downward = set_union(downward, set_intersection(rel.vertices, h.relations[c].vertices));

        if (root) {
            s.x_l = rel.group_vertices;
            s.x_r = downward;
        } else if (group) {
            s.x_r = rel.group_vertices;
            s.x_l = set_difference(rel.vertices, rel.group_vertices);
        } else {
            s.x_l = set_intersection(rel.vertices, h.relations[*t.parent[r]].vertices);
            s.x_r = downward;
        }
        if (not root and s.x_l.empty())
            throw InternalError("relation " + rel.alias + " shares no attribute with its parent");

        if (s.has(kBranching))
            s.branching_side = (not root and group) ? Side::kLeft : Side::kRight;
        s.depth = (root ? 0 : splits[*t.parent[r]].depth) + (s.has(kBranching) ? 1 : 0);
    }
    return splits;
}

QueryPlan plan_query(const QuerySpec &q, const std::optional<std::string> &root)
{
    validate_query(q);
    QueryPlan plan;
    plan.spec = q;
    plan.hypergraph = build_hypergraph(q);
    plan.tree = build_decomposition(plan.hypergraph, root);
    plan.splits = classify_and_split(plan.hypergraph, plan.tree);

    for (auto r : plan.tree.bfs_order) {
        auto &s = plan.splits[r];
        const bool slot = (r != plan.tree.root and s.has(kGroup)) or s.has(kTerminal);
        if (not slot)
            continue;
        s.slot = plan.slots.size();
        plan.slots.push_back({r, s.has(kTerminal), s.depth});
    }

    for (const auto &v : plan.hypergraph.group_by_vertices) {
        for (std::size_t r = 0; r != plan.hypergraph.relations.size(); ++r) {
            const auto &gv = plan.hypergraph.relations[r].group_vertices;
            if (not std::binary_search(gv.begin(), gv.end(), v))
                continue;
            const auto &s = plan.splits[r];
            if (r == plan.tree.root) {
                auto pos = std::lower_bound(s.x_l.begin(), s.x_l.end(), v) - s.x_l.begin();
                plan.output.push_back({std::nullopt, static_cast<std::size_t>(pos)});
            } else {
                auto pos = std::lower_bound(s.x_r.begin(), s.x_r.end(), v) - s.x_r.begin();
                plan.output.push_back({s.slot, static_cast<std::size_t>(pos)});
            }
        }
    }
    return plan;
}


/*======================================================================================================================
 * Explain
 *====================================================================================================================*/

std::string explain_text(const QueryPlan &plan)
{
    const auto &h = plan.hypergraph;
    std::ostringstream out;
    out << "query: " << to_sql(plan.spec) << '\n';
    out << "hypergraph:\n";
    out << "  vertices: " << braces(h.vertices) << '\n';
    for (const auto &r : h.relations)
        out << "  e_" << r.alias << " = " << braces(r.vertices) << '\n';
    out << "decomposition (root " << h.relations[plan.tree.root].alias
        << (plan.tree.spanning_tree_fallback ? ", spanning-tree fallback" : "") << "):\n";

    auto print = [&](auto &&self, std::size_t r, std::size_t indent) -> void {
        const auto &rel = h.relations[r];
        const auto &s = plan.splits[r];
        out << std::string(indent, ' ') << rel.alias;
        if (rel.source != rel.alias)
            out << " (" << rel.source << ")";
        out << "  [" << type_names(s.types) << "]  x_l=" << braces(s.x_l) << "  x_r=" << braces(s.x_r);
        if (s.branching_side)
            out << "  branching=" << (*s.branching_side == Side::kLeft ? "x_l" : "x_r");
        out << '\n';
        for (auto c : plan.tree.children[r])
            self(self, c, indent + 2);
    };
    print(print, plan.tree.root, 2);
    return out.str();
}

nlohmann::json explain_json(const QueryPlan &plan)
{
    const auto &h = plan.hypergraph;
    auto node = [&](auto &&self, std::size_t r) -> nlohmann::json {
        const auto &rel = h.relations[r];
        const auto &s = plan.splits[r];
        nlohmann::json types = nlohmann::json::array();
        for (RelationType t : {kSource, kGroup, kBranching, kIntermediate, kTerminal}) {
            if (s.has(t))
                types.push_back(type_names(t));
        }
        nlohmann::json children = nlohmann::json::array();
        for (auto c : plan.tree.children[r])
            children.push_back(self(self, c));
        return {
            {"alias", rel.alias},
            {"source", rel.source},
            {"x_l", s.x_l},
            {"x_r", s.x_r},
            {"types", types},
            {"children", children},
        };
    };
    nlohmann::json edges = nlohmann::json::object();
    for (const auto &r : h.relations)
        edges[r.alias] = r.vertices;
    return {
        {"query", to_sql(plan.spec)},
        {"hypergraph", {{"vertices", h.vertices}, {"edges", edges}}},
        {"root", node(node, plan.tree.root)},
    };
}

}
