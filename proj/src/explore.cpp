#include "wfs/explore.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

namespace wfs {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const { return boost::hash_range(v.begin(), v.end()); }
};

bool exceeds(const Marking& m, std::int64_t cap) {
    return std::any_of(m.begin(), m.end(), [cap](auto v) { return v > cap; });
}

}  // namespace

std::optional<std::size_t> ReachGraph::find(const Marking& m) const {
    auto it = std::find(vertices.begin(), vertices.end(), m);
    if (it == vertices.end()) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
}

Run ReachGraph::path_to(std::size_t v) const {
    Run r;
    while (v != 0) {
        r.push_back(via[v]);
        v = parent[v];
    }
    std::reverse(r.begin(), r.end());
    return r;
}

std::string ReachGraph::edge_list(const PetriNet& net) const {
    std::ostringstream os;
    for (const auto& e : edges) os << e.source << ' ' << net.transitions[e.transition] << ' ' << e.target << '\n';
    return os.str();
}

ReachGraph build_reach_graph(const PetriNet& net, const Marking& m0, const ExploreCaps& caps) {
    ReachGraph g;
    std::unordered_map<Marking, std::size_t, VecHash> index;
    g.vertices.push_back(m0);
    g.parent.push_back(0);
    g.via.push_back(0);
    index.emplace(m0, 0);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            if (!enabled(net, g.vertices[v], t)) continue;
            Marking m = fire(net, g.vertices[v], t);
            auto it = index.find(m);
            if (it != index.end()) {
                g.edges.push_back({v, t, it->second});
                continue;
            }
            if (caps.max_norm && exceeds(m, *caps.max_norm)) {
                g.caps_hit = CapHit::Norm;
                g.cap_edge = {v, t};
                return g;
            }
            if (g.vertices.size() >= caps.max_vertices) {
                g.caps_hit = CapHit::Vertices;
                return g;
            }
            std::size_t w = g.vertices.size();
            index.emplace(m, w);
            g.vertices.push_back(std::move(m));
            g.parent.push_back(v);
            g.via.push_back(t);
            g.edges.push_back({v, t, w});
        }
    }
    return g;
}

// ---- Karp-Miller ----

KarpMillerTree karp_miller(const PetriNet& net, const Marking& m0, std::size_t node_cap, bool stop_at_pump) {
    KarpMillerTree tree;
    std::unordered_set<Marking, VecHash> seen;
    tree.labels.push_back(m0);
    tree.parent.push_back(0);
    tree.via.push_back(0);
    seen.insert(m0);
    const std::size_t np = net.num_places();
    for (std::size_t v = 0; v < tree.labels.size(); ++v) {
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            const Marking& cur = tree.labels[v];
            bool on = true;
            for (auto [p, w] : net.pre[t])
                if (cur[p] != omega && cur[p] < w) on = false;
            if (!on) continue;
            Marking m = cur;
            for (auto [p, w] : net.pre[t])
                if (m[p] != omega) m[p] -= w;
            for (auto [p, w] : net.post[t])
                if (m[p] != omega) m[p] = checked_add(m[p], w);
            // accelerate against every ancestor, parent included
            std::size_t a = v;
            while (true) {
                const Marking& anc = tree.labels[a];
                bool leq = true, strict = false;
                for (std::size_t p = 0; p < np && leq; ++p) {
                    if (anc[p] > m[p]) leq = false;
                    else if (anc[p] < m[p]) strict = true;
                }
                if (leq && strict) {
                    if (!tree.first_pump) {
                        tree.first_pump = KarpMillerTree::Pump{a, v, t};
                        if (stop_at_pump) return tree;
                    }
                    for (std::size_t p = 0; p < np; ++p)
                        if (anc[p] < m[p]) m[p] = omega;
                }
                if (a == 0) break;
                a = tree.parent[a];
            }
            if (seen.count(m)) continue;
            if (tree.labels.size() >= node_cap) {
                tree.exceeded = true;
                return tree;
            }
            seen.insert(m);
            tree.labels.push_back(std::move(m));
            tree.parent.push_back(v);
            tree.via.push_back(t);
        }
    }
    return tree;
}

BoundednessVerdict decide_boundedness(const PetriNet& net, const Marking& m0, std::size_t node_cap) {
    KarpMillerTree tree = karp_miller(net, m0, node_cap, true);
    BoundednessVerdict out{BoundednessVerdict::Kind::Bounded, {}, {}, {}, tree.labels.size()};
    auto path = [&](std::size_t from, std::size_t to) {
        Run r;
        while (to != from) {
            r.push_back(tree.via[to]);
            to = tree.parent[to];
        }
        std::reverse(r.begin(), r.end());
        return r;
    };
    if (tree.first_pump) {
        out.kind = BoundednessVerdict::Kind::Unbounded;
        out.prefix = path(0, tree.first_pump->ancestor);
        out.pump = path(tree.first_pump->ancestor, tree.first_pump->parent);
        out.pump.push_back(tree.first_pump->transition);
        return out;
    }
    if (tree.exceeded) {
        out.kind = BoundednessVerdict::Kind::Exceeded;
        return out;
    }
    out.bound.assign(net.num_places(), 0);
    for (const auto& m : tree.labels)
        for (std::size_t p = 0; p < m.size(); ++p) out.bound[p] = std::max(out.bound[p], m[p]);
    return out;
}

// ---- graph queries ----

std::vector<bool> backward_reachable(const ReachGraph& g, const std::function<bool(const Marking&)>& target) {
    if (!g.complete()) throw IncompleteGraph();
    const std::size_t n = g.vertices.size();
    std::vector<std::vector<std::size_t>> rev(n);
    for (const auto& e : g.edges) rev[e.target].push_back(e.source);
    std::vector<bool> mark(n, false);
    std::deque<std::size_t> q;
    for (std::size_t v = 0; v < n; ++v)
        if (target(g.vertices[v])) {
            mark[v] = true;
            q.push_back(v);
        }
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop_front();
        for (std::size_t u : rev[v])
            if (!mark[u]) {
                mark[u] = true;
                q.push_back(u);
            }
    }
    return mark;
}

CyclicityResult decide_cyclicity(const ReachGraph& g) {
    if (!g.complete()) throw NotBounded();
    const Marking& root = g.vertices[g.root()];
    auto back = backward_reachable(g, [&](const Marking& m) { return m == root; });
    for (std::size_t v = 0; v < back.size(); ++v)
        if (!back[v]) return {false, g.vertices[v]};
    return {true, std::nullopt};
}

CyclicityResult decide_cyclicity(const PetriNet& net, const Marking& m0, const ExploreCaps& caps) {
    return decide_cyclicity(build_reach_graph(net, m0, caps));
}

std::vector<bool> quasi_liveness_explicit(const PetriNet& net, const ReachGraph& g) {
    if (!g.complete()) throw IncompleteGraph();
    std::vector<bool> live(net.num_transitions(), false);
    for (const auto& m : g.vertices)
        for (std::size_t t = 0; t < net.num_transitions(); ++t)
            if (!live[t] && enabled(net, m, t)) live[t] = true;
    return live;
}

std::vector<bool> quasi_liveness(const PetriNet& net, const Marking& m0, std::size_t node_cap) {
    KarpMillerTree tree = karp_miller(net, m0, node_cap);
    if (tree.exceeded) throw ExploreExceeded("Karp-Miller tree exceeded its node cap");
    std::vector<bool> live(net.num_transitions(), false);
    for (const auto& m : tree.labels)
        for (std::size_t t = 0; t < net.num_transitions(); ++t)
            if (!live[t]) {
                bool covers = true;
                for (auto [p, w] : net.pre[t])
                    if (m[p] != omega && m[p] < w) covers = false;
                live[t] = covers;
            }
    return live;
}

}  // namespace wfs
