#include "wfs/gadgets.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wfs/explore.hpp"

namespace wfs {

namespace {

constexpr const char* left_text = R"(place i initial
place p1
place o final
trans s1 : i -> p1
trans s2 : 2*p1 -> p1, o
)";

constexpr const char* middle_text = R"(place i initial
place q1
place q2
place o final
trans t1 : i -> q1
trans t2 : q1 -> q2
trans t3 : q2 -> q1
trans t4 : q1, q2 -> 2*o
)";

constexpr const char* right_text = R"(place i initial
place r1
place r2
place r3
place o final
trans u1 : i -> r1, r2
trans u2 : i -> r2, r3
trans u3 : i -> r1, r3
trans u4 : r1, r3 -> o
trans u5 : r1, r2 -> o
trans u6 : r2, r3 -> o
)";

std::string fresh(const PetriNet& net, const std::string& base) {
    std::string name = base;
    for (int n = 2; net.find_place(name) || net.find_transition(name); ++n) name = base + "_" + std::to_string(n);
    return name;
}

std::size_t fresh_place(PetriNet& net, const std::string& base) { return net.add_place(fresh(net, base)); }

std::size_t fresh_transition(PetriNet& net, const std::string& base, Bag pre, Bag post) {
    return net.add_transition(fresh(net, base), std::move(pre), std::move(post));
}

Bag to_bag(const PetriNet& net, const NamedMarking& m, const std::vector<std::size_t>& index) {
    Bag out;
    for (const auto& [name, n] : m) {
        if (n < 0) throw NetError("negative count for place '" + name + "'");
        if (n > 0) out.emplace_back(index[net.place(name)], n);
    }
    return out;
}

std::int64_t token_sum(const NamedMarking& m) {
    std::int64_t s = 0;
    for (const auto& [name, n] : m) s = checked_add(s, n);
    return s;
}

std::int64_t bag_sum(const Bag& b) {
    std::int64_t s = 0;
    for (auto [p, w] : b) s = checked_add(s, w);
    return s;
}

bool satisfies_path_condition(const WorkflowNet& wf) {
    try {
        validate_workflow(wf.net, wf.i(), wf.f());
        return true;
    } catch (const WorkflowError&) {
        return false;
    }
}

}  // namespace

Fig1 fig1_examples() {
    return {parse_workflow(left_text), parse_workflow(middle_text), parse_workflow(right_text)};
}

bool is_conservative(const PetriNet& net) {
    for (std::size_t t = 0; t < net.num_transitions(); ++t)
        if (bag_sum(net.pre[t]) != bag_sum(net.post[t])) return false;
    return true;
}

Reversibility is_reversible(const PetriNet& net) {
    Reversibility r;
    r.inverse.resize(net.num_transitions());
    r.reversible = true;
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        for (std::size_t u = 0; u < net.num_transitions(); ++u)
            if (net.pre[u] == net.post[t] && net.post[u] == net.pre[t]) {
                r.inverse[t] = u;
                break;
            }
        if (!r.inverse[t]) r.reversible = false;
    }
    return r;
}

ReductionInstance pspace_reduction(const PetriNet& net, const NamedMarking& m, const NamedMarking& target) {
    if (!is_conservative(net)) throw NotConservative();
    const std::int64_t c = token_sum(m);
    if (c < 1 || token_sum(target) != c) throw SumMismatch();

    ReductionInstance out;
    PetriNet n;
    std::vector<std::size_t> index(net.num_places());
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        index[p] = n.add_place(net.places[p]);
        out.place_map[net.places[p]] = net.places[p];
    }
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        n.add_transition(net.transitions[t], net.pre[t], net.post[t]);
        out.transition_map[net.transitions[t]] = net.transitions[t];
    }
    std::size_t i = fresh_place(n, "i");
    std::size_t o = fresh_place(n, "o");
    std::size_t r = fresh_place(n, "r");
    fresh_transition(n, "t_i", {{i, 1}}, {{r, c}});
    fresh_transition(n, "t_m", {{r, c}}, to_bag(net, m, index));
    fresh_transition(n, "t_m'", to_bag(net, target, index), {{o, 1}});
    for (std::size_t p = 0; p < net.num_places(); ++p) fresh_transition(n, "t_" + net.places[p], {{index[p], 1}}, {{r, 1}});
    n.initial = i;
    n.final = o;

    out.wf = WorkflowNet{n, i, o};
    out.parameters = {{"c", c}};
    out.source = m;
    out.target = target;
    out.path_condition = satisfies_path_condition(out.wf);
    return out;
}

WorkflowNet structural_hardness_transform(const WorkflowNet& wf) {
    WorkflowNet out = wf;
    fresh_transition(out.net, "t_double", {{wf.i(), 2}}, {{wf.f(), 1}});
    return out;
}

Marking CountingGadget::start() const {
    Marking m(net.num_places(), 0);
    m[s] = m[c] = 1;
    return m;
}

Marking CountingGadget::end() const {
    Marking m(net.num_places(), 0);
    m[f] = m[c] = 1;
    m[b] = count;
    return m;
}

CountingGadget naive_counting_gadget(std::int64_t c) {
    if (c < 1) throw std::invalid_argument("count must be positive");
    CountingGadget g;
    g.s = g.net.add_place("s");
    g.c = g.net.add_place("c");
    g.f = g.net.add_place("f");
    g.b = g.net.add_place("b");
    g.count = c;
    g.net.add_transition("count", {{g.s, 1}, {g.c, 1}}, {{g.f, 1}, {g.c, 1}, {g.b, c}});
    g.net.add_transition("count_inv", {{g.f, 1}, {g.c, 1}, {g.b, c}}, {{g.s, 1}, {g.c, 1}});
    return g;
}

std::array<bool, 5> counting_gadget_properties(const CountingGadget& g) {
    std::array<bool, 5> ok{};
    const Marking start = g.start(), end = g.end();
    ReachGraph from_start = build_reach_graph(g.net, start);
    ReachGraph from_end = build_reach_graph(g.net, end);
    if (!from_start.complete() || !from_end.complete()) throw IncompleteGraph();

    ok[0] = from_start.find(end).has_value() && from_end.find(start).has_value();
    ok[1] = std::all_of(from_start.vertices.begin(), from_start.vertices.end(),
                        [&](const Marking& m) { return m[g.f] == 0 || m == end; });
    ok[2] = std::all_of(from_end.vertices.begin(), from_end.vertices.end(),
                        [&](const Marking& m) { return m[g.s] == 0 || m == start; });

    // every marking strictly below the end marking with f empty is dead
    ok[3] = true;
    Marking m(g.net.num_places(), 0);
    for (;;) {
        if (m != end && m[g.f] == 0)
            for (std::size_t t = 0; t < g.net.num_transitions(); ++t)
                if (enabled(g.net, m, t)) ok[3] = false;
        std::size_t p = 0;
        while (p < m.size() && m[p] == end[p]) m[p++] = 0;
        if (p == m.size()) break;
        ++m[p];
    }

    ok[4] = true;
    for (std::size_t p = 0; p < g.net.num_places(); ++p)
        ok[4] = ok[4] && std::any_of(from_start.vertices.begin(), from_start.vertices.end(),
                                     [&](const Marking& v) { return v[p] > 0; });
    return ok;
}

ReductionInstance expspace_reduction(const PetriNet& net, const NamedMarking& m, const NamedMarking& target,
                                     std::int64_t c_n) {
    if (!is_reversible(net).reversible) throw NotReversible();
    if (c_n < 1) throw std::invalid_argument("c_n must be positive");
    const CountingGadget gadget = naive_counting_gadget(c_n);
    const PetriNet& gn = gadget.net;
    const std::size_t np = net.num_places();

    ReductionInstance out;
    PetriNet n;
    std::vector<std::size_t> orig(np), bar(np);
    for (std::size_t p = 0; p < np; ++p) {
        orig[p] = n.add_place(net.places[p]);
        out.place_map[net.places[p]] = net.places[p];
    }
    for (std::size_t p = 0; p < np; ++p) bar[p] = fresh_place(n, net.places[p] + "_bar");
    const std::size_t i = fresh_place(n, "i");
    const std::size_t o = fresh_place(n, "o");
    const std::size_t start = fresh_place(n, "p_start");
    const std::size_t progress = fresh_place(n, "p_inProgress");
    const std::size_t cover = fresh_place(n, "p_cover");
    const std::size_t simple = fresh_place(n, "p_simple");
    const std::size_t can_fire = fresh_place(n, "p_canFire");
    // two copies of the gadget sharing b
    std::vector<std::size_t> g1(gn.num_places()), g2(gn.num_places());
    for (std::size_t p = 0; p < gn.num_places(); ++p) g1[p] = fresh_place(n, gn.places[p]);
    for (std::size_t p = 0; p < gn.num_places(); ++p)
        g2[p] = p == gadget.b ? g1[p] : fresh_place(n, gn.places[p] + "_heart");

    // T1: original transitions, mirrored on the budget places and gated by p_canFire
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        Bag pre{{can_fire, 1}}, post{{can_fire, 1}};
        for (auto [p, w] : net.pre[t]) {
            pre.emplace_back(orig[p], w);
            post.emplace_back(bar[p], w);
        }
        for (auto [p, w] : net.post[t]) {
            post.emplace_back(orig[p], w);
            pre.emplace_back(bar[p], w);
        }
        std::size_t id = fresh_transition(n, net.transitions[t], pre, post);
        out.transition_map[net.transitions[t]] = n.transitions[id];
    }

    // T2 and T3: gadget copies whose b arcs are repeated on every budget place
    auto copy_gadget = [&](const std::vector<std::size_t>& map, const std::string& suffix) {
        for (std::size_t t = 0; t < gn.num_transitions(); ++t) {
            Bag pre, post;
            for (auto [p, w] : gn.pre[t]) pre.emplace_back(map[p], w);
            for (auto [p, w] : gn.post[t]) post.emplace_back(map[p], w);
            const Weight pb = gn.pre_at(t, gadget.b), qb = gn.post_at(t, gadget.b);
            for (std::size_t p = 0; p < np; ++p) {
                if (pb) pre.emplace_back(bar[p], pb);
                if (qb) post.emplace_back(bar[p], qb);
            }
            fresh_transition(n, gn.transitions[t] + suffix, pre, post);
        }
    };
    copy_gadget(g1, "");
    copy_gadget(g2, "_heart");

    // T4
    std::vector<std::size_t> index(np);
    std::iota(index.begin(), index.end(), 0);
    const Bag mb = to_bag(net, m, index), tb = to_bag(net, target, index);
    auto on = [](const Bag& b, const std::vector<std::size_t>& map) {
        Bag out;
        for (auto [p, w] : b) out.emplace_back(map[p], w);
        return out;
    };
    auto plus = [](Bag a, const Bag& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    const Weight norm = net.max_weight() + 1;
    Bag full;
    for (std::size_t p = 0; p < np; ++p) {
        full.emplace_back(orig[p], norm);
        full.emplace_back(bar[p], norm);
    }

    fresh_transition(n, "t_hard", {{i, 1}}, {{g1[gadget.s], 1}, {g1[gadget.c], 1}});
    fresh_transition(n, "t_start", {{g1[gadget.f], 1}, {g1[gadget.c], 1}}, {{start, 1}});
    fresh_transition(n, "t_m", plus({{start, 1}}, on(mb, bar)), plus({{progress, 1}, {can_fire, 1}}, on(mb, orig)));
    // the token on p_canFire is withdrawn together with p_inProgress, which stops T1 until t_m'_inv
    Bag m2_pre = plus({{progress, 1}, {can_fire, 1}}, on(tb, orig));
    Bag m2_post = plus({{cover, 1}}, on(tb, bar));
    fresh_transition(n, "t_m'", m2_pre, m2_post);
    fresh_transition(n, "t_m'_inv", m2_post, m2_pre);
    fresh_transition(n, "t_reach", {{cover, 1}}, {{g2[gadget.f], 1}, {g2[gadget.c], 1}});
    fresh_transition(n, "t_reach_inv", {{g2[gadget.f], 1}, {g2[gadget.c], 1}}, {{cover, 1}});
    fresh_transition(n, "t_end", {{g2[gadget.s], 1}, {g2[gadget.c], 1}}, {{o, 1}});
    fresh_transition(n, "t_simple", {{i, 1}}, plus({{simple, 1}, {can_fire, 1}}, full));
    fresh_transition(n, "t_simple2", plus({{simple, 1}, {can_fire, 1}}, full), {{o, 1}});
    n.initial = i;
    n.final = o;

    out.wf = WorkflowNet{n, i, o};
    out.parameters = {{"c_n", c_n}, {"norm", norm}};
    out.source = m;
    out.target = target;
    out.path_condition = satisfies_path_condition(out.wf);
    return out;
}

std::optional<std::int64_t> suggest_cn(const PetriNet& net, const NamedMarking& m, const NamedMarking& target,
                                       std::size_t node_cap) {
    Marking from = make_marking(net, m), to = make_marking(net, target);
    ReachGraph g = build_reach_graph(net, from, {node_cap, std::nullopt});
    auto v = g.find(to);
    if (!v) return std::nullopt;
    // the mirrored transitions take post(t)[p] from the budget of p before returning pre(t)[p]
    const Run run = g.path_to(*v);
    RunResult r = apply_run(net, from, run, Semantics::N);
    std::int64_t best = 1;
    for (const Marking& x : r.trace) best = std::max(best, *std::max_element(x.begin(), x.end()));
    for (std::size_t j = 0; j < run.size(); ++j)
        for (auto [p, w] : net.post[run[j]]) best = std::max(best, r.trace[j][p] + w);
    return best;
}

WorkflowNet random_workflow(std::uint64_t seed, const RandomParams& params, int retries) {
    if (params.places < 2 || params.transitions < 1 || params.max_weight < 1)
        throw std::invalid_argument("random nets need at least two places, one transition and weight 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coin(0, 2), weight(1, params.max_weight);
    const std::size_t f = params.places - 1;
    for (int attempt = 0; attempt < retries; ++attempt) {
        PetriNet n;
        n.add_place("i");
        for (std::size_t p = 1; p < f; ++p) n.add_place("p" + std::to_string(p));
        n.add_place("o");
        for (int t = 0; t < params.transitions; ++t) {
            Bag pre, post;
            for (std::size_t p = 0; p < f; ++p)
                if (coin(rng) == 0) pre.emplace_back(p, weight(rng));
            for (std::size_t p = 1; p <= f; ++p)
                if (coin(rng) == 0) post.emplace_back(p, weight(rng));
            if (pre.empty()) pre.emplace_back(std::uniform_int_distribution<std::size_t>(0, f - 1)(rng), 1);
            n.add_transition("t" + std::to_string(t + 1), pre, post);
        }
        n.initial = 0;
        n.final = f;
        try {
            return validate_workflow(n, 0, f);
        } catch (const WorkflowError&) {
        }
    }
    throw GenerationFailed();
}

}  // namespace wfs
