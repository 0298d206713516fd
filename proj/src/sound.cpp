#include "wfs/sound.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "wfs/bounds.hpp"
#include "wfs/ilp.hpp"

namespace wfs {

const char* holds_name(Holds h) {
    switch (h) {
        case Holds::True: return "true";
        case Holds::False: return "false";
        default: return "unknown";
    }
}

bool SoundNums::contains(std::int64_t k) const {
    if (p == 0 || k < 1 || k % p != 0) return false;
    return !k_limit || k / p < *k_limit;
}

NamedCounts named_marking(const PetriNet& net, const std::vector<std::int64_t>& m) {
    NamedCounts out;
    for (std::size_t p = 0; p < m.size(); ++p)
        if (m[p] != 0) out.emplace_back(net.places[p], m[p]);
    return out;
}

namespace {

std::string fresh_name(const PetriNet& net, const std::string& base) {
    std::string name = base;
    for (int n = 2; net.find_place(name) || net.find_transition(name); ++n) name = base + "_" + std::to_string(n);
    return name;
}

bool subset_of(const Bag& bag, const std::vector<bool>& set) {
    return std::all_of(bag.begin(), bag.end(), [&](const auto& e) { return set[e.first]; });
}

class Timer {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

// ---- preprocessing ----

std::vector<bool> nonredundant_saturation(const WorkflowNet& wf) {
    const PetriNet& net = wf.net;
    std::vector<bool> s(net.num_places(), false);
    s[wf.i()] = true;
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            if (!subset_of(net.pre[t], s)) continue;
            for (auto [p, w] : net.post[t])
                if (!s[p]) s[p] = grew = true;
        }
    }
    return s;
}

std::optional<CoverRun> place_cover_run(const WorkflowNet& wf, std::size_t p) {
    const PetriNet& net = wf.net;
    if (p == wf.i()) return CoverRun{1, {}};
    const std::int64_t tn = net.max_weight();
    std::vector<bool> s(net.num_places(), false);
    s[wf.i()] = true;
    // pi_j = pi_{j-1}^(||T||+1) t_j from {i:(k_{j-1}+1)(||T||+1)}, where t_j adds a new place
    CoverRun cur{0, {}};
    bool first = true;
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            if (!subset_of(net.pre[t], s)) continue;
            bool adds = false;
            for (auto [q, w] : net.post[t])
                if (!s[q]) adds = true;
            if (!adds) continue;
            if (first) {
                cur = {tn, {t}};
                first = false;
            } else {
                CoverRun next{checked_mul(checked_add(cur.k, 1), tn + 1), {}};
                for (std::int64_t r = 0; r <= tn; ++r) next.run.insert(next.run.end(), cur.run.begin(), cur.run.end());
                next.run.push_back(t);
                cur = std::move(next);
            }
            for (auto [q, w] : net.post[t]) s[q] = true;
            if (s[p]) return cur;
            grew = true;
        }
    }
    return std::nullopt;
}

Reduction remove_redundant(const WorkflowNet& wf) {
    const PetriNet& net = wf.net;
    std::vector<bool> keep = nonredundant_saturation(wf);
    Reduction red;
    PetriNet out;
    std::vector<std::size_t> index(net.num_places(), 0);
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        if (keep[p]) index[p] = out.add_place(net.places[p]);
        else red.removed_places.push_back(net.places[p]);
    }
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        if (!subset_of(net.pre[t], keep)) {
            red.removed_transitions.push_back(net.transitions[t]);
            continue;
        }
        Bag pre, post;
        for (auto [p, w] : net.pre[t]) pre.emplace_back(index[p], w);
        for (auto [p, w] : net.post[t]) post.emplace_back(index[p], w);
        out.add_transition(net.transitions[t], pre, post);
    }
    red.disconnected = !keep[wf.f()];
    out.initial = index[wf.i()];
    if (!red.disconnected) out.final = index[wf.f()];
    red.wf = WorkflowNet{out, index[wf.i()], red.disconnected ? index[wf.i()] : index[wf.f()]};
    return red;
}

std::vector<bool> maximal_trap(const WorkflowNet& wf) {
    const PetriNet& net = wf.net;
    std::vector<bool> q(net.num_places(), true);
    q[wf.f()] = false;
    for (bool shrunk = true; shrunk;) {
        shrunk = false;
        for (std::size_t t = 0; t < net.num_transitions(); ++t) {
            bool consumes = std::any_of(net.pre[t].begin(), net.pre[t].end(), [&](auto e) { return q[e.first]; });
            bool produces = std::any_of(net.post[t].begin(), net.post[t].end(), [&](auto e) { return q[e.first]; });
            if (!consumes || produces) continue;
            for (auto [p, w] : net.pre[t]) q[p] = false;
            shrunk = true;
        }
    }
    return q;
}

ShortCircuit short_circuit(const WorkflowNet& wf) {
    ShortCircuit sc{wf.net, 0};
    sc.t_sc = sc.net.add_transition(fresh_name(sc.net, "t_sc"), {{wf.f(), 1}}, {{wf.i(), 1}});
    return sc;
}

WorkflowNet scale_net(const WorkflowNet& wf, std::int64_t k) {
    if (k < 1) throw std::invalid_argument("scale factor must be positive");
    PetriNet net = wf.net;
    std::size_t i2 = net.add_place(fresh_name(net, net.places[wf.i()] + "'"));
    std::size_t o2 = net.add_place(fresh_name(net, net.places[wf.f()] + "'"));
    net.add_transition(fresh_name(net, "t_i"), {{i2, 1}}, {{wf.i(), k}});
    net.add_transition(fresh_name(net, "t_o"), {{wf.f(), k}}, {{o2, 1}});
    net.initial = i2;
    net.final = o2;
    return WorkflowNet{net, i2, o2};
}

// ---- decision procedures ----

namespace {

Certificate run_certificate(const PetriNet& net, const std::string& reason, std::optional<std::int64_t> k,
                            const Run& run, const Marking& reached) {
    Certificate c;
    c.reason = reason;
    c.k = k;
    c.run = run_names(net, run);
    c.marking = named_marking(net, reached);
    return c;
}

// first vertex (breadth-first) of the graph from {i:k} that cannot reach {f:k}
struct ExplicitResult {
    Holds holds = Holds::Unknown;
    std::optional<Certificate> certificate;
    std::size_t vertices = 0;
    CapHit cap = CapHit::None;
    ReachGraph graph;
};

ExplicitResult explicit_k_sound(const WorkflowNet& wf, std::int64_t k, const ExploreCaps& caps,
                                const char* reason = "CannotReachFinal") {
    ExplicitResult r;
    const PetriNet& net = wf.net;
    r.graph = build_reach_graph(net, unit_marking(net, wf.i(), k), caps);
    r.vertices = r.graph.vertices.size();
    r.cap = r.graph.caps_hit;
    if (!r.graph.complete()) return r;
    Marking target = unit_marking(net, wf.f(), k);
    auto back = backward_reachable(r.graph, [&](const Marking& m) { return m == target; });
    for (std::size_t v = 0; v < back.size(); ++v)
        if (!back[v]) {
            r.holds = Holds::False;
            r.certificate = run_certificate(net, reason, k, r.graph.path_to(v), r.graph.vertices[v]);
            return r;
        }
    r.holds = Holds::True;
    return r;
}

bool has_initial_transition(const WorkflowNet& wf) {
    const Bag want{{wf.i(), 1}};
    for (const Bag& b : wf.net.pre)
        if (b == want) return true;
    return false;
}

// the three conditions shared by 1-soundness and classical soundness
Verdict short_circuit_check(const WorkflowNet& wf, const SoundOptions& opts, bool quasi_live) {
    Timer timer;
    Verdict v;
    v.property = quasi_live ? "classical" : "1-sound";
    const PetriNet& net = wf.net;
    Marking m0 = unit_marking(net, wf.i());
    auto finish = [&](Holds h) {
        v.holds = h;
        if (h == Holds::Unknown) v.complete = false;
        v.time_ms = timer.ms();
        return v;
    };
    if (!has_initial_transition(wf)) {
        v.certificate = run_certificate(net, "NoInitialTransition", 1, {}, m0);
        return finish(Holds::False);
    }
    ShortCircuit sc = short_circuit(wf);
    BoundednessVerdict b = decide_boundedness(sc.net, m0, opts.node_cap);
    v.vertices_explored += b.tree_nodes;
    if (b.kind == BoundednessVerdict::Kind::Exceeded) return finish(Holds::Unknown);
    if (b.kind == BoundednessVerdict::Kind::Unbounded) {
        Run run = b.prefix;
        run.insert(run.end(), b.pump.begin(), b.pump.end());
        v.certificate = run_certificate(sc.net, "Unbounded", 1, run, apply_run(sc.net, m0, run, Semantics::N).final);
        return finish(Holds::False);
    }
    ReachGraph g = build_reach_graph(sc.net, m0, {opts.node_cap, std::nullopt});
    v.vertices_explored += g.vertices.size();
    if (!g.complete()) return finish(Holds::Unknown);
    CyclicityResult cyc = decide_cyclicity(g);
    if (!cyc.cyclic) {
        std::size_t at = *g.find(*cyc.counterexample);
        v.certificate = run_certificate(sc.net, "NotCyclic", 1, g.path_to(at), *cyc.counterexample);
        return finish(Holds::False);
    }
    if (quasi_live) {
        auto live = quasi_liveness_explicit(sc.net, g);
        Certificate c;
        c.reason = "NotQuasiLive";
        for (std::size_t t = 0; t < live.size(); ++t)
            if (!live[t]) c.dead_transitions.push_back(sc.net.transitions[t]);
        if (!c.dead_transitions.empty()) {
            v.certificate = c;
            return finish(Holds::False);
        }
    }
    return finish(Holds::True);
}

std::int64_t to_cap(const BigInt& v) {
    if (v > BigInt(std::numeric_limits<std::int64_t>::max() / 4)) return std::numeric_limits<std::int64_t>::max() / 4;
    return static_cast<std::int64_t>(v);
}

}  // namespace

Verdict check_1_sound(const WorkflowNet& wf, const SoundOptions& opts) { return short_circuit_check(wf, opts, false); }

Verdict check_classical(const WorkflowNet& wf, const SoundOptions& opts) { return short_circuit_check(wf, opts, true); }

Verdict check_k_sound(const WorkflowNet& wf, std::int64_t k, const SoundOptions& opts) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    Timer timer;
    WorkflowNet scaled = scale_net(wf, k);
    Verdict v = check_1_sound(scaled, opts);
    v.property = std::to_string(k) + "-sound";
    v.parameters = {{"k", k}};
    if (v.holds == Holds::False && v.certificate) {
        // restate the certificate on the original net: drop the leading t_i and the two fresh places
        Certificate& c = *v.certificate;
        c.k = k;
        const std::string& ti = scaled.net.transitions[wf.net.num_transitions()];
        bool plain = !c.run.empty() && c.run.front() == ti;
        for (std::size_t j = 1; plain && j < c.run.size(); ++j)
            plain = wf.net.find_transition(c.run[j]).has_value();
        for (const auto& [name, n] : c.marking)
            plain = plain && wf.net.find_place(name).has_value();
        if (plain) {
            c.run.erase(c.run.begin());
            if (c.reason == "NotCyclic") c.reason = "CannotReachFinal";
        } else {
            ExplicitResult e = explicit_k_sound(wf, k, {opts.node_cap, std::nullopt});
            v.vertices_explored += e.vertices;
            if (e.holds == Holds::False) v.certificate = e.certificate;
        }
    }
    v.time_ms = timer.ms();
    return v;
}

Verdict oracle_k_sound(const WorkflowNet& wf, std::int64_t k, const SoundOptions& opts) {
    Timer timer;
    Verdict v;
    v.property = "oracle " + std::to_string(k) + "-sound";
    v.parameters = {{"k", k}};
    if (k <= 0) {
        v.holds = Holds::True;
        return v;
    }
    ExplicitResult e = explicit_k_sound(wf, k, {opts.node_cap, std::nullopt});
    v.holds = e.holds;
    v.complete = e.holds != Holds::Unknown;
    v.certificate = e.certificate;
    v.vertices_explored = e.vertices;
    v.time_ms = timer.ms();
    return v;
}

namespace {

std::int64_t capped_limit(std::int64_t k_max, const BigInt& bound) {
    return bound < BigInt(k_max) ? static_cast<std::int64_t>(bound) : k_max;
}

Certificate disconnected_certificate(const WorkflowNet& wf) {
    Certificate c;
    c.reason = "FinalUnreachable";
    c.k = 1;
    c.marking = named_marking(wf.net, unit_marking(wf.net, wf.i()));
    return c;
}

}  // namespace

Verdict check_generalised(const WorkflowNet& wf, const SoundOptions& opts) {
    if (opts.k_max < 1) throw std::invalid_argument("k_max must be positive");
    Timer timer;
    Verdict v;
    v.property = "generalised-sound";
    auto finish = [&](Holds h) {
        v.holds = h;
        if (h == Holds::Unknown) v.complete = false;
        v.time_ms = timer.ms();
        return v;
    };
    Reduction red = remove_redundant(wf);
    if (red.disconnected) {
        v.certificate = disconnected_certificate(wf);
        return finish(Holds::False);
    }
    const WorkflowNet& net = red.wf;
    if (auto tau = homogeneous_witness(net)) {
        Certificate c;
        c.reason = "ZUnbounded";
        for (std::size_t t = 0; t < tau->size(); ++t)
            if ((*tau)[t] != 0) c.tau.emplace_back(net.net.transitions[t], (*tau)[t]);
        v.certificate = c;
        return finish(Holds::False);
    }
    BoundReport bound = bound_generalised_K(net, opts.constant);
    const std::int64_t limit = capped_limit(opts.k_max, bound.value);
    v.parameters = {{"kMax", opts.k_max}, {"constant", opts.constant}, {"checkedUpTo", limit}};
    for (std::int64_t k = 1; k <= limit; ++k) {
        ExploreCaps caps{opts.node_cap, to_cap(bound_z_norm_cap(net, k).value)};
        ReachGraph g = build_reach_graph(net.net, unit_marking(net.net, net.i(), k), caps);
        v.vertices_explored += g.vertices.size();
        if (g.caps_hit == CapHit::Norm) {
            auto [at, t] = *g.cap_edge;
            Run run = g.path_to(at);
            run.push_back(t);
            Marking m0 = unit_marking(net.net, net.i(), k);
            v.certificate = run_certificate(net.net, "ZUnbounded", k, run, apply_run(net.net, m0, run, Semantics::Z).final);
            return finish(Holds::False);
        }
        if (g.caps_hit == CapHit::Vertices) return finish(Holds::Unknown);
        Marking target = unit_marking(net.net, net.f(), k);
        auto back = backward_reachable(g, [&](const Marking& m) { return m == target; });
        for (std::size_t x = 0; x < back.size(); ++x)
            if (!back[x]) {
                v.certificate = run_certificate(net.net, "CannotReachFinal", k, g.path_to(x), g.vertices[x]);
                return finish(Holds::False);
            }
    }
    v.complete = BigInt(limit) == bound.value;
    return finish(Holds::True);
}

Verdict check_structural(const WorkflowNet& wf, const SoundOptions& opts) {
    if (opts.k_max < 1) throw std::invalid_argument("k_max must be positive");
    Timer timer;
    Verdict v;
    v.property = "structural-sound";
    auto finish = [&](Holds h) {
        v.holds = h;
        if (h == Holds::Unknown) v.complete = false;
        v.time_ms = timer.ms();
        return v;
    };
    Reduction red = remove_redundant(wf);
    if (red.disconnected) {
        v.certificate = disconnected_certificate(wf);
        return finish(Holds::False);
    }
    const WorkflowNet& net = red.wf;
    auto mu = ilp_s_solution(net);
    if (!mu) {
        Certificate c;
        c.reason = "IlpInfeasible";
        v.certificate = c;
        return finish(Holds::False);
    }
    // the horizon argument goes through for any solution, so the kappa at hand gives a tighter bound
    const BigInt kappa = (*mu)[0];
    const BigInt tn = transition_norm(net.net);
    const BigInt places = net.net.num_places();
    BigInt tight = kappa + bound_placecover(net).value * (tn > kappa ? tn : kappa) * places * (places + 2);
    BigInt horizon = bound_structural_K(net, opts.constant).value;
    if (tight < horizon) horizon = tight;
    const std::int64_t limit = capped_limit(opts.k_max, horizon);

    // every k from which a marked trap avoiding f, or a transition absent from all ILP^s solutions,
    // can be reached is unsound; the scan below stops at the smallest such k
    struct Blocker {
        std::string reason;
        CoverRun run;
    };
    std::optional<Blocker> blocker;
    auto consider = [&](const std::string& reason, CoverRun run) {
        if (!blocker || run.k < blocker->run.k) blocker = Blocker{reason, std::move(run)};
    };
    std::vector<bool> trap = maximal_trap(net);
    for (std::size_t p = 0; p < trap.size(); ++p)
        if (trap[p])
            if (auto run = place_cover_run(net, p)) consider("MarkedTrap", *run);
    for (std::size_t t = 0; t < net.net.num_transitions(); ++t) {
        if (ilp_s_solution(net, t)) continue;
        CoverRun run{0, {}};
        bool coverable = true;
        for (auto [p, w] : net.net.pre[t]) {
            auto part = place_cover_run(net, p);
            coverable = coverable && part.has_value();
            if (!coverable) break;
            for (Weight r = 0; r < w; ++r) {
                run.k = checked_add(run.k, part->k);
                run.run.insert(run.run.end(), part->run.begin(), part->run.end());
            }
        }
        if (!coverable) continue;
        run.k = std::max<std::int64_t>(run.k, 1);
        run.run.push_back(t);
        consider("UnusableTransition", run);
    }

    v.parameters = {{"kMax", opts.k_max}, {"constant", opts.constant}};
    bool unknown = false;
    for (std::int64_t k = 1; k <= limit; ++k) {
        if (blocker && k >= blocker->run.k) {
            const CoverRun& b = blocker->run;
            Marking m0 = unit_marking(net.net, net.i(), b.k);
            v.certificate = run_certificate(net.net, blocker->reason, b.k, b.run,
                                            apply_run(net.net, m0, b.run, Semantics::N).final);
            return finish(Holds::False);
        }
        Verdict at = check_k_sound(net, k, opts);
        v.vertices_explored += at.vertices_explored;
        if (at.holds == Holds::True) {
            v.parameters.emplace_back("k", k);
            return finish(Holds::True);
        }
        if (at.holds == Holds::Unknown) unknown = true;
    }
    if (unknown || BigInt(limit) != horizon) return finish(Holds::Unknown);
    Certificate c;
    c.reason = "NoSoundK";
    c.k = limit;
    v.certificate = c;
    return finish(Holds::False);
}

SoundNums compute_sound_numbers(const WorkflowNet& wf, const SoundOptions& opts) {
    Timer timer;
    SoundNums nums;
    Verdict s = check_structural(wf, opts);
    nums.vertices_explored = s.vertices_explored;
    if (s.holds != Holds::True) {
        nums.complete = s.holds == Holds::False;
        nums.certificate = s.certificate;
        nums.time_ms = timer.ms();
        return nums;
    }
    for (const auto& [name, value] : s.parameters)
        if (name == "k") nums.p = value;
    WorkflowNet scaled = scale_net(wf, nums.p);
    BigInt bound = bound_generalised_K(scaled, opts.constant).value;
    const std::int64_t limit = capped_limit(opts.k_max, bound);
    nums.k_limit = std::nullopt;
    // the scaled net is c-sound exactly when wf is (c*p)-sound, and the latter explores fewer interleavings
    for (std::int64_t c = 1; c <= limit; ++c) {
        Verdict at = check_k_sound(wf, checked_mul(c, nums.p), opts);
        nums.vertices_explored += at.vertices_explored;
        if (at.holds == Holds::Unknown) {
            nums.complete = false;
            break;
        }
        nums.checked_up_to = c;
        if (at.holds == Holds::False) {
            nums.k_limit = c;
            nums.certificate = at.certificate;
            break;
        }
    }
    if (!nums.k_limit && BigInt(limit) != bound) nums.complete = false;
    nums.time_ms = timer.ms();
    return nums;
}

}  // namespace wfs
