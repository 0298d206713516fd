#include "wfs/core.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace wfs {

ParseError::ParseError(std::size_t line, std::size_t col, const std::string& what)
    : NetError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what),
      line(line),
      col(col) {}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError();
    return r;
}

std::size_t PetriNet::add_place(const std::string& name) {
    if (find_place(name) || find_transition(name)) throw NetError("duplicate identifier '" + name + "'");
    places.push_back(name);
    return places.size() - 1;
}

std::size_t PetriNet::add_transition(const std::string& name, Bag pre_bag, Bag post_bag) {
    if (find_place(name) || find_transition(name)) throw NetError("duplicate identifier '" + name + "'");
    for (const Bag* b : {&pre_bag, &post_bag})
        for (auto [p, w] : *b)
            if (p >= places.size() || w <= 0) throw NetError("bad arc in transition '" + name + "'");
    transitions.push_back(name);
    pre.push_back(normalize_bag(std::move(pre_bag)));
    post.push_back(normalize_bag(std::move(post_bag)));
    return transitions.size() - 1;
}

std::optional<std::size_t> PetriNet::find_place(std::string_view name) const {
    auto it = std::find(places.begin(), places.end(), name);
    if (it == places.end()) return std::nullopt;
    return static_cast<std::size_t>(it - places.begin());
}

std::optional<std::size_t> PetriNet::find_transition(std::string_view name) const {
    auto it = std::find(transitions.begin(), transitions.end(), name);
    if (it == transitions.end()) return std::nullopt;
    return static_cast<std::size_t>(it - transitions.begin());
}

std::size_t PetriNet::place(std::string_view name) const {
    if (auto p = find_place(name)) return *p;
    throw NetError("unknown place '" + std::string(name) + "'");
}

std::size_t PetriNet::transition(std::string_view name) const {
    if (auto t = find_transition(name)) return *t;
    throw NetError("unknown transition '" + std::string(name) + "'");
}

static Weight bag_at(const Bag& b, std::size_t p) {
    for (auto [q, w] : b)
        if (q == p) return w;
    return 0;
}

Weight PetriNet::pre_at(std::size_t t, std::size_t p) const { return bag_at(pre[t], p); }
Weight PetriNet::post_at(std::size_t t, std::size_t p) const { return bag_at(post[t], p); }

std::vector<std::int64_t> PetriNet::effect(std::size_t t) const {
    std::vector<std::int64_t> d(places.size(), 0);
    for (auto [p, w] : pre[t]) d[p] -= w;
    for (auto [p, w] : post[t]) d[p] += w;
    return d;
}

Weight PetriNet::max_weight() const {
    Weight m = 0;
    for (const auto* side : {&pre, &post})
        for (const Bag& b : *side)
            for (auto [p, w] : b) m = std::max(m, w);
    return m;
}

NetMetrics net_metrics(const PetriNet& net) {
    NetMetrics m;
    m.abs_value = BigInt(net.num_places() + net.num_transitions());
    m.norm = BigInt(net.max_weight()) + 1;
    unsigned lg = 0;
    while ((BigInt(1) << lg) < m.norm) ++lg;
    m.size = m.abs_value * (1 + lg);
    return m;
}

Bag normalize_bag(Bag bag) {
    std::sort(bag.begin(), bag.end());
    Bag out;
    for (auto [p, w] : bag) {
        if (!out.empty() && out.back().first == p)
            out.back().second = checked_add(out.back().second, w);
        else
            out.emplace_back(p, w);
    }
    std::erase_if(out, [](const auto& e) { return e.second == 0; });
    return out;
}

Bag make_bag(const PetriNet& net, const std::vector<std::pair<std::string, Weight>>& items) {
    Bag b;
    for (const auto& [name, w] : items) b.emplace_back(net.place(name), w);
    return normalize_bag(std::move(b));
}

// ---- text format ----

namespace {

bool name_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '\'' || c == '.' || c >= 0x80;
}

class LineLexer {
public:
    LineLexer(std::string_view line, std::size_t lineno) : s_(line), line_(lineno) {}

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    std::size_t col() const { return pos_ + 1; }

    [[noreturn]] void fail(const std::string& what) const { fail_at(col(), what); }
    [[noreturn]] void fail_at(std::size_t c, const std::string& what) const { throw ParseError(line_, c, what); }

    bool peek_name() {
        skip_ws();
        return pos_ < s_.size() && name_char(static_cast<unsigned char>(s_[pos_]));
    }

    std::string name() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && name_char(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string(s_.substr(start, pos_ - start));
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

bool is_number(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Bag parse_bag(LineLexer& lx, const PetriNet& net) {
    Bag bag;
    if (lx.at_end()) return bag;
    while (true) {
        lx.skip_ws();
        std::size_t col = lx.col();
        std::string tok = lx.name();
        Weight w = 1;
        if (is_number(tok)) {
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) lx.fail("weight out of range");
            if (w == 0) lx.fail_at(col, "weight 0 is not allowed");
            lx.expect("*");
            lx.skip_ws();
            col = lx.col();
            tok = lx.name();
        } else if (lx.accept("*")) {
            lx.fail("non-numeric weight '" + tok + "'");
        }
        auto p = net.find_place(tok);
        if (!p) lx.fail_at(col, "unknown place '" + tok + "'");
        bag.emplace_back(*p, w);
        if (!lx.accept(",")) break;
    }
    return bag;
}

}  // namespace

PetriNet parse_net(std::string_view text) {
    PetriNet net;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineLexer lx(line, lineno);
        if (lx.at_end()) {
            if (end == text.size()) break;
            continue;
        }
        std::size_t kw_col = lx.col();
        std::string kw = lx.name();
        {
            if (kw == "place") {
                std::size_t name_col = lx.col();
                std::string name = lx.name();
                if (net.find_place(name) || net.find_transition(name))
                    lx.fail_at(name_col, "duplicate identifier '" + name + "'");
                std::size_t p = net.add_place(name);
                if (!lx.at_end()) {
                    std::string tag = lx.name();
                    if (tag == "initial") {
                        if (net.initial) lx.fail("more than one initial place");
                        net.initial = p;
                    } else if (tag == "final") {
                        if (net.final) lx.fail("more than one final place");
                        net.final = p;
                    } else {
                        lx.fail("expected 'initial' or 'final'");
                    }
                }
            } else if (kw == "trans") {
                std::size_t name_col = lx.col();
                std::string name = lx.name();
                if (net.find_place(name) || net.find_transition(name))
                    lx.fail_at(name_col, "duplicate identifier '" + name + "'");
                lx.expect(":");
                Bag pre;
                if (!lx.accept("->")) {
                    pre = parse_bag(lx, net);
                    lx.expect("->");
                }
                Bag post = parse_bag(lx, net);
                net.add_transition(name, std::move(pre), std::move(post));
            } else {
                lx.fail_at(kw_col, "expected 'place' or 'trans'");
            }
            if (!lx.at_end()) lx.fail("unexpected trailing input");
        }
        if (end == text.size()) break;
    }
    return net;
}

static void write_bag(std::ostream& os, const PetriNet& net, const Bag& bag) {
    bool first = true;
    for (auto [p, w] : bag) {
        os << (first ? "" : ", ");
        if (w != 1) os << w << '*';
        os << net.places[p];
        first = false;
    }
}

std::string serialize_net(const PetriNet& net) {
    std::ostringstream os;
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        os << "place " << net.places[p];
        if (net.initial == p) os << " initial";
        if (net.final == p) os << " final";
        os << '\n';
    }
    for (std::size_t t = 0; t < net.num_transitions(); ++t) {
        os << "trans " << net.transitions[t] << " : ";
        write_bag(os, net, net.pre[t]);
        os << (net.pre[t].empty() ? "-> " : " -> ");
        write_bag(os, net, net.post[t]);
        os << '\n';
    }
    std::string s = os.str();
    // "a -> " with an empty post bag leaves a trailing blank
    std::string out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

// ---- workflow structure ----

WorkflowNet validate_workflow(const PetriNet& net, std::size_t i, std::size_t f) {
    const std::size_t np = net.num_places();
    const std::size_t nt = net.num_transitions();
    if (i >= np || f >= np || i == f)
        throw WorkflowError(WorkflowFault::BadEndpoints, "", "initial and final must be distinct places");
    for (std::size_t t = 0; t < nt; ++t) {
        if (net.post_at(t, i) != 0)
            throw WorkflowError(WorkflowFault::ProducesIntoInitial, net.transitions[t],
                                "transition '" + net.transitions[t] + "' produces into the initial place");
        if (net.pre_at(t, f) != 0)
            throw WorkflowError(WorkflowFault::ConsumesFromFinal, net.transitions[t],
                                "transition '" + net.transitions[t] + "' consumes from the final place");
    }
    // nodes 0..np-1 are places, np.. are transitions
    std::vector<std::vector<std::size_t>> succ(np + nt), pred(np + nt);
    for (std::size_t t = 0; t < nt; ++t) {
        for (auto [p, w] : net.pre[t]) {
            succ[p].push_back(np + t);
            pred[np + t].push_back(p);
        }
        for (auto [p, w] : net.post[t]) {
            succ[np + t].push_back(p);
            pred[p].push_back(np + t);
        }
    }
    auto sweep = [&](std::size_t from, const std::vector<std::vector<std::size_t>>& adj) {
        std::vector<char> seen(np + nt, 0);
        std::deque<std::size_t> q{from};
        seen[from] = 1;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop_front();
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
        }
        return seen;
    };
    auto fwd = sweep(i, succ);
    auto bwd = sweep(f, pred);
    for (std::size_t v = 0; v < np + nt; ++v) {
        if (fwd[v] && bwd[v]) continue;
        const std::string& name = v < np ? net.places[v] : net.transitions[v - np];
        throw WorkflowError(WorkflowFault::NotOnPath, name,
                            "'" + name + "' is not on a path from the initial to the final place");
    }
    WorkflowNet wf{net, i, f};
    wf.net.initial = i;
    wf.net.final = f;
    return wf;
}

WorkflowNet validate_workflow(const PetriNet& net) {
    if (!net.initial || !net.final)
        throw WorkflowError(WorkflowFault::BadEndpoints, "", "net lacks an initial or a final place");
    return validate_workflow(net, *net.initial, *net.final);
}

WorkflowNet parse_workflow(std::string_view text) { return validate_workflow(parse_net(text)); }

// ---- markings and firing ----

Marking unit_marking(const PetriNet& net, std::size_t p, std::int64_t count) {
    Marking m(net.num_places(), 0);
    m.at(p) = count;
    return m;
}

Marking make_marking(const PetriNet& net, const std::vector<std::pair<std::string, std::int64_t>>& items) {
    Marking m(net.num_places(), 0);
    for (const auto& [name, c] : items) m[net.place(name)] = checked_add(m[net.place(name)], c);
    return m;
}

std::string format_marking(const PetriNet& net, const std::vector<std::int64_t>& m) {
    std::string s = "{";
    bool first = true;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (m[p] == 0) continue;
        s += (first ? "" : ", ") + net.places[p] + ":" + std::to_string(m[p]);
        first = false;
    }
    return s + "}";
}

std::int64_t marking_norm(const std::vector<std::int64_t>& m) {
    std::int64_t n = 0;
    for (auto v : m) n = std::max(n, v < 0 ? -v : v);
    return n;
}

bool enabled(const PetriNet& net, const Marking& m, std::size_t t) {
    for (auto [p, w] : net.pre[t])
        if (m[p] < w) return false;
    return true;
}

ZMarking z_fire(const PetriNet& net, const ZMarking& m, std::size_t t) {
    ZMarking r = m;
    for (auto [p, w] : net.pre[t]) r[p] = checked_add(r[p], -w);
    for (auto [p, w] : net.post[t]) r[p] = checked_add(r[p], w);
    return r;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
    for (auto [p, w] : net.pre[t])
        if (m[p] < w)
            throw NotEnabled(t, p, "transition '" + net.transitions[t] + "' is not enabled: place '" +
                                       net.places[p] + "' is short");
    return z_fire(net, m, t);
}

RunResult apply_run(const PetriNet& net, const std::vector<std::int64_t>& m, const Run& run,
                    Semantics semantics) {
    RunResult r;
    r.trace.push_back(m);
    std::vector<std::int64_t> cur = m;
    for (std::size_t k = 0; k < run.size(); ++k) {
        std::size_t t = run[k];
        if (semantics == Semantics::N && !enabled(net, cur, t))
            throw NotEnabledAt(k, t, "step " + std::to_string(k) + ": transition '" + net.transitions[t] +
                                         "' is not enabled");
        cur = z_fire(net, cur, t);
        r.trace.push_back(cur);
    }
    r.final = std::move(cur);
    return r;
}

Run parse_run(const PetriNet& net, const std::vector<std::string>& names) {
    Run r;
    for (const auto& n : names) r.push_back(net.transition(n));
    return r;
}

std::vector<std::string> run_names(const PetriNet& net, const Run& run) {
    std::vector<std::string> out;
    for (auto t : run) out.push_back(net.transitions.at(t));
    return out;
}

}  // namespace wfs
