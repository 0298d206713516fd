#include "wfs/ilp.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace wfs {

using boost::multiprecision::cpp_rational;

void IntegerProgram::add_row(std::vector<std::int64_t> coeffs, std::int64_t rhs, std::string label) {
    coeffs.resize(variables.size(), 0);
    A.push_back(std::move(coeffs));
    b.push_back(rhs);
    row_labels.push_back(std::move(label));
}

BigInt IntegerProgram::norm() const {
    BigInt na = 0, nb = 0;
    for (const auto& row : A)
        for (auto a : row) na = std::max(na, BigInt(abs(BigInt(a))));
    for (auto v : b) nb = std::max(nb, BigInt(abs(BigInt(v))));
    return na + nb + rows() + cols();
}

bool IntegerProgram::satisfied_by(const std::vector<std::int64_t>& x) const {
    if (x.size() != cols()) return false;
    for (auto v : x)
        if (v < 0) return false;
    for (std::size_t j = 0; j < rows(); ++j) {
        BigInt s = 0;
        for (std::size_t i = 0; i < cols(); ++i) s += BigInt(A[j][i]) * x[i];
        if (s < b[j]) return false;
    }
    return true;
}

std::string IntegerProgram::to_text() const {
    std::ostringstream os;
    for (std::size_t j = 0; j < rows(); ++j) {
        for (auto a : A[j]) os << a << ' ';
        os << ">= " << b[j] << '\n';
    }
    return os.str();
}

static std::vector<std::string> tau_names(const WorkflowNet& wf) {
    std::vector<std::string> v{"kappa"};
    for (const auto& t : wf.net.transitions) v.push_back("tau_" + t);
    return v;
}

IntegerProgram build_ilp_n(const WorkflowNet& wf) {
    const PetriNet& net = wf.net;
    const std::size_t nt = net.num_transitions();
    IntegerProgram g;
    g.variables = tau_names(wf);
    std::vector<std::vector<std::int64_t>> delta;
    for (std::size_t t = 0; t < nt; ++t) delta.push_back(net.effect(t));
    auto place_row = [&](std::size_t p) {
        std::vector<std::int64_t> row(nt + 1, 0);
        for (std::size_t t = 0; t < nt; ++t) row[t + 1] = delta[t][p];
        return row;
    };
    auto r1 = place_row(wf.i());
    r1[0] = 1;
    g.add_row(r1, 0, "(1) " + net.places[wf.i()]);
    std::vector<std::int64_t> k(nt + 1, 0);
    k[0] = 1;
    g.add_row(k, 1, "(2) kappa");
    for (std::size_t p = 0; p < net.num_places(); ++p)
        if (p != wf.i()) g.add_row(place_row(p), 0, "(3) " + net.places[p]);
    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<std::int64_t> row(nt + 1, 0);
        row[t + 1] = 1;
        g.add_row(row, 0, "(4) " + net.transitions[t]);
    }
    return g;
}

IntegerProgram build_ilp_s(const WorkflowNet& wf) {
    const PetriNet& net = wf.net;
    const std::size_t nt = net.num_transitions();
    IntegerProgram g;
    g.variables = tau_names(wf);
    std::vector<std::vector<std::int64_t>> delta;
    for (std::size_t t = 0; t < nt; ++t) delta.push_back(net.effect(t));
    for (std::size_t p = 0; p < net.num_places(); ++p) {
        std::vector<std::int64_t> row(nt + 1, 0);
        row[0] = (p == wf.i() ? 1 : 0) - (p == wf.f() ? 1 : 0);
        for (std::size_t t = 0; t < nt; ++t) row[t + 1] = delta[t][p];
        std::vector<std::int64_t> neg(row.size());
        std::transform(row.begin(), row.end(), neg.begin(), [](auto v) { return -v; });
        g.add_row(row, 0, "eq+ " + net.places[p]);
        g.add_row(neg, 0, "eq- " + net.places[p]);
    }
    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<std::int64_t> row(nt + 1, 0);
        row[t + 1] = 1;
        g.add_row(row, 0, "nonneg " + net.transitions[t]);
    }
    std::vector<std::int64_t> k(nt + 1, 0);
    k[0] = 1;
    g.add_row(k, 1, "kappa");
    return g;
}

IntegerProgram slack_extended(const IntegerProgram& g) {
    const std::size_t m = g.rows(), n = g.cols();
    IntegerProgram h;
    h.variables = g.variables;
    for (std::size_t j = 0; j < m; ++j) h.variables.push_back("y_" + std::to_string(j + 1));
    for (std::size_t j = 0; j < m; ++j) h.add_row(g.A[j], g.b[j], g.row_labels[j]);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::int64_t> row(n + m, 0);
        std::copy(g.A[j].begin(), g.A[j].end(), row.begin());
        row[n + j] = -1;
        std::vector<std::int64_t> neg(row.size());
        std::transform(row.begin(), row.end(), neg.begin(), [](auto v) { return -v; });
        h.add_row(row, 0, "slack+ " + std::to_string(j + 1));
        h.add_row(neg, 0, "slack- " + std::to_string(j + 1));
    }
    return h;
}

ZMarking marking_of(const WorkflowNet& wf, const std::vector<std::int64_t>& mu) {
    ZMarking m(wf.net.num_places(), 0);
    m[wf.i()] = mu.at(0);
    for (std::size_t t = 0; t < wf.net.num_transitions(); ++t) {
        if (mu[t + 1] == 0) continue;
        for (auto [p, w] : wf.net.pre[t]) m[p] = checked_add(m[p], -checked_mul(w, mu[t + 1]));
        for (auto [p, w] : wf.net.post[t]) m[p] = checked_add(m[p], checked_mul(w, mu[t + 1]));
    }
    return m;
}

// ---- box search ----

namespace {

using i128 = __int128;

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

class BoxSearch {
public:
    BoxSearch(const IntegerProgram& g, std::size_t budget) : g_(g), budget_(budget) {}

    void run(const std::vector<std::int64_t>& box,
             const std::function<bool(const std::vector<std::int64_t>&)>& visit) {
        std::vector<i128> lo(g_.cols(), 0), hi(g_.cols());
        for (std::size_t i = 0; i < g_.cols(); ++i) hi[i] = box.at(i);
        visit_ = &visit;
        dfs(lo, hi);
    }

    std::size_t nodes = 0;

private:
    // tightens bounds row by row; false when some row cannot be met
    bool propagate(std::vector<i128>& lo, std::vector<i128>& hi) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo[i] > hi[i]) return false;
        for (int round = 0; round < 64; ++round) {
            bool changed = false;
            for (std::size_t j = 0; j < g_.rows(); ++j) {
                const auto& a = g_.A[j];
                i128 maxsum = 0;
                for (std::size_t i = 0; i < a.size(); ++i)
                    if (a[i] != 0) maxsum += std::max(a[i] * lo[i], a[i] * hi[i]);
                if (maxsum < g_.b[j]) return false;
                for (std::size_t k = 0; k < a.size(); ++k) {
                    if (a[k] == 0) continue;
                    i128 others = maxsum - std::max(a[k] * lo[k], a[k] * hi[k]);
                    i128 need = g_.b[j] - others;
                    if (a[k] > 0) {
                        i128 nl = ceil_div(need, a[k]);
                        if (nl > lo[k]) {
                            lo[k] = nl;
                            changed = true;
                        }
                    } else {
                        i128 nh = floor_div(-need, -a[k]);
                        if (nh < hi[k]) {
                            hi[k] = nh;
                            changed = true;
                        }
                    }
                    if (lo[k] > hi[k]) return false;
                }
            }
            if (!changed) break;
        }
        return true;
    }

    bool dfs(std::vector<i128> lo, std::vector<i128> hi) {
        if (++nodes > budget_) throw BoxTooLarge();
        if (!propagate(lo, hi)) return true;
        std::size_t k = 0;
        while (k < lo.size() && lo[k] == hi[k]) ++k;
        if (k == lo.size()) {
            std::vector<std::int64_t> x(lo.begin(), lo.end());
            if (!g_.satisfied_by(x)) return true;
            return (*visit_)(x);
        }
        for (i128 v = lo[k]; v <= hi[k]; ++v) {
            auto l2 = lo, h2 = hi;
            l2[k] = h2[k] = v;
            if (!dfs(std::move(l2), std::move(h2))) return false;
        }
        return true;
    }

    const IntegerProgram& g_;
    std::size_t budget_;
    const std::function<bool(const std::vector<std::int64_t>&)>* visit_ = nullptr;
};

}  // namespace

void enumerate_box(const IntegerProgram& g, const std::vector<std::int64_t>& box,
                   const std::function<bool(const std::vector<std::int64_t>&)>& visit, std::size_t node_budget) {
    BoxSearch s(g, node_budget);
    s.run(box, visit);
}

std::optional<std::vector<std::int64_t>> solve_box_bounded(const IntegerProgram& g,
                                                           const std::vector<std::int64_t>& box,
                                                           std::size_t node_budget, BoxSearchStats* stats) {
    std::optional<std::vector<std::int64_t>> found;
    BoxSearch s(g, node_budget);
    s.run(box, [&](const std::vector<std::int64_t>& x) {
        found = x;
        return false;
    });
    if (stats) stats->nodes = s.nodes;
    return found;
}

// ---- homogeneous cone, Fourier-Motzkin over the rationals ----

namespace {

// sum a[i] x[i] >= c, kept primitive
struct FmRow {
    std::vector<BigInt> a;
    BigInt c;
    bool operator<(const FmRow& o) const { return std::tie(a, c) < std::tie(o.a, o.c); }
};

FmRow primitive(FmRow r) {
    BigInt g = abs(r.c);
    for (const auto& v : r.a) g = gcd(g, abs(v));
    if (g > 1) {
        for (auto& v : r.a) v /= g;
        r.c /= g;
    }
    return r;
}

}  // namespace

// sum a[i] x[i] >= c over the rationals; returns some solution or nullopt when infeasible
static std::optional<std::vector<cpp_rational>> fm_solve(std::vector<FmRow> input, std::size_t nvars) {
    std::set<FmRow> start;
    for (auto& r : input) start.insert(primitive(std::move(r)));
    std::vector<FmRow> cur(start.begin(), start.end());
    std::vector<std::vector<FmRow>> stages;
    std::vector<std::size_t> order;
    std::vector<bool> gone(nvars, false);
    for (std::size_t step = 0; step < nvars; ++step) {
        std::size_t best = nvars, best_cost = 0;
        for (std::size_t k = 0; k < nvars; ++k) {
            if (gone[k]) continue;
            std::size_t pos = 0, neg = 0;
            for (const auto& r : cur) {
                if (r.a[k] > 0) ++pos;
                if (r.a[k] < 0) ++neg;
            }
            if (best == nvars || pos * neg < best_cost) {
                best = k;
                best_cost = pos * neg;
            }
        }
        stages.push_back(cur);
        order.push_back(best);
        gone[best] = true;
        std::set<FmRow> next;
        std::vector<const FmRow*> pos, neg;
        for (const auto& r : cur) {
            if (r.a[best] > 0) pos.push_back(&r);
            else if (r.a[best] < 0) neg.push_back(&r);
            else next.insert(r);
        }
        for (const FmRow* p : pos)
            for (const FmRow* n : neg) {
                BigInt lp = -n->a[best], ln = p->a[best];
                FmRow r{std::vector<BigInt>(nvars), lp * p->c + ln * n->c};
                for (std::size_t i = 0; i < nvars; ++i) r.a[i] = lp * p->a[i] + ln * n->a[i];
                next.insert(primitive(r));
            }
        if (next.size() > 2'000'000) throw NetError("variable elimination blew up");
        cur.assign(next.begin(), next.end());
    }
    for (const auto& r : cur)
        if (r.c > 0) return std::nullopt;

    std::vector<cpp_rational> x(nvars, 0);
    for (std::size_t s = nvars; s-- > 0;) {
        std::size_t k = order[s];
        std::optional<cpp_rational> lo, hi;
        for (const auto& r : stages[s]) {
            if (r.a[k] == 0) continue;
            cpp_rational rest = 0;
            for (std::size_t i = 0; i < nvars; ++i)
                if (i != k && r.a[i] != 0) rest += cpp_rational(r.a[i]) * x[i];
            cpp_rational bound = (cpp_rational(r.c) - rest) / cpp_rational(r.a[k]);
            if (r.a[k] > 0) {
                if (!lo || bound > *lo) lo = bound;
            } else if (!hi || bound < *hi) {
                hi = bound;
            }
        }
        x[k] = lo ? *lo : hi ? std::min(*hi, cpp_rational(0)) : cpp_rational(0);
    }
    return x;
}

// scales a rational point of a cone to a primitive integer point
static std::vector<std::int64_t> clear_denominators(const std::vector<cpp_rational>& x) {
    BigInt l = 1;
    for (const auto& v : x) l = lcm(l, denominator(v));
    std::vector<BigInt> big;
    BigInt g = 0;
    for (const auto& v : x) {
        big.push_back(numerator(v) * (l / denominator(v)));
        g = gcd(g, abs(big.back()));
    }
    std::vector<std::int64_t> out;
    for (auto& v : big) {
        if (g > 1) v /= g;
        if (abs(v) > BigInt(INT64_MAX)) throw OverflowError();
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

std::optional<std::vector<std::int64_t>> homogeneous_witness(const PetriNet& net) {
    const std::size_t nt = net.num_transitions(), np = net.num_places();
    if (nt == 0) return std::nullopt;
    std::vector<FmRow> rows;
    for (std::size_t t = 0; t < nt; ++t) {
        FmRow r{std::vector<BigInt>(nt, 0), 0};
        r.a[t] = 1;
        rows.push_back(r);
    }
    FmRow total{std::vector<BigInt>(nt, 0), 1};
    for (std::size_t p = 0; p < np; ++p) {
        FmRow r{std::vector<BigInt>(nt, 0), 0};
        for (std::size_t t = 0; t < nt; ++t) {
            std::int64_t d = net.post_at(t, p) - net.pre_at(t, p);
            r.a[t] = d;
            total.a[t] += d;
        }
        rows.push_back(r);
    }
    rows.push_back(total);
    auto x = fm_solve(std::move(rows), nt);
    if (!x) return std::nullopt;
    return clear_denominators(*x);
}

std::optional<std::vector<std::int64_t>> ilp_s_solution(const WorkflowNet& wf,
                                                       std::optional<std::size_t> using_transition) {
    IntegerProgram g = build_ilp_s(wf);
    if (using_transition) {
        std::vector<std::int64_t> row(g.cols(), 0);
        row[1 + *using_transition] = 1;
        g.add_row(row, 1, "use " + wf.net.transitions[*using_transition]);
    }
    std::vector<FmRow> rows;
    for (std::size_t j = 0; j < g.rows(); ++j) {
        FmRow r{std::vector<BigInt>(g.cols()), g.b[j]};
        for (std::size_t i = 0; i < g.cols(); ++i) r.a[i] = g.A[j][i];
        rows.push_back(r);
    }
    auto x = fm_solve(std::move(rows), g.cols());
    if (!x) return std::nullopt;
    // every row except the >= 1 bounds is homogeneous, so scaling keeps feasibility
    auto sol = clear_denominators(*x);
    if (sol[0] < 1 || !g.satisfied_by(sol)) throw std::logic_error("scaled ILP^s point is not a solution");
    return sol;
}

}  // namespace wfs
