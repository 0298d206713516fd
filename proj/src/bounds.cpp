#include "wfs/bounds.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_set>

namespace wfs {

std::int64_t transition_norm(const PetriNet& net) { return net.max_weight(); }

BoundReport bound_placecover(const WorkflowNet& wf) {
    BigInt base = transition_norm(wf.net) + 2;
    return {pow(base, static_cast<unsigned>(wf.net.num_transitions())), "(||T||+2)^|T|", 0, true};
}

BoundReport bound_budget_ell(const WorkflowNet& wf, std::int64_t k) {
    BigInt np = wf.net.num_places();
    BigInt v = bound_placecover(wf).value * std::max(transition_norm(wf.net), k) * np * (np + 2);
    return {v, "(||T||+2)^|T| * max(||T||,k) * |P|(|P|+2)", 0, true};
}

BoundReport bound_z_norm_cap(const WorkflowNet& wf, std::int64_t k) {
    BigInt np = wf.net.num_places();
    BigInt mx = std::max(transition_norm(wf.net), k);
    return {mx * mx * (np + 2) * np, "max(||T||,k)^2 * (|P|+2) * |P|", 0, true};
}

BigInt small_solution_constant(const IntegerProgram& g, unsigned constant) {
    std::size_t mn = g.rows() + g.cols();
    unsigned lg = 0;
    while ((std::size_t{1} << lg) < mn + 2) ++lg;
    return pow(g.norm(), static_cast<unsigned>(constant * mn * lg));
}

static BoundReport k_bound(const WorkflowNet& wf, const IntegerProgram& g, unsigned constant, const char* which) {
    if (constant == 0) throw std::invalid_argument("constant must be positive");
    BigInt c = small_solution_constant(g, constant);
    BigInt np = wf.net.num_places();
    BigInt tn = transition_norm(wf.net);
    BigInt v = c + bound_placecover(wf).value * std::max(tn, c) * np * (np + 2);
    std::string f = std::string("c + (||T||+2)^|T| * max(||T||,c) * |P|(|P|+2), c = ||") + which +
                    "||^(C*(m+n)*ceil(log2(m+n+2)))";
    return {v, f, constant, false};
}

BoundReport bound_generalised_K(const WorkflowNet& wf, unsigned constant) {
    return k_bound(wf, build_ilp_n(wf), constant, "ILP_N");
}

BoundReport bound_structural_K(const WorkflowNet& wf, unsigned constant) {
    return k_bound(wf, build_ilp_s(wf), constant, "ILP^s");
}

// ---- Steinitz reorderings ----

std::int64_t max_norm(const IntVec& v) {
    std::int64_t n = 0;
    for (auto x : v) n = std::max(n, x < 0 ? -x : x);
    return n;
}

namespace {

// depth-first over orders; equal vectors are interchangeable, so only the first unused copy is tried
std::optional<std::vector<std::size_t>> bounded_order(const std::vector<IntVec>& xs, std::size_t d,
                                                      std::int64_t limit) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> first_equal(n);
    for (std::size_t j = 0; j < n; ++j) {
        first_equal[j] = j;
        for (std::size_t k = 0; k < j; ++k)
            if (xs[k] == xs[j]) {
                first_equal[j] = k;
                break;
            }
    }
    std::unordered_set<std::uint64_t> dead;
    std::vector<std::size_t> order;
    IntVec prefix(d, 0);
    std::function<bool(std::uint64_t)> go = [&](std::uint64_t used) {
        if (order.size() == n) return true;
        if (dead.count(used)) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (used >> j & 1) continue;
            // skip j when an earlier equal copy is still unused
            bool skip = false;
            for (std::size_t k = first_equal[j]; k < j && !skip; ++k)
                if (xs[k] == xs[j] && !(used >> k & 1)) skip = true;
            if (skip) continue;
            for (std::size_t q = 0; q < d; ++q) prefix[q] += xs[j][q];
            if (max_norm(prefix) <= limit) {
                order.push_back(j);
                if (go(used | (std::uint64_t{1} << j))) return true;
                order.pop_back();
            }
            for (std::size_t q = 0; q < d; ++q) prefix[q] -= xs[j][q];
        }
        dead.insert(used);
        return false;
    };
    if (go(0)) return order;
    return std::nullopt;
}

void check_dims(const std::vector<IntVec>& xs, std::size_t d) {
    for (const auto& x : xs)
        if (x.size() != d) throw std::invalid_argument("vector of wrong dimension");
}

}  // namespace

std::vector<std::size_t> steinitz_reorder_small(const std::vector<IntVec>& xs, std::size_t d) {
    if (xs.size() > 10 || d > 3) throw ScaleTooLarge();
    check_dims(xs, d);
    IntVec sum(d, 0);
    std::int64_t b = 0;
    for (const auto& x : xs) {
        for (std::size_t q = 0; q < d; ++q) sum[q] += x[q];
        b = std::max(b, max_norm(x));
    }
    if (max_norm(sum) != 0) throw std::invalid_argument("vectors must sum to zero");
    auto order = bounded_order(xs, d, static_cast<std::int64_t>(d) * b);
    if (!order) throw std::logic_error("no bounded reordering found");
    return *order;
}

SteinitzResult steinitz_extended_reorder_small(const std::vector<IntVec>& xs, std::size_t d) {
    if (xs.empty()) throw std::invalid_argument("need at least x_0");
    if (xs.size() > 9 || d > 3) throw ScaleTooLarge();
    check_dims(xs, d);
    const std::size_t n1 = xs.size();
    IntVec z(d, 0);
    std::int64_t b = 0;
    for (const auto& x : xs) {
        for (std::size_t q = 0; q < d; ++q) z[q] += x[q];
        b = std::max(b, max_norm(x));
    }
    const std::int64_t c = max_norm(z);
    if (c > 12) throw ScaleTooLarge();

    SteinitzResult res;
    res.b = b;
    std::vector<std::size_t> positions;  // s_i
    std::vector<std::size_t> perm;
    if (c == 0) {
        perm = *bounded_order(xs, d, static_cast<std::int64_t>(d) * b);
        for (std::size_t i = 0; i < n1; ++i) positions.push_back(i);
    } else {
        // everything scaled by c: the x_j become c*x_j and each -z/c becomes -z
        std::vector<IntVec> items;
        for (const auto& x : xs) {
            IntVec y(d);
            for (std::size_t q = 0; q < d; ++q) y[q] = c * x[q];
            items.push_back(y);
        }
        IntVec mz(d);
        for (std::size_t q = 0; q < d; ++q) mz[q] = -z[q];
        for (std::int64_t k = 0; k < c; ++k) items.push_back(mz);
        auto order = bounded_order(items, d, static_cast<std::int64_t>(d) * b * c);
        if (!order) throw std::logic_error("no bounded reordering found");
        for (std::size_t pos = 0; pos < order->size(); ++pos)
            if ((*order)[pos] < n1) {
                positions.push_back(pos);
                perm.push_back((*order)[pos]);
            }
    }
    for (std::size_t i = 0; i < n1; ++i)
        res.coefficients.push_back(c == 0 ? Rational(0) : Rational(static_cast<std::int64_t>(positions[i] - i), c));
    auto at = std::find(perm.begin(), perm.end(), std::size_t{0});
    std::iter_swap(perm.begin(), at);
    res.permutation = perm;

    std::vector<Rational> prefix(d, 0);
    res.achieved_bound = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t q = 0; q < d; ++q) prefix[q] += xs[perm[i]][q];
        for (std::size_t q = 0; q < d; ++q) {
            Rational dev = prefix[q] - res.coefficients[i] * z[q];
            if (dev < 0) dev = -dev;
            res.achieved_bound = std::max(res.achieved_bound, dev);
        }
    }
    return res;
}

}  // namespace wfs
