#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wfs/core.hpp"
#include "wfs/ilp.hpp"

namespace wfs {

using Rational = boost::multiprecision::cpp_rational;

struct BoundReport {
    BigInt value;
    std::string formula;
    unsigned constant = 0;  // substituted into hidden O() exponents; 0 when unused
    bool exact = true;
};

// max arc weight, the quantity written ||T|| in the soundness bounds
std::int64_t transition_norm(const PetriNet& net);

BoundReport bound_placecover(const WorkflowNet& wf);
BoundReport bound_budget_ell(const WorkflowNet& wf, std::int64_t k);
BoundReport bound_z_norm_cap(const WorkflowNet& wf, std::int64_t k);
// ||G||^(constant * (m+n) * ceil(log2(m+n+2))) for an m x n program
BigInt small_solution_constant(const IntegerProgram& g, unsigned constant);
BoundReport bound_generalised_K(const WorkflowNet& wf, unsigned constant = 1);
BoundReport bound_structural_K(const WorkflowNet& wf, unsigned constant = 1);

class ScaleTooLarge : public NetError {
public:
    ScaleTooLarge() : NetError("instance exceeds the exhaustive search limits") {}
};

using IntVec = std::vector<std::int64_t>;

std::int64_t max_norm(const IntVec& v);

// order with every prefix sum of max-norm at most d * max ||x_i||; inputs must sum to zero
std::vector<std::size_t> steinitz_reorder_small(const std::vector<IntVec>& xs, std::size_t d);

struct SteinitzResult {
    std::vector<std::size_t> permutation;  // permutation[0] == 0
    std::vector<Rational> coefficients;    // nondecreasing, first >= 0
    Rational achieved_bound;               // max_i || prefix_i - c_i z ||
    std::int64_t b = 0;                    // max input norm
};

SteinitzResult steinitz_extended_reorder_small(const std::vector<IntVec>& xs, std::size_t d);

}  // namespace wfs
