#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wfs/core.hpp"

namespace wfs {

// A * x >= b over nonnegative integer variables; equalities are stored as two rows
struct IntegerProgram {
    std::vector<std::vector<std::int64_t>> A;
    std::vector<std::int64_t> b;
    std::vector<std::string> variables;
    std::vector<std::string> row_labels;

    std::size_t rows() const { return A.size(); }
    std::size_t cols() const { return variables.size(); }
    void add_row(std::vector<std::int64_t> coeffs, std::int64_t rhs, std::string label);
    // ||A|| + ||b|| + m + n with max-abs norms
    BigInt norm() const;
    bool satisfied_by(const std::vector<std::int64_t>& x) const;
    // one row per line: coefficients, ">=", constant
    std::string to_text() const;
};

class BoxTooLarge : public NetError {
public:
    BoxTooLarge() : NetError("box search exceeded its node budget") {}
};

IntegerProgram build_ilp_n(const WorkflowNet& wf);
IntegerProgram build_ilp_s(const WorkflowNet& wf);
// adds one variable per row together with the equalities sum_i A[j,i] x_i - y_j = 0
IntegerProgram slack_extended(const IntegerProgram& g);

// mu = (kappa, tau_1 .. tau_|T|)
ZMarking marking_of(const WorkflowNet& wf, const std::vector<std::int64_t>& mu);

struct BoxSearchStats {
    std::size_t nodes = 0;
};

std::optional<std::vector<std::int64_t>> solve_box_bounded(const IntegerProgram& g,
                                                           const std::vector<std::int64_t>& box,
                                                           std::size_t node_budget = 5'000'000,
                                                           BoxSearchStats* stats = nullptr);

// calls visit on every solution inside the box in lexicographic order; visit returns false to stop
void enumerate_box(const IntegerProgram& g, const std::vector<std::int64_t>& box,
                   const std::function<bool(const std::vector<std::int64_t>&)>& visit,
                   std::size_t node_budget = 5'000'000);

// tau >= 0, tau != 0 with sum tau[t] * effect(t) >= 0 and != 0, or nullopt when none exists
std::optional<std::vector<std::int64_t>> homogeneous_witness(const PetriNet& net);
inline std::optional<std::vector<std::int64_t>> homogeneous_witness(const WorkflowNet& wf) {
    return homogeneous_witness(wf.net);
}

// some integer solution of ILP^s found through its rational relaxation, which is exact for this cone;
// using_transition additionally asks for tau[t] >= 1
std::optional<std::vector<std::int64_t>> ilp_s_solution(const WorkflowNet& wf,
                                                       std::optional<std::size_t> using_transition = std::nullopt);

}  // namespace wfs
