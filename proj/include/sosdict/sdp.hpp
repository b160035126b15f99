#pragma once
//
// sosdict/sdp.hpp
//
// Small dense semidefinite feasibility/optimization problems over a block
// PSD cone, solved by operator splitting (ADMM): alternate projection onto
// the affine constraint subspace with projection onto the PSD cone through
// a scaled dual. No external solver; everything is deterministic.
//

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace sosdict {

struct SdpEntry {
    int block = 0;
    int row = 0;   // row <= col; the coefficient applies to the single
    int col = 0;   // symmetric entry X[row,col] (== X[col,row])
    double coeff = 0.0;
};

struct SdpConstraint {
    std::vector<SdpEntry> entries;
    double rhs = 0.0;
};

struct SdpProblem {
    std::vector<int> block_dims;
    std::vector<SdpConstraint> constraints;
    // linear objective to maximize; empty means pure feasibility
    std::vector<SdpEntry> objective;

    void validate() const;  // throws std::invalid_argument on malformed input
};

enum class SdpStatus { Feasible, Infeasible, Stalled };

struct SdpSolution {
    SdpStatus status = SdpStatus::Stalled;
    std::vector<Eigen::MatrixXd> blocks;

    // certified a posteriori on the returned blocks
    double eps_feasibility = 0.0;  // max |<F_i, X> - b_i|
    double eps_psd = 0.0;          // max(0, -lambda_min) over blocks

    // evidence when status == Infeasible: either the residual of an
    // inconsistent affine system, or the normalized dual improving ray value
    double infeasibility_evidence = 0.0;

    std::optional<double> objective_value;
    long iterations = 0;
    std::string condition_warning;  // nonempty if the constraint Gram factor
                                    // looked numerically rank-deficient
};

struct SdpOptions {
    double tol = 1e-7;
    long max_iters = 200000;
};

// evaluate one constraint functional on candidate blocks
double constraint_value(const SdpConstraint& c, const std::vector<Eigen::MatrixXd>& blocks);

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace sosdict
