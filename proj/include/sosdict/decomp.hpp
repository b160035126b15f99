#pragma once
//
// sosdict/decomp.hpp
//
// Iterative decomposition drivers. Each round finds a pseudo-distribution
// concentrated where the input polynomial is large, rounds a unit vector
// out of it, and adds a separation constraint so the next round looks
// elsewhere. The refined variant swaps random Gaussian reweighing for
// products built from data samples.
//

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sosdict/pseudodist.hpp"
#include "sosdict/sampler.hpp"

namespace sosdict {

struct DecompConfig {
    int d = 4;           // degree of the input polynomial, even
    int k = 4;           // moment degree of the search, even, >= d
    double epsilon = 0.1;
    double gamma = -1.0;       // separation; negative means 20 * epsilon
    double gamma_cap = 0.5;    // effective separation is min(gamma, cap)
    double tau = 0.0;          // noise level of the input polynomial
    int max_columns = 16;
    double c_sep = 10.0;       // required lower bound on gamma / epsilon
    // feasibility threshold for the constraint P >= value; defaults to
    // 1 - tau when unset
    std::optional<double> pd_threshold;
    SampleParams sampler;      // reweigh_degree is overridden to k - 2
    SdpOptions sdp;
    ExtractStrategy strategy = ExtractStrategy::Eigenvector;
};

enum class TerminationReason {
    NoPseudoDistribution,  // constraints became infeasible: the clean stop
    SolverStalled,         // solver gave up without a verdict; inconclusive
    MaxColumns,            // hit the configured column budget
    RoundingExhausted,     // a pseudo-distribution existed but rounding failed
};

const char* to_string(TerminationReason reason);
std::optional<TerminationReason> termination_from_string(std::string_view label);

struct RecoveredVector {
    Eigen::VectorXd v;      // unit vector
    double score = 0.0;     // input polynomial evaluated at v
    int iteration = 0;      // outer loop round that produced it
    int accepted_retry = 0; // retry index that won inside that round
};

struct RecoveredSet {
    std::vector<RecoveredVector> vectors;
    TerminationReason reason = TerminationReason::NoPseudoDistribution;
};

// squared cosine similarity, invariant under sign and scale
double correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& a);

RecoveredSet decompose(const PolyF& P, const DecompConfig& cfg);

// Refined driver: retry i builds its reweigh polynomial from the i-th
// batch of (k-2)/2 consecutive samples. The pool must hold at least
// retries such batches.
struct InsufficientSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RecoveredSet decompose_refined(const PolyF& P, std::span<const Eigen::VectorXd> samples,
                               const DecompConfig& cfg);

struct ClosenessReport {
    bool close = false;
    double worst_cor = 0.0;
    // index pair of the worst match; worst_in_first says which set the
    // poorly matched vector came from
    int worst_index = -1;
    int worst_match = -1;
    bool worst_in_first = true;
};

// symmetric closeness: every vector of each set has a partner in the
// other with correlation at least 1 - eps
ClosenessReport check_closeness(std::span<const Eigen::VectorXd> S,
                                std::span<const Eigen::VectorXd> T, double eps);

// Degree lift of an attained norm value: from E ||A^T u||_d^d >= e^{-delta d}
// conclude E-level evidence ||A^T u||_k^k >= e^{-delta' k} with
// delta' = d/(d-2) * delta + log(sigma)/(d-2). Returns e^{-delta' k}.
// Requires k to be a multiple of d - 2.
double holder_degree_lift(double attained, int d, int k, double sigma);

// convenience overload: reads the attained value off the functional
double holder_degree_lift(const PseudoDistribution& pd, const PolyF& norm_poly, int d, int k,
                          double sigma);

}  // namespace sosdict
