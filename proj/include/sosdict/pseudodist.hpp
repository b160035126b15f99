#pragma once
//
// sosdict/pseudodist.hpp
//
// Pseudo-distributions of bounded degree: linear functionals on low-degree
// polynomials that are normalized, consistent, and positive on squares up
// to a reported tolerance. Searching for one under polynomial constraints
// is a moment-matrix SDP; actual distributions embed exactly.
//

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sosdict/polynomial.hpp"
#include "sosdict/rng.hpp"
#include "sosdict/sdp.hpp"

namespace sosdict {

struct ConstraintSet {
    int nvars = 0;
    std::vector<PolyF> equalities;    // each P, read as P = 0
    std::vector<PolyF> inequalities;  // each P, read as P >= 0
    bool unit_sphere = false;         // appends ||u||_2^2 - 1 = 0
};

class PseudoDistribution {
public:
    PseudoDistribution(int nvars, int degree, std::map<MultiIndex, double> moments);

    int nvars() const { return nvars_; }
    int degree() const { return degree_; }

    double moment(const MultiIndex& alpha) const;
    const std::map<MultiIndex, double>& moments() const { return moments_; }

    const std::vector<MultiIndex>& basis() const { return basis_; }
    const Eigen::MatrixXd& moment_matrix() const { return matrix_; }

    // max(0, -lambda_min) of the moment matrix, recomputed at construction
    double eps_psd() const { return eps_psd_; }

    // solver metadata carried along when the object came out of find()
    double solver_tol = 0.0;
    double solver_eps_feasibility = 0.0;

private:
    int nvars_;
    int degree_;
    std::map<MultiIndex, double> moments_;
    std::vector<MultiIndex> basis_;
    Eigen::MatrixXd matrix_;
    double eps_psd_;
};

// embed a finitely supported distribution given as (weight, point) pairs;
// weights must be nonnegative with positive sum and are normalized
PseudoDistribution from_distribution(std::span<const std::pair<double, Eigen::VectorXd>> support,
                                     int degree);

// apply the functional to a polynomial of degree <= pd.degree()
double pexpect(const PseudoDistribution& pd, const PolyF& p);

struct FindResult {
    std::optional<PseudoDistribution> pd;  // empty means NotFound
    SdpStatus sdp_status = SdpStatus::Stalled;
    double infeasibility_evidence = 0.0;
    long iterations = 0;

    bool found() const { return pd.has_value(); }
};

// search for a degree-k pseudo-distribution satisfying the constraints,
// optionally maximizing the expectation of an objective polynomial
FindResult find(const ConstraintSet& constraints, const std::optional<PolyF>& objective,
                int degree, const SdpOptions& options = {});

// condition on a nonnegative weight polynomial: moments become
// E[W u^a] / E[W] at degree k - deg W. Returns nullopt when E[W] is below
// degenerate_tol. W must be a certified sum of squares unless the caller
// vouches for it (products of squares built in code are trusted).
std::optional<PseudoDistribution> reweigh(const PseudoDistribution& pd, const PolyF& weight,
                                          bool weight_is_sos_by_construction,
                                          double degenerate_tol = 1e-9);

// Gaussian with the same first two moments as the pseudo-distribution
class GaussianSampler {
public:
    GaussianSampler(Eigen::VectorXd mean, Eigen::MatrixXd factor, Rng rng)
        : mean_(std::move(mean)), factor_(std::move(factor)), rng_(rng) {}

    const Eigen::VectorXd& mean() const { return mean_; }
    // covariance factor F with Cov = F F^T
    const Eigen::MatrixXd& factor() const { return factor_; }

    Eigen::VectorXd draw();

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
    Rng rng_;
};

// psd_clip_tol: eigenvalues of the covariance in [-psd_clip_tol, 0) are
// clipped to zero; anything lower throws std::domain_error
GaussianSampler gaussian_match(const PseudoDistribution& pd, std::uint64_t seed,
                               double psd_clip_tol = 1e-7);

}  // namespace sosdict
