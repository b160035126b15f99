#pragma once
//
// sosdict/sampler.hpp
//
// Rounding machinery: random product-of-squares reweighing polynomials,
// truncated-Gaussian conditioning thresholds, candidate extraction from a
// pseudo-distribution, and a second-moment tail gate used by the test
// suite. A reweigh polynomial concentrates the functional near one hidden
// direction; extraction reads that direction back out of degree-2 moments.
//

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sosdict/pseudodist.hpp"
#include "sosdict/rng.hpp"

namespace sosdict {

// W(u) = scale * prod_j <factors[j], u>^2, a sum of squares by construction
struct ReweighPoly {
    std::vector<Eigen::VectorXd> factors;
    double scale = 1.0;

    int nvars() const { return factors.empty() ? 0 : static_cast<int>(factors.front().size()); }
    int degree() const { return 2 * static_cast<int>(factors.size()); }

    PolyF as_polynomial() const;
};

// solve E[g^2 | g >= tau] = M for a standard Gaussian g, to absolute
// tolerance 1e-9. The conditional second moment is 1 at the origin and
// grows without bound, so the root is positive and satisfies tau <= M.
// M <= 1 has no solution and throws std::domain_error.
double tau_threshold(double M);

// conditional second moment E[g^2 | g >= t] itself, exposed for tests
double truncated_second_moment(double t);

// Draw a reweigh polynomial with t independent Gaussian factors and scale
// 1/M^t. When conditioned_on holds a unit vector c, the component of each
// factor along c is forced above tau_{M+1} (a truncated normal along c
// with the orthogonal part untouched samples exactly the law of a full
// Gaussian resampled until <c, xi> clears the threshold).
ReweighPoly draw_reweigh_poly(int n, int t, double M,
                              const std::optional<Eigen::VectorXd>& conditioned_on, Rng& rng);

// Reweigh polynomial built from data samples instead of random Gaussians;
// factors are the sample vectors themselves. Zero samples are rejected.
ReweighPoly refined_reweigh_poly(std::span<const Eigen::VectorXd> samples, double M_scale);

enum class ExtractStrategy {
    Eigenvector,     // top eigenvector of [E W(u) u_i u_j]
    GaussianSample,  // reweigh by W, then one draw from the matched Gaussian
};

// Read a candidate direction out of the pseudo-distribution. Requires
// pd.degree() >= W.degree() + 2 for either strategy. Returns a unit vector
// with its largest-magnitude coordinate made positive, or nullopt when the
// reweighed moments carry no signal.
std::optional<Eigen::VectorXd> extract_candidate(const PseudoDistribution& pd,
                                                 const ReweighPoly& W,
                                                 ExtractStrategy strategy = ExtractStrategy::Eigenvector,
                                                 std::uint64_t seed = 0);

struct SampleParams {
    double epsilon = 0.1;       // informational; drives default M below
    int reweigh_degree = 2;     // even, >= 2; the polynomial has degree/2 factors
    double M = 1.0;             // scale divisor and conditioning level
    int retries = 1;            // 0 means give up immediately
    std::uint64_t seed = 0;
};

// default conditioning level (1/eps) * ln(1/eps), growing as the target
// accuracy tightens
double default_conditioning(double epsilon);

struct SampleOutcome {
    std::optional<Eigen::VectorXd> vector;  // empty means Exhausted
    int accepted_retry = -1;
    int attempts = 0;

    bool exhausted() const { return !vector.has_value(); }
};

// Repeat up to params.retries times: draw an unconditioned reweigh
// polynomial, extract a candidate, accept the first whose score clears the
// threshold. Each retry runs on an independently derived RNG stream, so
// the accepted candidate is reproducible from (seed, retry index) alone.
SampleOutcome sample_unit(const PseudoDistribution& pd, const SampleParams& params,
                          const std::function<double(const Eigen::VectorXd&)>& score,
                          double threshold,
                          ExtractStrategy strategy = ExtractStrategy::Eigenvector);

// Empirical check of the small-ratio tail bound: for paired samples with
// 0 <= A_i <= B_i, estimate t = E[B^2]/(E B)^2 and test whether the
// frequency of {A <= e^delta * eps * B} reaches delta^2/(9t) minus three
// binomial standard errors. premise_holds reports E A <= eps E B (plus
// three standard errors of slack); pass is only meaningful when it holds.
struct GateReport {
    bool premise_holds = false;
    double t_hat = 0.0;
    double frequency = 0.0;
    double bound = 0.0;
    bool pass = false;
};

GateReport second_moment_gate(std::span<const double> a_vals, std::span<const double> b_vals,
                              double eps, double delta);

}  // namespace sosdict
