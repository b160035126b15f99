#pragma once
//
// sosdict/dictgen.hpp
//
// Ground truth for experiments: random dictionaries with unit columns,
// sparse coefficient distributions with normalized d-th moments, sample
// synthesis y = Ax, the empirical degree-d polynomial, and a spectral
// certificate that the empirical polynomial is close to the dictionary
// norm polynomial.
//

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sosdict/decomp.hpp"
#include "sosdict/polynomial.hpp"
#include "sosdict/rng.hpp"

namespace sosdict {

struct Dictionary {
    Eigen::MatrixXd A;          // n x m, unit columns
    double sigma = 1.0;         // top eigenvalue of A^T A
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(A.cols()); }
};

// i.i.d. Gaussian columns normalized to unit length; orthonormalize runs
// a QR pass instead and requires m <= n
Dictionary gen_dictionary(int n, int m, std::uint64_t seed, bool orthonormalize = false);

struct NiceSpec {
    int d = 4;          // even moment degree with E x_i^d = 1
    double tau = 0.1;   // sparsity level, in (0, 1)
};

// Bernoulli(tau) mask times a Gaussian scaled so that E x_i^d = 1
// (scale from the standard normal double-factorial moment)
Eigen::VectorXd sample_x(const NiceSpec& spec, int m, Rng& rng);

struct NicenessReport {
    long samples = 0;
    std::vector<double> coord_dth;      // per-coordinate mean of x_i^d
    std::vector<double> coord_dth_se;
    std::vector<double> coord_2dth;     // per-coordinate mean of x_i^{2d}
    double max_pair = 0.0;              // largest mean of x_i^{d/2} x_j^{d/2}, i < j
    double max_pair_se = 0.0;
    double max_nonsquare = 0.0;         // largest |mean| over monomials of degree
    double max_nonsquare_se = 0.0;      // 1..d with some odd exponent
    bool nice = false;  // d-th moments at 1 and non-square moments at 0, within 3 SE
};

NicenessReport niceness_estimate(const std::function<Eigen::VectorXd()>& sampler, int d, long N);

// (1/N) sum of <y_i, u>^d, assembled densely over the degree-d monomials
PolyF empirical_poly(std::span<const Eigen::VectorXd> samples, int d);

// Flattening operator norm of P - ||A^T u||_d^d: a certificate that both
// P - ||A^T u||_d^d and its negation are dominated by tau_hat ||u||_2^d.
// With sos_cross_check the domination is re-proved by an explicit
// sum-of-squares decomposition (slow; meant for tests).
double certify_closeness(const PolyF& P, const Eigen::MatrixXd& A, int d,
                         bool sos_cross_check = false);

// build the empirical polynomial from samples and run the requested
// decomposition driver on it
RecoveredSet learn(std::span<const Eigen::VectorXd> samples, int d, const DecompConfig& cfg,
                   bool refined = false);

}  // namespace sosdict
