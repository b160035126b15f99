#include "sosdict/dictgen.hpp"

#include <cmath>
#include <stdexcept>

#include "sosdict/flattening.hpp"
#include "sosdict/gram.hpp"
#include "sosdict/linear_forms.hpp"
#include "sosdict/rational.hpp"

namespace sosdict {

Dictionary gen_dictionary(int n, int m, std::uint64_t seed, bool orthonormalize) {
    if (n < 1 || m < 1) throw std::invalid_argument("dictionary dimensions must be positive");
    if (orthonormalize && m > n)
        throw std::invalid_argument("cannot orthonormalize more columns than dimensions");
    Rng rng(seed);
    Eigen::MatrixXd G(n, m);
    for (int j = 0; j < m; ++j) {
        do {
            for (int i = 0; i < n; ++i) G(i, j) = rng.gaussian();
        } while (G.col(j).norm() < 1e-12);
    }
    Dictionary dict;
    dict.seed = seed;
    if (orthonormalize) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd Q = qr.householderQ();
        dict.A = Q.leftCols(m);
    } else {
        dict.A = G;
        for (int j = 0; j < m; ++j) dict.A.col(j).normalize();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dict.A.transpose() * dict.A,
                                                      Eigen::EigenvaluesOnly);
    dict.sigma = es.eigenvalues().maxCoeff();
    return dict;
}

Eigen::VectorXd sample_x(const NiceSpec& spec, int m, Rng& rng) {
    if (spec.d < 2 || spec.d % 2 != 0) throw std::invalid_argument("moment degree must be even");
    if (!(spec.tau > 0.0) || spec.tau > 1.0) throw std::invalid_argument("sparsity must lie in (0, 1]");
    if (m < 1) throw std::invalid_argument("dimension must be positive");
    double dth_moment = static_cast<double>(odd_double_factorial(spec.d));
    double scale = std::pow(spec.tau * dth_moment, -1.0 / spec.d);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        // draw the gaussian unconditionally so the stream cost per
        // coordinate is fixed and runs reproduce across tau values
        double z = rng.gaussian();
        if (rng.bernoulli(spec.tau)) x(i) = scale * z;
    }
    return x;
}

NicenessReport niceness_estimate(const std::function<Eigen::VectorXd()>& sampler, int d, long N) {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("moment degree must be even");
    if (N < 10000) throw std::invalid_argument("need at least 10^4 samples");
    Eigen::VectorXd first = sampler();
    const int m = static_cast<int>(first.size());
    if (m < 1) throw std::invalid_argument("sampler produced an empty vector");

    // all monomials of degree 1..d that are not even in every exponent
    std::vector<MultiIndex> nonsquare;
    for (const auto& alpha : monomials_up_to(m, d))
        if (alpha.degree() >= 1 && !alpha.all_even()) nonsquare.push_back(alpha);

    std::vector<double> coord_sum(m, 0.0), coord_sumsq(m, 0.0), coord2_sum(m, 0.0);
    std::vector<double> pair_sum, pair_sumsq;
    pair_sum.assign(static_cast<std::size_t>(m) * m, 0.0);
    pair_sumsq.assign(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> ns_sum(nonsquare.size(), 0.0), ns_sumsq(nonsquare.size(), 0.0);

    std::vector<double> powers(static_cast<std::size_t>(m) * (d + 1));
    auto power = [&](int i, int e) { return powers[static_cast<std::size_t>(i) * (d + 1) + e]; };

    Eigen::VectorXd x = first;
    for (long rep = 0; rep < N; ++rep) {
        if (rep > 0) x = sampler();
        for (int i = 0; i < m; ++i) {
            powers[static_cast<std::size_t>(i) * (d + 1)] = 1.0;
            for (int e = 1; e <= d; ++e)
                powers[static_cast<std::size_t>(i) * (d + 1) + e] = power(i, e - 1) * x(i);
        }
        for (int i = 0; i < m; ++i) {
            double v = power(i, d);
            coord_sum[i] += v;
            coord_sumsq[i] += v * v;
            coord2_sum[i] += v * v;  // x^{2d} is the square of x^d
            for (int j = i + 1; j < m; ++j) {
                double p = power(i, d / 2) * power(j, d / 2);
                pair_sum[static_cast<std::size_t>(i) * m + j] += p;
                pair_sumsq[static_cast<std::size_t>(i) * m + j] += p * p;
            }
        }
        for (std::size_t t = 0; t < nonsquare.size(); ++t) {
            double v = 1.0;
            const auto& e = nonsquare[t].exponents();
            for (int i = 0; i < m; ++i)
                if (e[i] > 0) v *= power(i, e[i]);
            ns_sum[t] += v;
            ns_sumsq[t] += v * v;
        }
    }

    auto se_of = [N](double sum, double sumsq) {
        double mean = sum / static_cast<double>(N);
        double var = std::max(0.0, sumsq / static_cast<double>(N) - mean * mean);
        return std::sqrt(var / static_cast<double>(N));
    };

    NicenessReport rep;
    rep.samples = N;
    rep.nice = true;
    for (int i = 0; i < m; ++i) {
        double mean = coord_sum[i] / static_cast<double>(N);
        double se = se_of(coord_sum[i], coord_sumsq[i]);
        rep.coord_dth.push_back(mean);
        rep.coord_dth_se.push_back(se);
        rep.coord_2dth.push_back(coord2_sum[i] / static_cast<double>(N));
        if (std::abs(mean - 1.0) > 3.0 * se + 1e-12) rep.nice = false;
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double mean = pair_sum[static_cast<std::size_t>(i) * m + j] / static_cast<double>(N);
            if (mean > rep.max_pair) {
                rep.max_pair = mean;
                rep.max_pair_se = se_of(pair_sum[static_cast<std::size_t>(i) * m + j],
                                        pair_sumsq[static_cast<std::size_t>(i) * m + j]);
            }
        }
    }
    for (std::size_t t = 0; t < nonsquare.size(); ++t) {
        double mean = std::abs(ns_sum[t] / static_cast<double>(N));
        double se = se_of(ns_sum[t], ns_sumsq[t]);
        if (mean > rep.max_nonsquare) {
            rep.max_nonsquare = mean;
            rep.max_nonsquare_se = se;
        }
        if (mean > 3.0 * se + 1e-12) rep.nice = false;
    }
    return rep;
}

PolyF empirical_poly(std::span<const Eigen::VectorXd> samples, int d) {
    if (samples.empty()) throw std::invalid_argument("need at least one sample");
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("degree must be even");
    const int n = static_cast<int>(samples.front().size());
    std::vector<MultiIndex> basis = monomials_of_degree(n, d);
    std::vector<double> acc(basis.size(), 0.0);

    std::vector<double> powers(static_cast<std::size_t>(n) * (d + 1));
    for (const auto& y : samples) {
        if (static_cast<int>(y.size()) != n)
            throw std::invalid_argument("samples disagree on dimension");
        for (int i = 0; i < n; ++i) {
            powers[static_cast<std::size_t>(i) * (d + 1)] = 1.0;
            for (int e = 1; e <= d; ++e)
                powers[static_cast<std::size_t>(i) * (d + 1) + e] =
                    powers[static_cast<std::size_t>(i) * (d + 1) + e - 1] * y(i);
        }
        for (std::size_t t = 0; t < basis.size(); ++t) {
            double v = 1.0;
            const auto& e = basis[t].exponents();
            for (int i = 0; i < n; ++i)
                if (e[i] > 0) v *= powers[static_cast<std::size_t>(i) * (d + 1) + e[i]];
            acc[t] += v;
        }
    }

    PolyF P(n);
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (std::size_t t = 0; t < basis.size(); ++t) {
        double coeff = static_cast<double>(multinomial(basis[t])) * acc[t] * inv;
        if (coeff != 0.0) P.add_term(basis[t], coeff);
    }
    return P;
}

double certify_closeness(const PolyF& P, const Eigen::MatrixXd& A, int d, bool sos_cross_check) {
    if (P.is_zero() || P.degree() != d || !P.is_homogeneous())
        throw std::invalid_argument("polynomial must be homogeneous of the declared degree");
    if (P.nvars() != static_cast<int>(A.rows()))
        throw std::invalid_argument("polynomial and dictionary disagree on dimension");
    PolyF diff = P - columns_power_sum(A, d);
    double tau_hat = operator_norm(flatten(diff, d));
    if (sos_cross_check) {
        PolyF bound = power_sum<double>(P.nvars(), 2).pow(d / 2) * (tau_hat * (1.0 + 1e-6) + 1e-9);
        auto upper = sos_dominates(diff, bound, d);
        auto lower = sos_dominates(diff * -1.0, bound, d);
        if (!upper || !lower)
            throw std::runtime_error("flattening certificate failed the sum-of-squares cross check");
    }
    return tau_hat;
}

RecoveredSet learn(std::span<const Eigen::VectorXd> samples, int d, const DecompConfig& cfg,
                   bool refined) {
    PolyF P = empirical_poly(samples, d);
    if (refined) return decompose_refined(P, samples, cfg);
    return decompose(P, cfg);
}

}  // namespace sosdict
