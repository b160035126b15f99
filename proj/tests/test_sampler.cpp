#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "sosdict/sampler.hpp"

using namespace sosdict;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<long>(xs.size()));
    long i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

using Support = std::vector<std::pair<double, Eigen::VectorXd>>;

PseudoDistribution uniform_signed(const std::vector<Eigen::VectorXd>& columns, int degree) {
    Support support;
    for (const auto& c : columns) {
        support.emplace_back(1.0, c);
        support.emplace_back(1.0, -c);
    }
    return from_distribution(support, degree);
}

// random rotation so column recovery is not an axis-aligned special case
Eigen::MatrixXd random_orthonormal(int n, Rng& rng) {
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    return Q;
}

double best_cor(const Eigen::VectorXd& c, const Eigen::MatrixXd& A) {
    double best = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
        double ip = c.dot(A.col(j));
        best = std::max(best, ip * ip / (c.squaredNorm() * A.col(j).squaredNorm()));
    }
    return best;
}

}  // namespace

TEST_CASE("conditioning threshold solves the truncated second moment equation") {
    for (double M : {1.001, 1.01, 1.5, 2.0, 5.0, 10.0, 100.0, 460.0}) {
        double tau = tau_threshold(M);
        CHECK(truncated_second_moment(tau) == doctest::Approx(M).epsilon(1e-7));
        CHECK(tau <= M);
        CHECK(tau >= -10.0);
    }
    // just above the degenerate level the root sits barely right of zero
    double tiny = tau_threshold(1.000001);
    CHECK(tiny >= 0.0);
    CHECK(tiny <= 1e-3);
}

TEST_CASE("conditioning level at or below one is rejected") {
    CHECK_THROWS_AS(tau_threshold(1.0), std::domain_error);
    CHECK_THROWS_AS(tau_threshold(0.5), std::domain_error);
}

TEST_CASE("threshold for level two agrees with monte carlo") {
    double tau = tau_threshold(2.0);
    Rng rng(211);
    const long N = 10000000;
    double sum = 0.0, sumsq = 0.0;
    long kept = 0;
    for (long i = 0; i < N; ++i) {
        double g = rng.gaussian();
        if (g >= tau) {
            double s = g * g;
            sum += s;
            sumsq += s * s;
            ++kept;
        }
    }
    REQUIRE(kept > 0);
    double mean = sum / kept;
    double var = sumsq / kept - mean * mean;
    double se = std::sqrt(var / kept);
    CHECK(std::abs(mean - 2.0) <= 3.0 * se);
}

TEST_CASE("truncated normal draws match the closed form second moment") {
    Rng rng(223);
    for (double a : {-1.0, 0.5, 3.0, 6.0}) {
        const long N = 200000;
        double sum = 0.0, sumsq = 0.0;
        for (long i = 0; i < N; ++i) {
            double g = rng.truncated_normal_lower(a);
            REQUIRE(g >= a);
            sum += g * g;
            sumsq += g * g * g * g;
        }
        double mean = sum / N;
        double var = sumsq / N - mean * mean;
        double se = std::sqrt(var / N);
        CHECK(std::abs(mean - truncated_second_moment(a)) <= 3.0 * se);
    }
}

TEST_CASE("reweigh polynomial expands to the product of its factor squares") {
    Rng rng(227);
    ReweighPoly w;
    w.scale = 0.125;
    for (int j = 0; j < 3; ++j)
        w.factors.push_back(vec({rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()}));
    CHECK(w.degree() == 6);

    PolyF expanded = w.as_polynomial();
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), 4);
        double direct = w.scale;
        for (const auto& f : w.factors) {
            double ip = f.dot(xv);
            direct *= ip * ip;
        }
        CHECK(expanded.evaluate(x) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("single axis factor gives the scaled square monomial") {
    ReweighPoly w = refined_reweigh_poly(std::vector<Eigen::VectorXd>{vec({1.0, 0.0})}, 4.0);
    PolyF p = w.as_polynomial();
    PolyF expect = PolyF::monomial(MultiIndex({2, 0}), 0.25);
    CHECK((p - expect).max_abs_coeff() <= 1e-15);
}

TEST_CASE("refined pools reject zero and mismatched samples") {
    CHECK_THROWS_AS(refined_reweigh_poly(std::vector<Eigen::VectorXd>{}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(refined_reweigh_poly(std::vector<Eigen::VectorXd>{vec({0.0, 0.0})}, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        refined_reweigh_poly(std::vector<Eigen::VectorXd>{vec({1.0, 0.0}), vec({1.0, 0.0, 0.0})}, 2.0),
        std::invalid_argument);
}

TEST_CASE("conditioned factors clear the threshold along the planted direction") {
    Rng rng(229);
    double M = 5.0;
    double tau = tau_threshold(M + 1.0);
    Eigen::VectorXd c = vec({0.0, 1.0, 0.0});
    for (int rep = 0; rep < 100; ++rep) {
        ReweighPoly w = draw_reweigh_poly(3, 3, M, c, rng);
        for (const auto& f : w.factors) CHECK(f.dot(c) >= tau);
    }
}

TEST_CASE("conditioned per factor mean matches the planted quadratic") {
    // E <xi, u>^2 under conditioning should equal M <c,u>^2 + ||u||^2
    Rng rng(233);
    double M = 3.0;
    Eigen::VectorXd c = vec({0.6, 0.8, 0.0});
    Eigen::VectorXd u = vec({0.5, -0.25, 1.5});
    const long N = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < N; ++i) {
        ReweighPoly w = draw_reweigh_poly(3, 1, M, c, rng);
        double ip = w.factors[0].dot(u);
        sum += ip * ip;
        sumsq += ip * ip * ip * ip;
    }
    double mean = sum / N;
    double var = sumsq / N - mean * mean;
    double se = std::sqrt(var / N);
    double predicted = M * std::pow(c.dot(u), 2) + u.squaredNorm();
    CHECK(std::abs(mean - predicted) <= 3.0 * se);
}

TEST_CASE("conditioned product mean at the planted point") {
    // at u = c the scaled two-factor product has mean ((M+1)/M)^2
    Rng rng(239);
    double M = 4.0;
    Eigen::VectorXd c = vec({1.0, 0.0});
    const long N = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < N; ++i) {
        ReweighPoly w = draw_reweigh_poly(2, 2, M, c, rng);
        double val = w.scale;
        for (const auto& f : w.factors) val *= std::pow(f.dot(c), 2);
        sum += val;
        sumsq += val * val;
    }
    double mean = sum / N;
    double var = sumsq / N - mean * mean;
    double se = std::sqrt(var / N);
    CHECK(std::abs(mean - std::pow((M + 1.0) / M, 2)) <= 3.0 * se);
}

TEST_CASE("extraction from a point mass returns the point") {
    Rng rng(241);
    Eigen::VectorXd c = vec({0.36, -0.48, 0.8});
    Support support;
    support.emplace_back(1.0, c);
    PseudoDistribution pd = from_distribution(support, 6);

    ReweighPoly w = refined_reweigh_poly(std::vector<Eigen::VectorXd>{c}, 2.0);
    auto cand = extract_candidate(pd, w);
    REQUIRE(cand.has_value());
    CHECK(std::abs(cand->dot(c)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cand->norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extraction separates axes by the reweigh direction") {
    std::vector<Eigen::VectorXd> cols{vec({1.0, 0.0}), vec({0.0, 1.0})};
    Support support;
    support.emplace_back(0.5, cols[0]);
    support.emplace_back(0.5, cols[1]);
    PseudoDistribution pd = from_distribution(support, 4);

    ReweighPoly w;
    w.scale = 1.0;
    w.factors.push_back(vec({1.0, 0.0}));
    auto cand = extract_candidate(pd, w);
    REQUIRE(cand.has_value());
    CHECK((*cand)(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("extraction reports no signal when the weight kills the support") {
    Support support;
    support.emplace_back(1.0, vec({0.0, 1.0}));
    PseudoDistribution pd = from_distribution(support, 4);
    ReweighPoly w;
    w.scale = 1.0;
    w.factors.push_back(vec({1.0, 0.0}));
    CHECK(!extract_candidate(pd, w).has_value());
    CHECK(!extract_candidate(pd, w, ExtractStrategy::GaussianSample, 5).has_value());
}

TEST_CASE("extraction validates the degree headroom") {
    Support support;
    support.emplace_back(1.0, vec({1.0, 0.0}));
    PseudoDistribution pd = from_distribution(support, 2);
    ReweighPoly w;
    w.scale = 1.0;
    w.factors.push_back(vec({1.0, 0.0}));
    CHECK_THROWS_AS(extract_candidate(pd, w), std::invalid_argument);
}

TEST_CASE("gaussian draw extraction lands on the surviving atom") {
    std::vector<Eigen::VectorXd> cols{vec({1.0, 0.0}), vec({0.0, 1.0})};
    PseudoDistribution pd = uniform_signed(cols, 6);
    ReweighPoly w;
    w.scale = 1.0;
    w.factors.push_back(vec({1.0, 0.0}));
    auto cand = extract_candidate(pd, w, ExtractStrategy::GaussianSample, 17);
    REQUIRE(cand.has_value());
    // reweighing by u1^2 leaves only the +-e1 atoms, so the matched
    // gaussian is supported on the e1 line
    CHECK(std::abs((*cand)(0)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conditioned reweighing isolates the planted column") {
    Rng rng(251);
    Eigen::MatrixXd A = random_orthonormal(4, rng);
    std::vector<Eigen::VectorXd> cols;
    for (int j = 0; j < 4; ++j) cols.push_back(A.col(j));
    PseudoDistribution pd = uniform_signed(cols, 6);

    double M = default_conditioning(0.1);
    Eigen::VectorXd target = A.col(0);
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        ReweighPoly w = draw_reweigh_poly(4, 2, M, target, rng);
        auto cand = extract_candidate(pd, w);
        REQUIRE(cand.has_value());
        double ip = cand->dot(target);
        if (ip * ip >= 0.9) ++hits;
    }
    CHECK(hits >= 50);
}

TEST_CASE("sampling from a point mass accepts immediately") {
    Eigen::VectorXd c = vec({0.6, 0.0, 0.8});
    Support support;
    support.emplace_back(1.0, c);
    PseudoDistribution pd = from_distribution(support, 4);

    SampleParams params;
    params.reweigh_degree = 2;
    params.M = 2.0;
    params.retries = 3;
    params.seed = 7;
    auto score = [&](const Eigen::VectorXd& v) { return std::pow(v.dot(c), 2); };
    SampleOutcome out = sample_unit(pd, params, score, 1.0 - 1e-6);
    REQUIRE(!out.exhausted());
    CHECK(out.accepted_retry == 0);
    CHECK(std::abs(out.vector->dot(c)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero retries always exhausts") {
    Support support;
    support.emplace_back(1.0, vec({1.0, 0.0}));
    PseudoDistribution pd = from_distribution(support, 4);
    SampleParams params;
    params.retries = 0;
    SampleOutcome out = sample_unit(pd, params, [](const Eigen::VectorXd&) { return 1.0; }, 0.0);
    CHECK(out.exhausted());
    CHECK(out.attempts == 0);
}

TEST_CASE("axis mixtures round to an axis under the quartic score") {
    std::vector<Eigen::VectorXd> cols;
    for (int j = 0; j < 4; ++j) cols.push_back(Eigen::VectorXd::Unit(4, j));
    PseudoDistribution pd = uniform_signed(cols, 6);

    SampleParams params;
    params.reweigh_degree = 4;
    params.M = 2.0;
    params.retries = 200;
    params.seed = 11;
    auto score = [](const Eigen::VectorXd& v) {
        double s = 0.0;
        for (int i = 0; i < v.size(); ++i) s += std::pow(v(i), 4);
        return s;
    };
    SampleOutcome out = sample_unit(pd, params, score, 0.9);
    REQUIRE(!out.exhausted());
    double top = out.vector->cwiseAbs().maxCoeff();
    CHECK(top * top >= 0.9);
}

TEST_CASE("repeat sampling runs are bit for bit identical") {
    Rng rng(257);
    Eigen::MatrixXd A = random_orthonormal(3, rng);
    std::vector<Eigen::VectorXd> cols;
    for (int j = 0; j < 3; ++j) cols.push_back(A.col(j));
    PseudoDistribution pd = uniform_signed(cols, 6);

    SampleParams params;
    params.reweigh_degree = 4;
    params.M = 3.0;
    params.retries = 50;
    params.seed = 13;
    auto score = [&](const Eigen::VectorXd& v) { return best_cor(v, A); };
    SampleOutcome a = sample_unit(pd, params, score, 0.99);
    SampleOutcome b = sample_unit(pd, params, score, 0.99);
    REQUIRE(!a.exhausted());
    REQUIRE(a.accepted_retry == b.accepted_retry);
    for (int i = 0; i < 3; ++i) CHECK((*a.vector)(i) == (*b.vector)(i));
}

TEST_CASE("recovery frequency over batches matches the sampling guarantee") {
    // orthonormal pair, accuracy 0.1, moment degree 14: each batch of
    // 2^14 retries should land a candidate within correlation 0.5 of a
    // column far more often than the guaranteed one batch in ten
    Rng rng(263);
    Eigen::MatrixXd A = random_orthonormal(2, rng);
    std::vector<Eigen::VectorXd> cols{A.col(0), A.col(1)};
    PseudoDistribution pd = uniform_signed(cols, 16);

    auto score = [&](const Eigen::VectorXd& v) { return best_cor(v, A); };
    int batch_hits = 0;
    for (int batch = 0; batch < 5; ++batch) {
        SampleParams params;
        params.epsilon = 0.1;
        params.reweigh_degree = 14;
        params.M = default_conditioning(0.1);
        params.retries = 1 << 14;
        params.seed = 1000 + static_cast<std::uint64_t>(batch);
        SampleOutcome out = sample_unit(pd, params, score, 0.5);
        if (!out.exhausted()) {
            ++batch_hits;
            CHECK(best_cor(*out.vector, A) >= 0.5);
        }
    }
    CHECK(batch_hits >= 1);
}

TEST_CASE("tail gate passes when the ratio is pinned") {
    Rng rng(269);
    std::vector<double> A, B;
    for (int i = 0; i < 20000; ++i) {
        double b = 1.0 + rng.uniform();
        B.push_back(b);
        A.push_back(0.3 * b);
    }
    GateReport rep = second_moment_gate(A, B, 0.3, 0.5);
    CHECK(rep.premise_holds);
    CHECK(rep.frequency == 1.0);
    CHECK(rep.pass);
}

TEST_CASE("tail gate reports a premise violation when A equals B") {
    std::vector<double> A, B;
    Rng rng(271);
    for (int i = 0; i < 1000; ++i) {
        double b = 1.0 + rng.uniform();
        A.push_back(b);
        B.push_back(b);
    }
    GateReport rep = second_moment_gate(A, B, 0.5, 0.5);
    CHECK(!rep.premise_holds);
    CHECK(!rep.pass);
}

TEST_CASE("tail gate holds on the two level construction") {
    // B is 1 with probability 0.9 and 10 otherwise; A keeps only the low
    // level. The small-ratio event is exactly the heavy B draw.
    Rng rng(277);
    const int N = 100000;
    std::vector<double> A, B;
    for (int i = 0; i < N; ++i) {
        bool heavy = rng.bernoulli(0.1);
        double b = heavy ? 10.0 : 1.0;
        B.push_back(b);
        A.push_back(heavy ? 0.0 : 1.0);
    }
    GateReport rep = second_moment_gate(A, B, 0.5, 0.5);
    CHECK(rep.premise_holds);
    CHECK(rep.t_hat == doctest::Approx(10.9 / 3.61).epsilon(0.05));
    CHECK(rep.bound == doctest::Approx(0.25 / (9.0 * 10.9 / 3.61)).epsilon(0.05));
    CHECK(rep.frequency == doctest::Approx(0.1).epsilon(0.05));
    CHECK(rep.pass);
}

TEST_CASE("tail gate rejects violated domination") {
    std::vector<double> A{2.0}, B{1.0};
    CHECK_THROWS_AS(second_moment_gate(A, B, 0.5, 0.5), std::invalid_argument);
    std::vector<double> A2{-0.5}, B2{1.0};
    CHECK_THROWS_AS(second_moment_gate(A2, B2, 0.5, 0.5), std::invalid_argument);
}
