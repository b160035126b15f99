//
// acceptance.cpp
//
// End-to-end acceptance gate: ten pinned checks covering the certificate
// suite, the pseudo-expectation oracle, the SDP solver, noiseless and
// perturbed decomposition, the committed dictionary learning run, the
// Monte-Carlo statistics, and byte-level determinism of the reports.
// Prints one line per criterion and exits 0 only when all of them pass.
//
// Usage: acceptance [repo_root]
//
// The repository root (default ".") locates configs/golden_learn.cfg and
// the frozen report configs/golden_learn.csv.
//

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sosdict/certcheck.hpp"
#include "sosdict/config.hpp"
#include "sosdict/decomp.hpp"
#include "sosdict/dictgen.hpp"
#include "sosdict/flattening.hpp"
#include "sosdict/linear_forms.hpp"
#include "sosdict/multi_index.hpp"
#include "sosdict/polynomial.hpp"
#include "sosdict/pseudodist.hpp"
#include "sosdict/rng.hpp"
#include "sosdict/runner.hpp"
#include "sosdict/sampler.hpp"
#include "sosdict/sdp.hpp"
#include "sosdict/serialize.hpp"

using namespace sosdict;

namespace {

std::string g_root = ".";

struct Outcome {
    bool ok = false;
    std::string detail;
};

// rows captured on the first pass, re-derived in the determinism check
struct CapturedRows {
    std::vector<std::string> decomp;
    std::vector<std::string> golden;
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------- 1

Outcome certificate_suite() {
    int total = 0;
    int good = 0;
    auto tally = [&](bool ok) {
        ++total;
        if (ok) ++good;
    };
    for (int n = 2; n <= 4; ++n) {
        const certs::AmgmChain chain = certs::amgm_chain(n);
        bool ok = !chain.steps.empty();
        for (const auto& step : chain.steps) ok = ok && certs::verify(step);
        tally(ok);
    }
    for (int n = 1; n <= 3; ++n)
        for (int deg = 1; deg <= 4; ++deg)
            for (const MultiIndex& alpha : monomials_of_degree(n, deg))
                tally(certs::verify(certs::monomial_certificate(alpha)));
    const std::vector<std::array<int, 3>> lifts = {{2, 4, 1}, {2, 4, 2}, {3, 4, 1}, {2, 6, 1}};
    for (const auto& [n, d, s] : lifts) {
        const certs::HolderLift lift = certs::holder_lift_certificate(n, d, s);
        bool ok = certs::verify(lift.total);
        for (const auto& part : lift.parts) ok = ok && certs::verify(part);
        tally(ok);
    }
    return {good == total,
            std::to_string(good) + "/" + std::to_string(total) + " exact identities"};
}

// ---------------------------------------------------------------- 2

PolyF random_poly(int n, int max_degree, Rng& rng) {
    PolyF p(n);
    for (const MultiIndex& alpha : monomials_up_to(n, max_degree))
        p.add_term(alpha, 2.0 * rng.uniform() - 1.0);
    return p;
}

double direct_expect(const std::vector<std::pair<double, Eigen::VectorXd>>& support,
                     const PolyF& p) {
    double acc = 0.0;
    double mass = 0.0;
    std::vector<double> point;
    for (const auto& [w, y] : support) {
        point.assign(y.data(), y.data() + y.size());
        acc += w * p.evaluate(point);
        mass += w;
    }
    return acc / mass;
}

Outcome oracle_equivalence() {
    Rng rng(4242);
    double worst = 0.0;
    int comparisons = 0;
    auto record = [&](double err) {
        worst = std::max(worst, err);
        ++comparisons;
    };
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform() * 5.0);
        const int k = 2 * (1 + rep % 3);  // cycle 2, 4, 6
        const int atoms = 2 + static_cast<int>(rng.uniform() * 5.0);
        std::vector<std::pair<double, Eigen::VectorXd>> support;
        for (int a = 0; a < atoms; ++a) {
            Eigen::VectorXd y(n);
            for (int i = 0; i < n; ++i) y(i) = rng.gaussian();
            support.emplace_back(0.1 + rng.uniform(), y);
        }
        const PseudoDistribution pd = from_distribution(support, k);

        for (int t = 0; t < 3; ++t) {
            const PolyF p = random_poly(n, k, rng);
            record(std::abs(pexpect(pd, p) - direct_expect(support, p)));
        }

        // second moments of the matched Gaussian against the raw averages
        GaussianSampler gs = gaussian_match(pd, 7);
        const Eigen::MatrixXd second = gs.factor() * gs.factor().transpose() +
                                       gs.mean() * gs.mean().transpose();
        double mass = 0.0;
        Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [w, y] : support) {
            direct += w * y * y.transpose();
            mass += w;
        }
        direct /= mass;
        record((second - direct).cwiseAbs().maxCoeff());

        if (k < 4) continue;  // reweighing drops the degree by two

        Eigen::VectorXd a(n);
        for (int i = 0; i < n; ++i) a(i) = rng.gaussian();
        PolyF weight = linear_form_power(a, 2);
        const std::optional<PseudoDistribution> rw = reweigh(pd, weight, true);
        if (!rw) {
            record(1.0);  // a degenerate draw here means the oracle broke
            continue;
        }
        std::vector<std::pair<double, Eigen::VectorXd>> tilted = support;
        std::vector<double> point;
        for (auto& [w, y] : tilted) {
            point.assign(y.data(), y.data() + y.size());
            w *= weight.evaluate(point);
        }
        for (int t = 0; t < 3; ++t) {
            const PolyF p = random_poly(n, k - 2, rng);
            record(std::abs(pexpect(*rw, p) - direct_expect(tilted, p)));
        }
    }
    return {worst <= 1e-9, std::to_string(comparisons) +
                               " comparisons, worst deviation " + fmt(worst)};
}

// ---------------------------------------------------------------- 3

double reverify_feasibility(const SdpProblem& p, const SdpSolution& sol) {
    double worst = 0.0;
    for (const auto& c : p.constraints)
        worst = std::max(worst, std::abs(constraint_value(c, sol.blocks) - c.rhs));
    return worst;
}

double reverify_min_eig(const SdpSolution& sol) {
    double min_eig = 0.0;
    for (const auto& b : sol.blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    return min_eig;
}

bool reverifies(const SdpProblem& p, const SdpSolution& sol) {
    return reverify_feasibility(p, sol) <= sol.eps_feasibility + 1e-12 &&
           reverify_min_eig(sol) >= -(sol.eps_psd + 1e-12);
}

Outcome sdp_sanity() {
    std::vector<std::string> failures;

    // pinned diagonal, maximize the pinned entry: optimum 1
    SdpProblem p1;
    p1.block_dims = {1};
    p1.constraints.push_back({{{0, 0, 0, 1.0}}, 1.0});
    p1.objective = {{0, 0, 0, 1.0}};
    const SdpSolution s1 = solve(p1);
    if (s1.status != SdpStatus::Feasible || !s1.objective_value ||
        std::abs(*s1.objective_value - 1.0) > 1e-5)
        failures.push_back("pinned-diagonal value");
    else if (!reverifies(p1, s1))
        failures.push_back("pinned-diagonal reverify");

    // unit diagonal, maximize the off-diagonal entry: extreme point X12 = 1
    SdpProblem p2;
    p2.block_dims = {2};
    p2.constraints.push_back({{{0, 0, 0, 1.0}}, 1.0});
    p2.constraints.push_back({{{0, 1, 1, 1.0}}, 1.0});
    p2.objective = {{0, 0, 1, 1.0}};
    const SdpSolution s2 = solve(p2);
    if (s2.status != SdpStatus::Feasible || std::abs(s2.blocks[0](0, 1) - 1.0) > 1e-5)
        failures.push_back("correlation extreme point");
    else if (!reverifies(p2, s2))
        failures.push_back("correlation reverify");

    // negative pinned diagonal entry cannot be PSD
    SdpProblem p3;
    p3.block_dims = {2};
    p3.constraints.push_back({{{0, 0, 0, 1.0}}, 1.0});
    p3.constraints.push_back({{{0, 1, 1, 1.0}}, -1.0});
    const SdpSolution s3 = solve(p3);
    if (s3.status != SdpStatus::Infeasible || s3.infeasibility_evidence <= 0.0)
        failures.push_back("infeasibility detection");

    if (failures.empty()) return {true, "3 examples, feasible ones re-verified"};
    std::string msg = "failed:";
    for (const auto& f : failures) msg += " " + f;
    return {false, msg};
}

// ------------------------------------------------------------- 4, 5

PolyF axis_quartic(int n) {
    PolyF p(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(n, 0);
        e[i] = 4;
        p.add_term(MultiIndex(e), 1.0);
    }
    return p;
}

DecompConfig decomp_config(std::uint64_t seed) {
    DecompConfig cfg;
    cfg.d = 4;
    cfg.k = 4;
    cfg.epsilon = 0.1;
    cfg.gamma = 2.0;
    cfg.tau = 0.0;
    cfg.max_columns = 8;
    cfg.sampler.retries = 64;
    cfg.sampler.M = 2.0;
    cfg.sampler.seed = seed;
    return cfg;
}

// compact deterministic fingerprint of one decomposition outcome
std::string decomp_row(int n, std::uint64_t seed, const RecoveredSet& set) {
    std::ostringstream os;
    os << n << ',' << seed << ',' << to_string(set.reason) << ',' << set.vectors.size();
    for (const auto& r : set.vectors) {
        os << ',' << r.iteration << ':' << r.accepted_retry << ':' << format_double(r.score);
        for (long i = 0; i < r.v.size(); ++i) os << ':' << format_double(r.v(i));
    }
    return os.str();
}

// map each recovered vector to its dominant axis; require the assignment
// to be a bijection with every correlation above min_cor
bool axes_recovered(const RecoveredSet& set, int n, double min_cor, double& worst) {
    if (static_cast<int>(set.vectors.size()) != n) return false;
    std::set<int> used;
    worst = 1.0;
    for (const auto& r : set.vectors) {
        int axis = 0;
        r.v.cwiseAbs().maxCoeff(&axis);
        const double cor = correlation(r.v, Eigen::VectorXd::Unit(n, axis));
        worst = std::min(worst, cor);
        if (cor < min_cor || !used.insert(axis).second) return false;
    }
    return true;
}

Outcome noiseless_decomposition(CapturedRows& captured) {
    int runs = 0;
    int good = 0;
    double worst_cor = 1.0;
    for (int n : {3, 4}) {
        const PolyF P = axis_quartic(n);
        std::vector<Eigen::VectorXd> axes;
        for (int i = 0; i < n; ++i) axes.push_back(Eigen::VectorXd::Unit(n, i));
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const RecoveredSet out = decompose(P, decomp_config(seed));
            captured.decomp.push_back(decomp_row(n, seed, out));
            ++runs;
            double worst = 0.0;
            if (!axes_recovered(out, n, 0.95, worst)) continue;
            worst_cor = std::min(worst_cor, worst);
            std::vector<Eigen::VectorXd> got;
            for (const auto& r : out.vectors) got.push_back(r.v);
            if (check_closeness(got, axes, 0.1).close) ++good;
        }
    }
    return {good == runs, std::to_string(good) + "/" + std::to_string(runs) +
                              " seeds, min axis cor " + fmt(worst_cor)};
}

Outcome perturbed_decomposition() {
    int good_total = 0;
    bool every_n_ok = true;
    double worst_cor = 1.0;
    for (int n : {3, 4}) {
        // symmetric quartic bump on adjacent coordinate pairs, rescaled to
        // flattening operator norm 0.01
        PolyF bump(n);
        for (int i = 0; i + 1 < n; ++i) {
            std::vector<int> e(n, 0);
            e[i] = 2;
            e[i + 1] = 2;
            bump.add_term(MultiIndex(e), 1.0);
        }
        const double norm = operator_norm(flatten(bump, 4));
        const PolyF noisy = axis_quartic(n) + bump * (0.01 / norm);
        int good = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            DecompConfig cfg = decomp_config(seed);
            cfg.tau = 0.02;  // tell the driver the polynomial is inexact
            const RecoveredSet out = decompose(noisy, cfg);
            double worst = 0.0;
            if (axes_recovered(out, n, 0.85, worst)) {
                ++good;
                worst_cor = std::min(worst_cor, worst);
            }
        }
        good_total += good;
        every_n_ok = every_n_ok && good >= 4;
    }
    return {every_n_ok, std::to_string(good_total) + "/10 seeds (need 4/5 per n), min cor " +
                            fmt(worst_cor)};
}

// ---------------------------------------------------------------- 6

std::string strip_timing(std::string line) {
    for (int i = 0; i < cli::kReportTimingColumns; ++i) line.resize(line.rfind(','));
    return line;
}

cli::ExperimentConfig golden_config() {
    cli::ExperimentConfig cfg = cli::load_config(g_root + "/configs/golden_learn.cfg");
    cfg.report.clear();  // keep the gate from writing into the repository
    return cfg;
}

Outcome golden_learning(CapturedRows& captured) {
    const cli::ExperimentConfig cfg = golden_config();
    cli::Report report;
    std::ostringstream log;
    const int code = cli::run(cfg, report, log);
    if (code != cli::kExitOk && code != cli::kExitPartial)
        return {false, "runner exit code " + std::to_string(code)};
    if (report.rows.size() != cfg.seeds.size())
        return {false, "expected one row per committed seed"};

    int good_seeds = 0;
    for (const auto& row : report.rows) {
        captured.golden.push_back(strip_timing(cli::report_row_csv(row)));
        int columns = 0;
        for (double c : row.cors)
            if (c >= 0.8) ++columns;
        if (columns >= 3) ++good_seeds;
    }

    // residual certificate against the true dictionary, reconstructed from
    // the documented bench seed derivation (single cell, so index 0)
    const double bound = 3.0 * cfg.tau * 256.0;  // 3 tau sigma^d d^d with sigma = 1
    double worst_tau_hat = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        const std::uint64_t cell_seed = Rng(seed).derive(0).base_seed();
        const Dictionary dict = gen_dictionary(cfg.n, cfg.m, cell_seed, cfg.orthonormalize);
        NiceSpec spec{cfg.d, cfg.tau};
        Rng data = Rng(cell_seed).derive(1);
        std::vector<Eigen::VectorXd> samples;
        samples.reserve(static_cast<std::size_t>(cfg.num_samples));
        for (long i = 0; i < cfg.num_samples; ++i)
            samples.push_back(dict.A * sample_x(spec, dict.m(), data));
        const PolyF P = empirical_poly(samples, cfg.d);
        worst_tau_hat = std::max(worst_tau_hat, certify_closeness(P, dict.A, cfg.d));
    }

    const bool ok = good_seeds >= 4 && worst_tau_hat <= bound;
    return {ok, std::to_string(good_seeds) + "/5 seeds with 3+ columns, max tau_hat " +
                    fmt(worst_tau_hat) + " vs bound " + fmt(bound)};
}

// ---------------------------------------------------------------- 7

Outcome tail_gate() {
    Rng rng(277);
    const long N = 1000000;
    std::vector<double> a(static_cast<std::size_t>(N));
    std::vector<double> b(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) {
        const bool heavy = rng.bernoulli(0.1);
        b[static_cast<std::size_t>(i)] = heavy ? 10.0 : 1.0;
        a[static_cast<std::size_t>(i)] = heavy ? 0.0 : 1.0;
    }
    const GateReport rep = second_moment_gate(a, b, 0.5, 0.5);
    return {rep.premise_holds && rep.pass,
            "frequency " + fmt(rep.frequency) + " vs bound " + fmt(rep.bound) + ", t_hat " +
                fmt(rep.t_hat)};
}

// ---------------------------------------------------------------- 8

Outcome niceness_statistics() {
    NiceSpec spec{4, 0.1};
    Rng rng(888);
    const NicenessReport rep =
        niceness_estimate([&] { return sample_x(spec, 4, rng); }, 4, 1000000);
    const bool pair_ok = rep.max_pair <= spec.tau + 3.0 * rep.max_pair_se;
    const bool odd_ok = rep.max_nonsquare <= 3.0 * rep.max_nonsquare_se;
    return {rep.nice && pair_ok && odd_ok,
            "max pair " + fmt(rep.max_pair) + " (tau " + fmt(spec.tau) + "), max non-square " +
                fmt(rep.max_nonsquare)};
}

// ---------------------------------------------------------------- 9

Outcome conditioned_identity() {
    Rng rng(5151);
    const int n = 4;
    const long N = 100000;
    double worst_sigmas = 0.0;  // deviation in standard error units
    for (double M : {2.0, 5.0, 10.0, default_conditioning(0.1), 50.0}) {
        Eigen::VectorXd c(n);
        for (int i = 0; i < n; ++i) c(i) = rng.gaussian();
        c.normalize();
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
        for (long s = 0; s < N; ++s) {
            const ReweighPoly W = draw_reweigh_poly(n, 1, M, c, rng);
            const Eigen::VectorXd& xi = W.factors.front();
            const Eigen::MatrixXd outer = xi * xi.transpose();
            sum += outer;
            sum_sq += outer.cwiseProduct(outer);
        }
        const Eigen::MatrixXd mean = sum / static_cast<double>(N);
        const Eigen::MatrixXd target =
            M * c * c.transpose() + Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double var =
                    sum_sq(i, j) / static_cast<double>(N) - mean(i, j) * mean(i, j);
                const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(N));
                const double dev = std::abs(mean(i, j) - target(i, j));
                worst_sigmas = std::max(worst_sigmas, dev / std::max(se, 1e-12));
            }
        }
    }
    return {worst_sigmas <= 3.0,
            "worst coefficient deviation " + fmt(worst_sigmas) + " standard errors"};
}

// --------------------------------------------------------------- 10

Outcome determinism(const CapturedRows& captured) {
    // the decompositions again, byte for byte
    std::vector<std::string> again;
    for (int n : {3, 4}) {
        const PolyF P = axis_quartic(n);
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            again.push_back(decomp_row(n, seed, decompose(P, decomp_config(seed))));
    }
    if (again != captured.decomp) return {false, "decomposition reruns diverged"};

    // the golden run again, and against the committed report
    cli::Report report;
    std::ostringstream log;
    const int code = cli::run(golden_config(), report, log);
    if (code != cli::kExitOk && code != cli::kExitPartial)
        return {false, "golden rerun exit code " + std::to_string(code)};
    std::vector<std::string> golden_again;
    for (const auto& row : report.rows)
        golden_again.push_back(strip_timing(cli::report_row_csv(row)));
    if (golden_again != captured.golden) return {false, "golden reruns diverged"};

    std::ifstream committed(g_root + "/configs/golden_learn.csv");
    if (!committed) return {false, "cannot open committed golden report"};
    std::vector<std::string> frozen;
    std::string line;
    std::getline(committed, line);  // header
    while (std::getline(committed, line))
        if (!line.empty()) frozen.push_back(strip_timing(line));
    if (golden_again != frozen) return {false, "rows differ from committed report"};

    return {true, std::to_string(captured.decomp.size() + golden_again.size()) +
                      " rows stable across reruns and against the committed report"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_root = argv[1];

    CapturedRows captured;
    struct Entry {
        int id;
        const char* label;
        std::function<Outcome()> check;
    };
    const std::vector<Entry> entries = {
        {1, "certificate suite", certificate_suite},
        {2, "pseudo-expectation oracle", oracle_equivalence},
        {3, "sdp sanity", sdp_sanity},
        {4, "noiseless decomposition", [&] { return noiseless_decomposition(captured); }},
        {5, "perturbed decomposition", perturbed_decomposition},
        {6, "dictionary learning", [&] { return golden_learning(captured); }},
        {7, "small-ratio tail gate", tail_gate},
        {8, "niceness statistics", niceness_statistics},
        {9, "conditioned reweighing", conditioned_identity},
        {10, "determinism", [&] { return determinism(captured); }},
    };

    bool all_ok = true;
    for (const auto& entry : entries) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = entry.check();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d [%s]: %s (%s, %.1fs)\n", entry.id, entry.label,
                    out.ok ? "PASS" : "FAIL", out.detail.c_str(), secs);
        std::fflush(stdout);
        all_ok = all_ok && out.ok;
    }
    return all_ok ? 0 : 1;
}
