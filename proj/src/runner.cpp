#include "sosdict/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <algorithm>

#include "sosdict/certcheck.hpp"
#include "sosdict/decomp.hpp"
#include "sosdict/dictgen.hpp"
#include "sosdict/multi_index.hpp"
#include "sosdict/serialize.hpp"

namespace sosdict::cli {

namespace {

class Stopwatch {
  public:
    // milliseconds since construction or the previous lap
    double lap() {
        auto now = Clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - mark_).count();
        mark_ = now;
        return ms;
    }

  private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point mark_ = Clock::now();
};

DecompConfig to_decomp(const ExperimentConfig& cfg, int d, int k, std::uint64_t sampler_seed) {
    DecompConfig dc;
    dc.d = d;
    dc.k = k;
    dc.epsilon = cfg.epsilon;
    dc.gamma = cfg.gamma;
    dc.tau = cfg.noise;
    dc.max_columns = cfg.max_columns;
    dc.sampler.epsilon = cfg.epsilon;
    dc.sampler.retries = cfg.retries;
    dc.sampler.M = cfg.conditioning;
    dc.sampler.seed = sampler_seed;
    dc.sdp.tol = cfg.sdp_tol;
    dc.sdp.max_iters = cfg.sdp_max_iters;
    dc.strategy = cfg.strategy == "gaussian" ? ExtractStrategy::GaussianSample
                                             : ExtractStrategy::Eigenvector;
    return dc;
}

std::vector<Eigen::VectorXd> synthesize(const Dictionary& dict, const NiceSpec& spec, long count,
                                        Rng& rng) {
    std::vector<Eigen::VectorXd> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) samples.push_back(dict.A * sample_x(spec, dict.m(), rng));
    return samples;
}

// per-truth-column best squared correlations plus the closeness verdict
void score_row(const RecoveredSet& set, const Dictionary* truth, double eps, ReportRow& row) {
    row.recovered = static_cast<int>(set.vectors.size());
    row.reason = to_string(set.reason);
    for (const auto& r : set.vectors) row.retries_used += r.accepted_retry + 1;
    if (!truth || truth->m() == 0) return;
    row.cors.assign(static_cast<std::size_t>(truth->m()), 0.0);
    for (int j = 0; j < truth->m(); ++j)
        for (const auto& r : set.vectors)
            row.cors[static_cast<std::size_t>(j)] = std::max(
                row.cors[static_cast<std::size_t>(j)], correlation(r.v, truth->A.col(j)));
    row.cor_min = *std::min_element(row.cors.begin(), row.cors.end());
    if (!set.vectors.empty()) {
        std::vector<Eigen::VectorXd> got, want;
        for (const auto& r : set.vectors) got.push_back(r.v);
        for (int j = 0; j < truth->m(); ++j) want.push_back(truth->A.col(j));
        row.close = check_closeness(got, want, eps).close ? 1 : 0;
    }
}

// spectral residual of the recovered set against the polynomial it was
// pulled from; skipped when the polynomial is not homogeneous of degree d
double residual_or_skip(const PolyF& P, const RecoveredSet& set, int d) {
    if (set.vectors.empty() || P.is_zero() || P.degree() != d || !P.is_homogeneous()) return -1.0;
    Eigen::MatrixXd A(set.vectors.front().v.size(), static_cast<Eigen::Index>(set.vectors.size()));
    for (std::size_t j = 0; j < set.vectors.size(); ++j)
        A.col(static_cast<Eigen::Index>(j)) = set.vectors[j].v;
    return certify_closeness(P, A, d);
}

ReportRow base_row(const ExperimentConfig& cfg, std::uint64_t seed) {
    ReportRow row;
    row.mode = cfg.mode;
    row.n = cfg.n;
    row.m = cfg.m;
    row.d = cfg.d;
    row.k = cfg.k;
    row.tau = cfg.tau;
    row.epsilon = cfg.epsilon;
    row.seed = seed;
    return row;
}

std::string per_seed_path(const std::string& base, std::uint64_t seed, bool multi) {
    return multi ? base + ".s" + std::to_string(seed) : base;
}

int run_gen(const ExperimentConfig& cfg, Report& report, std::ostream& log) {
    std::uint64_t seed = cfg.seeds.front();
    ReportRow row = base_row(cfg, seed);
    Stopwatch sw;
    Dictionary dict = gen_dictionary(cfg.n, cfg.m, seed, cfg.orthonormalize);
    NiceSpec spec{cfg.d, cfg.tau};
    Rng data = Rng(seed).derive(1);
    std::vector<Eigen::VectorXd> samples = synthesize(dict, spec, cfg.num_samples, data);
    if (!cfg.out_dict.empty()) save_dictionary(cfg.out_dict, dict);
    if (!cfg.out_samples.empty()) save_samples(cfg.out_samples, samples);
    if (!cfg.out_poly.empty()) save_polynomial(cfg.out_poly, empirical_poly(samples, cfg.d));
    row.reason = "ok";
    row.ms_data = sw.lap();
    report.rows.push_back(std::move(row));
    log << "[gen] n=" << cfg.n << " m=" << cfg.m << " seed=" << seed << ": " << samples.size()
        << " samples, sigma=" << format_double(dict.sigma) << "\n";
    return kExitOk;
}

// shared loop for learn and decompose: the polynomial under attack plus
// optional samples (refined rounding) and an optional truth dictionary
int run_recovery(const ExperimentConfig& cfg, Report& report, std::ostream& log) {
    Stopwatch load;
    PolyF P(cfg.n);
    std::vector<Eigen::VectorXd> samples;
    if (cfg.mode == "learn") {
        if (cfg.input_samples.empty()) throw ConfigError("learn requires input_samples");
        samples = load_samples(cfg.input_samples);
        if (samples.empty()) throw ConfigError(cfg.input_samples + " holds no samples");
        P = empirical_poly(samples, cfg.d);
    } else {
        if (cfg.input_poly.empty()) throw ConfigError("decompose requires input_poly");
        P = load_polynomial(cfg.input_poly);
        if (cfg.refined) {
            if (cfg.input_samples.empty())
                throw ConfigError("refined decompose requires input_samples");
            samples = load_samples(cfg.input_samples);
        }
    }
    Dictionary truth;
    bool have_truth = !cfg.input_dict.empty();
    if (have_truth) truth = load_dictionary(cfg.input_dict);
    double ms_load = load.lap();

    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        std::uint64_t seed = cfg.seeds[si];
        ReportRow row = base_row(cfg, seed);
        row.n = P.nvars();  // the data decides the ambient dimension
        row.ms_data = si == 0 ? ms_load : 0.0;
        Stopwatch sw;
        DecompConfig dc = to_decomp(cfg, cfg.d, cfg.k, seed);
        RecoveredSet set = cfg.refined ? decompose_refined(P, samples, dc) : decompose(P, dc);
        row.ms_solve = sw.lap();
        score_row(set, have_truth ? &truth : nullptr, cfg.epsilon, row);
        row.tau_hat = residual_or_skip(P, set, cfg.d);
        row.ms_certify = sw.lap();
        if (!cfg.out_recovered.empty())
            save_recovered(per_seed_path(cfg.out_recovered, seed, cfg.seeds.size() > 1), set,
                           cfg.n);
        log << "[" << cfg.mode << "] seed=" << seed << ": " << row.recovered << " columns, "
            << row.reason;
        if (have_truth) log << ", cor_min=" << format_double(row.cor_min);
        log << "\n";
        report.rows.push_back(std::move(row));
    }
    return kExitOk;
}

struct CertJob {
    std::string label;
    std::function<bool()> check;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::istringstream in(text);
    std::vector<int> out;
    int v;
    while (in >> v) out.push_back(v);
    std::string junk;
    if (in.bad() || (in.clear(), in >> junk))
        throw ConfigError(std::string(what) + " must be a list of integers, got '" + text + "'");
    return out;
}

bool amgm_verifies(int n) {
    certs::AmgmChain chain = certs::amgm_chain(n);
    for (const auto& step : chain.steps)
        if (!certs::verify(step)) return false;
    return !chain.steps.empty() || n == 1;
}

bool holder_verifies(int n, int d, int s) {
    certs::HolderLift lift = certs::holder_lift_certificate(n, d, s);
    for (const auto& part : lift.parts)
        if (!certs::verify(part)) return false;
    return certs::verify(lift.total);
}

int run_certify(const ExperimentConfig& cfg, Report& report, std::ostream& log) {
    std::vector<CertJob> jobs;
    auto add_amgm = [&](int n) {
        jobs.push_back({"amgm n=" + std::to_string(n), [n] { return amgm_verifies(n); }});
    };
    auto add_monomial = [&](const MultiIndex& alpha) {
        std::string label = "monomial";
        for (int e : alpha.exponents()) label += " " + std::to_string(e);
        jobs.push_back(
            {label, [alpha] { return certs::verify(certs::monomial_certificate(alpha)); }});
    };
    auto add_holder = [&](int n, int d, int s) {
        jobs.push_back({"holder n=" + std::to_string(n) + " d=" + std::to_string(d) +
                            " s=" + std::to_string(s),
                        [n, d, s] { return holder_verifies(n, d, s); }});
    };

    bool selected = cfg.amgm_n > 0 || !cfg.monomial.empty() || !cfg.holder.empty();
    if (cfg.amgm_n > 0) add_amgm(cfg.amgm_n);
    if (!cfg.monomial.empty()) {
        std::vector<int> e = parse_int_list(cfg.monomial, "monomial");
        if (e.empty()) throw ConfigError("monomial needs at least one exponent");
        add_monomial(MultiIndex(e));
    }
    if (!cfg.holder.empty()) {
        std::vector<int> t = parse_int_list(cfg.holder, "holder");
        if (t.size() != 3) throw ConfigError("holder takes exactly n d s");
        add_holder(t[0], t[1], t[2]);
    }
    if (!selected) {
        // the full exact suite: power-mean chains, small monomials, and
        // the degree-lift bundles
        for (int n = 2; n <= 4; ++n) add_amgm(n);
        for (int n = 1; n <= 3; ++n)
            for (int s = 1; s <= 4; ++s)
                for (const auto& alpha : monomials_of_degree(n, s)) add_monomial(alpha);
        add_holder(2, 4, 1);
        add_holder(2, 4, 2);
        add_holder(3, 4, 1);
        add_holder(2, 6, 1);
    }

    int passed = 0;
    bool all = true;
    for (const auto& job : jobs) {
        bool ok = job.check();
        all = all && ok;
        passed += ok ? 1 : 0;
        log << "verdict " << job.label << ": " << (ok ? "true" : "false") << "\n";
    }
    ReportRow row = base_row(cfg, cfg.seeds.front());
    row.recovered = passed;
    row.reason = all ? "ok" : "failed";
    report.rows.push_back(std::move(row));
    log << "[certify] " << passed << "/" << jobs.size() << " certificates verified\n";
    return all ? kExitOk : kExitCertFailed;
}

struct BenchCell {
    double tau;
    int n, m, d, k;
};

int worker_count(std::size_t jobs) {
    int workers = 1;
    if (const char* env = std::getenv("SOSDICT_WORKERS")) workers = std::max(1, std::atoi(env));
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), jobs));
}

int run_bench(const ExperimentConfig& cfg, Report& report, std::ostream& log) {
    std::vector<double> taus = cfg.grid_tau.value_or(std::vector<double>{cfg.tau});
    std::vector<int> ns = cfg.grid_n.value_or(std::vector<int>{cfg.n});
    std::vector<int> ms = cfg.grid_m.value_or(std::vector<int>{cfg.m});
    std::vector<int> ds = cfg.grid_d.value_or(std::vector<int>{cfg.d});
    std::vector<int> ks = cfg.grid_k.value_or(std::vector<int>{cfg.k});

    std::vector<BenchCell> cells;
    for (double tau : taus)
        for (int n : ns)
            for (int m : ms)
                for (int d : ds)
                    for (int k : ks) cells.push_back({tau, n, m, d, k});
    report.rows.resize(cells.size() * cfg.seeds.size());

    // each (cell, seed) job owns one preallocated row, so parallel order
    // cannot reorder the report
    auto job = [&](std::size_t ci, std::size_t si) {
        const BenchCell& cell = cells[ci];
        std::uint64_t seed = cfg.seeds[si];
        ReportRow& row = report.rows[ci * cfg.seeds.size() + si];
        row = base_row(cfg, seed);
        row.cell = static_cast<int>(ci);
        row.n = cell.n;
        row.m = cell.m;
        row.d = cell.d;
        row.k = cell.k;
        row.tau = cell.tau;
        try {
            std::uint64_t cell_seed = Rng(seed).derive(ci).base_seed();
            Stopwatch sw;
            Dictionary dict = gen_dictionary(cell.n, cell.m, cell_seed, cfg.orthonormalize);
            NiceSpec spec{cell.d, cell.tau};
            Rng data = Rng(cell_seed).derive(1);
            std::vector<Eigen::VectorXd> samples = synthesize(dict, spec, cfg.num_samples, data);
            row.ms_data = sw.lap();
            DecompConfig dc = to_decomp(cfg, cell.d, cell.k,
                                        Rng(cell_seed).derive(2).base_seed());
            RecoveredSet set = learn(samples, cell.d, dc, cfg.refined);
            row.ms_solve = sw.lap();
            score_row(set, &dict, cfg.epsilon, row);
            row.tau_hat = residual_or_skip(empirical_poly(samples, cell.d), set, cell.d);
            row.ms_certify = sw.lap();
        } catch (const std::exception& e) {
            // a broken cell must not sink the rest of the grid
            row.reason = std::string("error: ") + e.what();
        }
    };

    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) order.emplace_back(ci, si);

    int workers = worker_count(order.size());
    if (workers <= 1) {
        for (const auto& [ci, si] : order) job(ci, si);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < order.size();)
                    job(order[i].first, order[i].second);
            });
        for (auto& t : pool) t.join();
    }

    for (const auto& row : report.rows)
        log << "[bench] cell=" << row.cell << " tau=" << format_double(row.tau) << " n=" << row.n
            << " m=" << row.m << " seed=" << row.seed << ": " << row.recovered << " columns, "
            << row.reason << "\n";
    return kExitOk;
}

bool row_succeeded(const ReportRow& row) {
    if (row.reason.rfind("error", 0) == 0 || row.reason == "failed") return false;
    if (!row.cors.empty()) return row.close == 1;
    if (row.mode == "learn" || row.mode == "decompose" || row.mode == "bench")
        return row.recovered > 0 && row.reason != to_string(TerminationReason::RoundingExhausted) &&
               row.reason != to_string(TerminationReason::SolverStalled);
    return true;
}

int recovery_verdict(const Report& report) {
    bool stalled = false, partial = false;
    for (const auto& row : report.rows) {
        if (row.reason == to_string(TerminationReason::SolverStalled)) stalled = true;
        else if (!row_succeeded(row)) partial = true;
    }
    if (stalled) return kExitStalled;
    if (partial) return kExitPartial;
    return kExitOk;
}

}  // namespace

int run(const ExperimentConfig& cfg, Report& report, std::ostream& log) {
    int code = kExitOk;
    try {
        validate_config(cfg);
        if (cfg.mode == "gen") code = run_gen(cfg, report, log);
        else if (cfg.mode == "learn" || cfg.mode == "decompose")
            code = run_recovery(cfg, report, log);
        else if (cfg.mode == "certify") code = run_certify(cfg, report, log);
        else code = run_bench(cfg, report, log);
        if (code == kExitOk && cfg.mode != "gen" && cfg.mode != "certify")
            code = recovery_verdict(report);
        if (!cfg.report.empty()) {
            std::ofstream out(cfg.report);
            if (!out) throw IoError(cfg.report, false, "cannot open for writing");
            write_report_csv(out, report);
            out.flush();
            if (!out) throw IoError(cfg.report, false, "write failed");
        }
    } catch (const ParseError& e) {
        log << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const InsufficientSamples& e) {
        log << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const IoError& e) {
        log << e.what() << "\n";
        return e.missing() ? kExitMissingInput : kExitIo;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return code;
}

}  // namespace sosdict::cli
