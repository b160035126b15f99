#include "sosdict/decomp.hpp"

#include <cmath>
#include <limits>

#include "sosdict/linear_forms.hpp"

namespace sosdict {

const char* to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::NoPseudoDistribution: return "no-pseudo-distribution";
        case TerminationReason::SolverStalled: return "solver-stalled";
        case TerminationReason::MaxColumns: return "max-columns";
        case TerminationReason::RoundingExhausted: return "rounding-exhausted";
    }
    return "unknown";
}

std::optional<TerminationReason> termination_from_string(std::string_view label) {
    for (auto r : {TerminationReason::NoPseudoDistribution, TerminationReason::SolverStalled,
                   TerminationReason::MaxColumns, TerminationReason::RoundingExhausted})
        if (label == to_string(r)) return r;
    return std::nullopt;
}

double correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& a) {
    double nu = u.squaredNorm(), na = a.squaredNorm();
    if (nu <= 0.0 || na <= 0.0) throw std::invalid_argument("correlation of a zero vector");
    double ip = u.dot(a);
    return ip * ip / (nu * na);
}

namespace {

struct DriverState {
    int nvars = 0;
    double gamma_eff = 0.0;
    double accept_threshold = 0.0;
    double feasibility_threshold = 0.0;
};

DriverState validate_config(const PolyF& P, const DecompConfig& cfg) {
    if (cfg.d < 2 || cfg.d % 2 != 0) throw std::invalid_argument("polynomial degree must be even");
    if (cfg.k < cfg.d || cfg.k % 2 != 0)
        throw std::invalid_argument("moment degree must be even and at least the polynomial degree");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
        throw std::invalid_argument("accuracy must lie in (0, 1)");
    if (!(cfg.tau >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    if (cfg.max_columns < 1) throw std::invalid_argument("column budget must be positive");
    if (P.degree() > cfg.d) throw std::invalid_argument("input polynomial degree exceeds configured d");

    double gamma = cfg.gamma < 0.0 ? 20.0 * cfg.epsilon : cfg.gamma;
    if (gamma / cfg.epsilon < cfg.c_sep)
        throw std::invalid_argument("separation too small relative to accuracy");

    DriverState st;
    st.nvars = P.nvars();
    st.gamma_eff = std::min(gamma, cfg.gamma_cap);
    st.accept_threshold = std::exp(-cfg.epsilon * cfg.d) - cfg.tau;
    st.feasibility_threshold = cfg.pd_threshold.value_or(1.0 - cfg.tau);
    return st;
}

PolyF separation_constraint(const Eigen::VectorXd& s, double gamma_eff) {
    // (1 - gamma) ||u||^2 - <s, u>^2 >= 0, homogeneous like the sphere
    int n = static_cast<int>(s.size());
    PolyF p = power_sum<double>(n, 2) * (1.0 - gamma_eff);
    p -= linear_form_power(s, 2);
    return p;
}

ConstraintSet build_constraints(const PolyF& P, const DriverState& st,
                                const std::vector<RecoveredVector>& recovered) {
    ConstraintSet cs;
    cs.nvars = st.nvars;
    cs.unit_sphere = true;
    PolyF floor = P;
    floor.add_term(MultiIndex::zero(st.nvars), -st.feasibility_threshold);
    cs.inequalities.push_back(floor);
    for (const auto& r : recovered) cs.inequalities.push_back(separation_constraint(r.v, st.gamma_eff));
    return cs;
}

// score used by the rounding step: the polynomial value, with candidates
// too close to an already recovered vector pushed below any threshold
double guarded_score(const PolyF& P, const std::vector<RecoveredVector>& recovered,
                     double gamma_eff, const Eigen::VectorXd& v) {
    for (const auto& r : recovered)
        if (correlation(v, r.v) > 1.0 - gamma_eff / 10.0)
            return -std::numeric_limits<double>::infinity();
    std::vector<double> x(v.data(), v.data() + v.size());
    return P.evaluate(x);
}

template <typename RoundFn>
RecoveredSet run_driver(const PolyF& P, const DecompConfig& cfg, const DriverState& st,
                        RoundFn round_one) {
    RecoveredSet out;
    for (int iteration = 0; iteration < cfg.max_columns; ++iteration) {
        ConstraintSet cs = build_constraints(P, st, out.vectors);
        FindResult fr = find(cs, std::nullopt, cfg.k, cfg.sdp);
        if (!fr.found()) {
            out.reason = fr.sdp_status == SdpStatus::Infeasible
                             ? TerminationReason::NoPseudoDistribution
                             : TerminationReason::SolverStalled;
            return out;
        }
        SampleOutcome rounded = round_one(*fr.pd, iteration, out.vectors);
        if (rounded.exhausted()) {
            out.reason = TerminationReason::RoundingExhausted;
            return out;
        }
        std::vector<double> x(rounded.vector->data(), rounded.vector->data() + rounded.vector->size());
        out.vectors.push_back(
            {*rounded.vector, P.evaluate(x), iteration, rounded.accepted_retry});
    }
    out.reason = TerminationReason::MaxColumns;
    return out;
}

}  // namespace

RecoveredSet decompose(const PolyF& P, const DecompConfig& cfg) {
    DriverState st = validate_config(P, cfg);
    Rng seed_stream(cfg.sampler.seed);
    auto round_one = [&](const PseudoDistribution& pd, int iteration,
                         const std::vector<RecoveredVector>& recovered) {
        SampleParams params = cfg.sampler;
        params.reweigh_degree = cfg.k - 2;
        params.seed = seed_stream.derive(static_cast<std::uint64_t>(iteration)).base_seed();
        auto score = [&](const Eigen::VectorXd& v) {
            return guarded_score(P, recovered, st.gamma_eff, v);
        };
        return sample_unit(pd, params, score, st.accept_threshold, cfg.strategy);
    };
    return run_driver(P, cfg, st, round_one);
}

RecoveredSet decompose_refined(const PolyF& P, std::span<const Eigen::VectorXd> samples,
                               const DecompConfig& cfg) {
    DriverState st = validate_config(P, cfg);
    const int batch = (cfg.k - 2) / 2;
    const std::size_t need = static_cast<std::size_t>(cfg.sampler.retries) *
                             static_cast<std::size_t>(batch);
    if (samples.size() < need)
        throw InsufficientSamples("sample pool holds " + std::to_string(samples.size()) +
                                  " vectors, need " + std::to_string(need));

    auto round_one = [&](const PseudoDistribution& pd, int iteration,
                         const std::vector<RecoveredVector>& recovered) {
        (void)iteration;
        SampleOutcome out;
        for (int retry = 0; retry < cfg.sampler.retries; ++retry) {
            auto slice = samples.subspan(static_cast<std::size_t>(retry) *
                                             static_cast<std::size_t>(batch),
                                         static_cast<std::size_t>(batch));
            ReweighPoly w = refined_reweigh_poly(slice, cfg.sampler.M);
            auto cand = extract_candidate(pd, w, cfg.strategy,
                                          cfg.sampler.seed ^ static_cast<std::uint64_t>(retry));
            ++out.attempts;
            if (!cand) continue;
            if (guarded_score(P, recovered, st.gamma_eff, *cand) >= st.accept_threshold) {
                out.vector = std::move(cand);
                out.accepted_retry = retry;
                return out;
            }
        }
        return out;
    };
    return run_driver(P, cfg, st, round_one);
}

ClosenessReport check_closeness(std::span<const Eigen::VectorXd> S,
                                std::span<const Eigen::VectorXd> T, double eps) {
    if (S.empty() || T.empty()) throw std::invalid_argument("closeness of an empty set");
    ClosenessReport rep;
    rep.close = true;
    rep.worst_cor = 2.0;
    auto scan = [&](std::span<const Eigen::VectorXd> from, std::span<const Eigen::VectorXd> to,
                    bool first) {
        for (std::size_t i = 0; i < from.size(); ++i) {
            double best = -1.0;
            int best_j = -1;
            for (std::size_t j = 0; j < to.size(); ++j) {
                double c = correlation(from[i], to[j]);
                if (c > best) {
                    best = c;
                    best_j = static_cast<int>(j);
                }
            }
            if (best < rep.worst_cor) {
                rep.worst_cor = best;
                rep.worst_index = static_cast<int>(i);
                rep.worst_match = best_j;
                rep.worst_in_first = first;
            }
            if (best < 1.0 - eps) rep.close = false;
        }
    };
    scan(S, T, true);
    scan(T, S, false);
    return rep;
}

double holder_degree_lift(double attained, int d, int k, double sigma) {
    if (d < 4 || d % 2 != 0) throw std::invalid_argument("base degree must be even and at least 4");
    if (k < d || k % (d - 2) != 0)
        throw std::invalid_argument("lifted degree must be a multiple of base degree minus 2");
    if (!(sigma >= 1.0)) throw std::invalid_argument("overcompleteness is at least 1");
    if (!(attained > 0.0)) return 0.0;
    double delta = -std::log(attained) / d;
    double lifted = static_cast<double>(d) / (d - 2) * delta + std::log(sigma) / (d - 2);
    return std::exp(-lifted * k);
}

double holder_degree_lift(const PseudoDistribution& pd, const PolyF& norm_poly, int d, int k,
                          double sigma) {
    return holder_degree_lift(pexpect(pd, norm_poly), d, k, sigma);
}

}  // namespace sosdict
