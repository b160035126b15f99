#include "sosdict/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "sosdict/linear_forms.hpp"

namespace sosdict {

PolyF ReweighPoly::as_polynomial() const {
    if (factors.empty()) throw std::logic_error("reweigh polynomial has no factors");
    const int n = nvars();
    PolyF w = PolyF::constant(n, scale);
    for (const auto& xi : factors) {
        if (static_cast<int>(xi.size()) != n)
            throw std::invalid_argument("reweigh factors disagree on dimension");
        w = w * linear_form_power(xi, 2);
    }
    return w;
}

namespace {

// density and upper tail of the standard normal
double phi(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }
double upper_tail(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

// hazard rate phi(t)/Q(t); erfc underflows past t ~ 37, so switch to the
// continued-fraction style expansion well before that
double hazard(double t) {
    if (t > 30.0) {
        double inv2 = 1.0 / (t * t);
        return t / (1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2)));
    }
    return phi(t) / upper_tail(t);
}

}  // namespace

double truncated_second_moment(double t) { return 1.0 + t * hazard(t); }

double tau_threshold(double M) {
    if (!(M > 1.0)) throw std::domain_error("conditioning level must exceed 1");
    // the conditional second moment dips below 1 for negative thresholds
    // and equals 1 at zero, so the bracket start at -10 never binds; it is
    // kept so a returned value can never fall below that floor
    double lo = -10.0;
    double hi = 1.0;
    while (truncated_second_moment(hi) < M) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (truncated_second_moment(mid) < M)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ReweighPoly draw_reweigh_poly(int n, int t, double M,
                              const std::optional<Eigen::VectorXd>& conditioned_on, Rng& rng) {
    if (n < 1) throw std::invalid_argument("need at least one variable");
    if (t < 1) throw std::invalid_argument("need at least one factor");
    if (!(M >= 1.0)) throw std::invalid_argument("scale level must be at least 1");
    double tau = 0.0;
    if (conditioned_on) {
        if (static_cast<int>(conditioned_on->size()) != n)
            throw std::invalid_argument("conditioning vector has wrong dimension");
        if (std::abs(conditioned_on->norm() - 1.0) > 1e-9)
            throw std::invalid_argument("conditioning vector must be unit length");
        tau = tau_threshold(M + 1.0);
    }

    ReweighPoly w;
    w.scale = std::pow(M, -t);
    w.factors.reserve(static_cast<std::size_t>(t));
    for (int j = 0; j < t; ++j) {
        Eigen::VectorXd xi(n);
        do {
            for (int i = 0; i < n; ++i) xi(i) = rng.gaussian();
            if (conditioned_on) {
                const Eigen::VectorXd& c = *conditioned_on;
                double along = rng.truncated_normal_lower(tau);
                xi += (along - c.dot(xi)) * c;
            }
        } while (xi.isZero());
        w.factors.push_back(std::move(xi));
    }
    return w;
}

ReweighPoly refined_reweigh_poly(std::span<const Eigen::VectorXd> samples, double M_scale) {
    if (samples.empty()) throw std::invalid_argument("need at least one sample");
    if (!(M_scale > 0.0)) throw std::invalid_argument("scale level must be positive");
    ReweighPoly w;
    w.scale = std::pow(M_scale, -static_cast<double>(samples.size()));
    w.factors.reserve(samples.size());
    for (const auto& y : samples) {
        if (y.isZero()) throw std::invalid_argument("zero sample vector in reweigh pool");
        if (y.size() != samples.front().size())
            throw std::invalid_argument("samples disagree on dimension");
        w.factors.push_back(y);
    }
    return w;
}

std::optional<Eigen::VectorXd> extract_candidate(const PseudoDistribution& pd,
                                                 const ReweighPoly& W, ExtractStrategy strategy,
                                                 std::uint64_t seed) {
    const int n = pd.nvars();
    if (W.nvars() != n) throw std::invalid_argument("reweigh polynomial has wrong dimension");
    if (pd.degree() < W.degree() + 2)
        throw std::invalid_argument("pseudo-distribution degree too small for this reweighing");
    PolyF wp = W.as_polynomial();

    Eigen::VectorXd cand;
    if (strategy == ExtractStrategy::Eigenvector) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double entry = 0.0;
                for (const auto& [gamma, coeff] : wp.terms()) {
                    MultiIndex shifted = gamma + MultiIndex::unit(n, i) + MultiIndex::unit(n, j);
                    entry += coeff * pd.moment(shifted);
                }
                M(i, j) = entry;
                M(j, i) = entry;
            }
        }
        double magnitude = M.cwiseAbs().maxCoeff();
        if (magnitude <= 1e-12) return std::nullopt;  // no signal in the moments
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        cand = es.eigenvectors().col(n - 1);
    } else {
        auto reweighed = reweigh(pd, wp, /*weight_is_sos_by_construction=*/true);
        if (!reweighed) return std::nullopt;  // weight annihilates the functional
        GaussianSampler gs = gaussian_match(*reweighed, seed);
        cand = gs.draw();
        if (cand.norm() <= 1e-12) return std::nullopt;
        cand.normalize();
    }

    // fix the sign so equal candidates compare equal across runs
    int top = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(cand(i)) > std::abs(cand(top))) top = i;
    if (cand(top) < 0.0) cand = -cand;
    return cand;
}

double default_conditioning(double epsilon) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("accuracy must lie in (0, 1)");
    return std::log(1.0 / epsilon) / epsilon;
}

SampleOutcome sample_unit(const PseudoDistribution& pd, const SampleParams& params,
                          const std::function<double(const Eigen::VectorXd&)>& score,
                          double threshold, ExtractStrategy strategy) {
    if (params.reweigh_degree < 2 || params.reweigh_degree % 2 != 0)
        throw std::invalid_argument("reweigh degree must be even and at least 2");
    if (pd.degree() < params.reweigh_degree + 2)
        throw std::invalid_argument("pseudo-distribution degree too small for this reweighing");
    if (params.retries < 0) throw std::invalid_argument("negative retry budget");
    const int t = params.reweigh_degree / 2;

    SampleOutcome out;
    Rng base(params.seed);
    for (int i = 0; i < params.retries; ++i) {
        // independent stream per retry: the winner is reproducible from
        // (seed, retry index) without replaying earlier attempts
        Rng r = base.derive(static_cast<std::uint64_t>(i));
        ReweighPoly w = draw_reweigh_poly(pd.nvars(), t, params.M, std::nullopt, r);
        auto cand = extract_candidate(pd, w, strategy, r.next_u64());
        ++out.attempts;
        if (cand && score(*cand) >= threshold) {
            out.vector = std::move(cand);
            out.accepted_retry = i;
            return out;
        }
    }
    return out;
}

GateReport second_moment_gate(std::span<const double> a_vals, std::span<const double> b_vals,
                              double eps, double delta) {
    if (a_vals.size() != b_vals.size() || a_vals.empty())
        throw std::invalid_argument("need paired nonempty samples");
    const std::size_t N = a_vals.size();
    double ea = 0.0, eb = 0.0, eb2 = 0.0, slack2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double a = a_vals[i], b = b_vals[i];
        if (!(a >= 0.0) || a > b) throw std::invalid_argument("samples must satisfy 0 <= A <= B");
        ea += a;
        eb += b;
        eb2 += b * b;
    }
    ea /= static_cast<double>(N);
    eb /= static_cast<double>(N);
    eb2 /= static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) {
        double d = (a_vals[i] - eps * b_vals[i]) - (ea - eps * eb);
        slack2 += d * d;
    }
    double slack_se = std::sqrt(slack2 / static_cast<double>(N)) / std::sqrt(static_cast<double>(N));

    GateReport rep;
    rep.premise_holds = ea - eps * eb <= 3.0 * slack_se;
    if (eb <= 0.0) {
        // all-zero pairs: the event A <= anything holds trivially
        rep.t_hat = 1.0;
        rep.frequency = 1.0;
        rep.bound = delta * delta / 9.0;
        rep.pass = rep.premise_holds;
        return rep;
    }
    rep.t_hat = eb2 / (eb * eb);
    rep.bound = delta * delta / (9.0 * rep.t_hat);
    std::size_t hits = 0;
    double cutoff = std::exp(delta) * eps;
    for (std::size_t i = 0; i < N; ++i)
        if (a_vals[i] <= cutoff * b_vals[i]) ++hits;
    rep.frequency = static_cast<double>(hits) / static_cast<double>(N);
    double se = std::sqrt(rep.frequency * (1.0 - rep.frequency) / static_cast<double>(N));
    rep.pass = rep.premise_holds && rep.frequency >= rep.bound - 3.0 * se;
    return rep;
}

}  // namespace sosdict
