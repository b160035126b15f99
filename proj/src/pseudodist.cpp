#include "sosdict/pseudodist.hpp"

#include <cmath>
#include <stdexcept>

#include "sosdict/gram.hpp"

namespace sosdict {

PseudoDistribution::PseudoDistribution(int nvars, int degree, std::map<MultiIndex, double> moments)
    : nvars_(nvars), degree_(degree), moments_(std::move(moments)) {
    if (nvars < 1) throw std::invalid_argument("PseudoDistribution: nvars >= 1 required");
    if (degree < 2 || degree % 2 != 0)
        throw std::invalid_argument("PseudoDistribution: even degree >= 2 required");

    const MultiIndex zero = MultiIndex::zero(nvars);
    auto it = moments_.find(zero);
    if (it == moments_.end() || it->second <= 0.0)
        throw std::invalid_argument("PseudoDistribution: normalization moment missing or nonpositive");
    // rescale so the functional is exactly normalized
    double e1 = it->second;
    if (e1 != 1.0)
        for (auto& [alpha, v] : moments_) v /= e1;

    basis_ = monomials_up_to(nvars, degree / 2);
    int B = static_cast<int>(basis_.size());
    matrix_.resize(B, B);
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j) matrix_(i, j) = moment(basis_[i] + basis_[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
    eps_psd_ = std::max(0.0, -es.eigenvalues().minCoeff());
}

double PseudoDistribution::moment(const MultiIndex& alpha) const {
    if (alpha.nvars() != nvars_)
        throw std::invalid_argument("PseudoDistribution::moment: variable count mismatch");
    if (alpha.degree() > degree_)
        throw std::invalid_argument("PseudoDistribution::moment: degree exceeds the functional");
    auto it = moments_.find(alpha);
    if (it == moments_.end())
        throw std::logic_error("PseudoDistribution::moment: missing moment entry");
    return it->second;
}

PseudoDistribution from_distribution(std::span<const std::pair<double, Eigen::VectorXd>> support,
                                     int degree) {
    if (support.empty()) throw std::invalid_argument("from_distribution: empty support");
    int n = static_cast<int>(support[0].second.size());
    double total = 0.0;
    for (const auto& [w, x] : support) {
        if (w < 0.0) throw std::invalid_argument("from_distribution: negative weight");
        if (static_cast<int>(x.size()) != n)
            throw std::invalid_argument("from_distribution: point dimension mismatch");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("from_distribution: weights sum to zero");

    std::map<MultiIndex, double> moments;
    for (const auto& alpha : monomials_up_to(n, degree)) {
        double acc = 0.0;
        for (const auto& [w, x] : support) {
            double mono = 1.0;
            for (int i = 0; i < n; ++i)
                for (int e = 0; e < alpha[i]; ++e) mono *= x[i];
            acc += w * mono;
        }
        moments[alpha] = acc / total;
    }
    return PseudoDistribution(n, degree, std::move(moments));
}

double pexpect(const PseudoDistribution& pd, const PolyF& p) {
    if (p.nvars() != pd.nvars())
        throw std::invalid_argument("pexpect: variable count mismatch");
    if (p.degree() > pd.degree())
        throw std::invalid_argument("pexpect: polynomial degree exceeds the functional");
    double acc = 0.0;
    for (const auto& [alpha, c] : p.terms()) acc += c * pd.moment(alpha);
    return acc;
}

namespace {

struct MomentIndexing {
    std::vector<MultiIndex> basis;
    std::vector<MultiIndex> all_moments;
    std::map<MultiIndex, std::pair<int, int>> canonical;  // gamma -> (i, j), i <= j

    MomentIndexing(int n, int degree) {
        basis = monomials_up_to(n, degree / 2);
        all_moments = monomials_up_to(n, degree);
        int B = static_cast<int>(basis.size());
        for (int i = 0; i < B; ++i)
            for (int j = i; j < B; ++j) canonical.try_emplace(basis[i] + basis[j], i, j);
    }
};

// accumulate "sum_gamma coeff(gamma) * moment(gamma)" into canonical matrix
// positions of the moment block
void accumulate_moment_row(const MomentIndexing& ix, const PolyF& p, const MultiIndex& shift,
                           double sign, std::map<std::pair<int, int>, double>& acc) {
    for (const auto& [gamma, c] : p.terms()) {
        auto pos = ix.canonical.at(gamma + shift);
        acc[pos] += sign * c;
    }
}

std::vector<SdpEntry> to_entries(const std::map<std::pair<int, int>, double>& acc, int block) {
    std::vector<SdpEntry> out;
    for (const auto& [pos, coeff] : acc)
        if (coeff != 0.0) out.push_back({block, pos.first, pos.second, coeff});
    return out;
}

}  // namespace

FindResult find(const ConstraintSet& constraints, const std::optional<PolyF>& objective,
                int degree, const SdpOptions& options) {
    int n = constraints.nvars;
    if (n < 1) throw std::invalid_argument("find: constraint set must name its variable count");
    if (degree < 2 || degree % 2 != 0)
        throw std::invalid_argument("find: even degree >= 2 required");

    std::vector<PolyF> equalities = constraints.equalities;
    if (constraints.unit_sphere) {
        PolyF sphere = power_sum<double>(n, 2) - PolyF::constant(n, 1.0);
        equalities.push_back(sphere);
    }
    for (const auto& p : equalities) {
        if (p.nvars() != n) throw std::invalid_argument("find: equality variable count mismatch");
        if (p.degree() > degree)
            throw std::invalid_argument("find: equality degree exceeds the relaxation");
    }
    for (const auto& p : constraints.inequalities) {
        if (p.nvars() != n) throw std::invalid_argument("find: inequality variable count mismatch");
        if (p.degree() > degree)
            throw std::invalid_argument("find: inequality degree exceeds the relaxation");
    }
    if (objective) {
        if (objective->nvars() != n)
            throw std::invalid_argument("find: objective variable count mismatch");
        if (objective->degree() > degree)
            throw std::invalid_argument("find: objective degree exceeds the relaxation");
    }

    MomentIndexing ix(n, degree);
    int B = static_cast<int>(ix.basis.size());

    SdpProblem problem;
    problem.block_dims.push_back(B);

    // normalization E[1] = 1
    {
        SdpConstraint con;
        con.entries.push_back({0, 0, 0, 1.0});
        con.rhs = 1.0;
        problem.constraints.push_back(std::move(con));
    }

    // consistency: every matrix position carrying the same monomial equals
    // its canonical representative
    for (int i = 0; i < B; ++i) {
        for (int j = i; j < B; ++j) {
            auto canon = ix.canonical.at(ix.basis[i] + ix.basis[j]);
            if (canon == std::make_pair(i, j)) continue;
            SdpConstraint con;
            con.entries.push_back({0, i, j, 1.0});
            con.entries.push_back({0, canon.first, canon.second, -1.0});
            con.rhs = 0.0;
            problem.constraints.push_back(std::move(con));
        }
    }

    // equality constraints: E[P u^a] = 0 for all |a| <= degree - deg P
    for (const auto& p : equalities) {
        for (const auto& alpha : monomials_up_to(n, degree - p.degree())) {
            std::map<std::pair<int, int>, double> acc;
            accumulate_moment_row(ix, p, alpha, 1.0, acc);
            SdpConstraint con;
            con.entries = to_entries(acc, 0);
            con.rhs = 0.0;
            if (!con.entries.empty()) problem.constraints.push_back(std::move(con));
        }
    }

    // inequality constraints: a PSD localizing block linked entrywise to
    // E[P u^(a+b)] over a basis of degree (degree - deg P) / 2
    for (size_t q = 0; q < constraints.inequalities.size(); ++q) {
        const PolyF& p = constraints.inequalities[q];
        auto loc_basis = monomials_up_to(n, (degree - p.degree()) / 2);
        int L = static_cast<int>(loc_basis.size());
        int block = static_cast<int>(problem.block_dims.size());
        problem.block_dims.push_back(L);
        for (int i = 0; i < L; ++i) {
            for (int j = i; j < L; ++j) {
                std::map<std::pair<int, int>, double> acc;
                accumulate_moment_row(ix, p, loc_basis[i] + loc_basis[j], -1.0, acc);
                SdpConstraint con;
                con.entries.push_back({block, i, j, 1.0});
                auto linked = to_entries(acc, 0);
                con.entries.insert(con.entries.end(), linked.begin(), linked.end());
                con.rhs = 0.0;
                problem.constraints.push_back(std::move(con));
            }
        }
    }

    if (objective) {
        std::map<std::pair<int, int>, double> acc;
        accumulate_moment_row(ix, *objective, MultiIndex::zero(n), 1.0, acc);
        problem.objective = to_entries(acc, 0);
    }

    SdpSolution sol = solve(problem, options);

    FindResult result;
    result.sdp_status = sol.status;
    result.infeasibility_evidence = sol.infeasibility_evidence;
    result.iterations = sol.iterations;
    if (sol.status != SdpStatus::Feasible) return result;

    std::map<MultiIndex, double> moments;
    for (const auto& gamma : ix.all_moments) {
        auto pos = ix.canonical.at(gamma);
        moments[gamma] = sol.blocks[0](pos.first, pos.second);
    }
    PseudoDistribution pd(n, degree, std::move(moments));
    pd.solver_tol = options.tol;
    pd.solver_eps_feasibility = sol.eps_feasibility;
    result.pd = std::move(pd);
    return result;
}

std::optional<PseudoDistribution> reweigh(const PseudoDistribution& pd, const PolyF& weight,
                                          bool weight_is_sos_by_construction,
                                          double degenerate_tol) {
    if (weight.nvars() != pd.nvars())
        throw std::invalid_argument("reweigh: variable count mismatch");
    int new_degree = pd.degree() - weight.degree();
    if (new_degree < 2)
        throw std::invalid_argument("reweigh: residual degree below 2");

    if (!weight_is_sos_by_construction) {
        auto cert = sos_dominates(PolyF::zero(weight.nvars()), weight,
                                  weight.degree() + (weight.degree() % 2), 1e-7);
        if (!cert)
            throw std::invalid_argument("reweigh: weight is not a certified sum of squares");
    }

    double denom = pexpect(pd, weight);
    if (denom <= degenerate_tol) return std::nullopt;

    std::map<MultiIndex, double> moments;
    for (const auto& alpha : monomials_up_to(pd.nvars(), new_degree)) {
        double acc = 0.0;
        for (const auto& [gamma, c] : weight.terms()) acc += c * pd.moment(gamma + alpha);
        moments[alpha] = acc / denom;
    }
    PseudoDistribution out(pd.nvars(), new_degree, std::move(moments));
    out.solver_tol = pd.solver_tol;
    out.solver_eps_feasibility = pd.solver_eps_feasibility;
    return out;
}

Eigen::VectorXd GaussianSampler::draw() {
    Eigen::VectorXd g(factor_.cols());
    for (int i = 0; i < g.size(); ++i) g[i] = rng_.gaussian();
    return mean_ + factor_ * g;
}

GaussianSampler gaussian_match(const PseudoDistribution& pd, std::uint64_t seed,
                               double psd_clip_tol) {
    int n = pd.nvars();
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd second(n, n);
    for (int i = 0; i < n; ++i) {
        mean[i] = pd.moment(MultiIndex::unit(n, i));
        for (int j = 0; j < n; ++j)
            second(i, j) = pd.moment(MultiIndex::unit(n, i) + MultiIndex::unit(n, j));
    }
    Eigen::MatrixXd cov = second - mean * mean.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -psd_clip_tol)
        throw std::domain_error("gaussian_match: covariance indefinite beyond tolerance");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd factor = es.eigenvectors() * lam.asDiagonal();
    return GaussianSampler(std::move(mean), std::move(factor), Rng(seed));
}

}  // namespace sosdict
