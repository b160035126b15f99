#include "sosdict/gram.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>

#include "sosdict/sdp.hpp"

namespace sosdict {

std::optional<GramCertificate> sos_dominates(const PolyF& q, const PolyF& bound, int degree,
                                             double tol) {
    if (q.nvars() != bound.nvars())
        throw std::invalid_argument("sos_dominates: variable count mismatch");
    if (degree < 0 || degree % 2 != 0)
        throw std::invalid_argument("sos_dominates: even degree >= 0 required");

    PolyF diff = bound - q;
    if (diff.is_zero()) return GramCertificate{diff, {}, 0.0};
    if (diff.degree() > degree)
        throw std::invalid_argument("sos_dominates: degree too small to express the difference");

    int n = diff.nvars();
    // homogeneous differences decompose into homogeneous squares, so the
    // basis can stay on a single degree layer
    std::vector<MultiIndex> basis;
    if (diff.is_homogeneous()) {
        if (diff.degree() % 2 != 0) return std::nullopt;
        basis = monomials_of_degree(n, diff.degree() / 2);
    } else {
        basis = monomials_up_to(n, degree / 2);
    }
    int B = static_cast<int>(basis.size());

    // group Gram positions by the monomial they produce
    std::map<MultiIndex, std::vector<SdpEntry>> rows;
    for (int i = 0; i < B; ++i)
        for (int j = i; j < B; ++j)
            rows[basis[i] + basis[j]].push_back({0, i, j, i == j ? 1.0 : 2.0});
    for (const auto& [gamma, c] : diff.terms())
        if (!rows.count(gamma)) return std::nullopt;  // monomial unreachable from the basis

    SdpProblem problem;
    problem.block_dims = {B};
    for (auto& [gamma, entries] : rows) {
        SdpConstraint con;
        con.entries = entries;
        con.rhs = diff.coeff(gamma);
        problem.constraints.push_back(std::move(con));
    }

    SdpSolution sol = solve(problem, {tol, 200000});
    if (sol.status != SdpStatus::Feasible) return std::nullopt;

    GramCertificate cert;
    cert.target = diff;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.blocks[0]);
    for (int k = 0; k < B; ++k) {
        double lam = es.eigenvalues()[k];
        if (lam <= 0.0) continue;
        double w = std::sqrt(lam);
        PolyF square(n);
        for (int i = 0; i < B; ++i) square.add_term(basis[i], w * es.eigenvectors()(i, k));
        if (!square.is_zero()) cert.squares.push_back(std::move(square));
    }

    PolyF expansion(n);
    for (const auto& s : cert.squares) expansion += s * s;
    cert.residual = (expansion - diff).max_abs_coeff();
    return cert;
}

}  // namespace sosdict
