#pragma once
//
// sosdict/flattening.hpp
//
// Degree-d flattening of a homogeneous polynomial into a symmetric matrix
// indexed by degree-d/2 monomials, plus the spectral norm taken in the
// isometric (multiplicity-weighted) basis.
//
// Coefficient placement: a square monomial u^(2a) sits entirely on the
// diagonal at (a, a); every other monomial is split evenly over the ordered
// index pairs that sum to it. This keeps rational flattenings exact under
// round-trips and makes multiples of ||u||_2^d land on multiples of the
// identity after the isometric rescale, so their norm is read off exactly.
//

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "sosdict/polynomial.hpp"

namespace sosdict {

template <class K>
struct Flattening {
    int half_degree = 0;
    std::vector<MultiIndex> basis;      // monomials of degree exactly half_degree
    std::vector<K> mat;                 // dense row-major, symmetric

    int dim() const { return static_cast<int>(basis.size()); }
    K& at(int i, int j) { return mat[static_cast<size_t>(i) * basis.size() + j]; }
    const K& at(int i, int j) const { return mat[static_cast<size_t>(i) * basis.size() + j]; }
};

template <class K>
Flattening<K> flatten(const Polynomial<K>& p, int d) {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("flatten: even degree d >= 2 required");
    if (!p.is_zero() && (!p.is_homogeneous() || p.degree() != d))
        throw std::invalid_argument("flatten: polynomial must be homogeneous of degree d");

    Flattening<K> f;
    f.half_degree = d / 2;
    f.basis = monomials_of_degree(p.nvars(), d / 2);
    f.mat.assign(static_cast<size_t>(f.basis.size()) * f.basis.size(), scalar_traits<K>::zero());

    std::map<MultiIndex, int> index;
    for (int i = 0; i < f.dim(); ++i) index.emplace(f.basis[i], i);

    for (const auto& [gamma, c] : p.terms()) {
        if (gamma.all_even()) {
            int i = index.at(gamma.half());
            f.at(i, i) += c;
            continue;
        }
        // collect the ordered representing pairs (alpha, gamma - alpha)
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < f.dim(); ++i) {
            auto beta = gamma.minus(f.basis[i]);
            if (beta) pairs.emplace_back(i, index.at(*beta));
        }
        K share = c / K(static_cast<long>(pairs.size()));
        for (auto [i, j] : pairs) f.at(i, j) += share;
    }
    return f;
}

template <class K>
Polynomial<K> unflatten(const Flattening<K>& f) {
    if (f.basis.empty()) throw std::invalid_argument("unflatten: empty flattening");
    int n = f.basis[0].nvars();
    Polynomial<K> p(n);
    for (int i = 0; i < f.dim(); ++i)
        for (int j = 0; j < f.dim(); ++j) p.add_term(f.basis[i] + f.basis[j], f.at(i, j));
    return p;
}

// matrix rescaled into the basis where the monomial map is an isometry on
// the sphere: entry (a,b) divided by sqrt(multinomial(a) * multinomial(b)),
// since sum_a multinomial(a) u^(2a) = ||u||_2^d
inline Eigen::MatrixXd scaled_matrix(const Flattening<double>& f) {
    int B = f.dim();
    Eigen::VectorXd w(B);
    for (int i = 0; i < B; ++i)
        w[i] = 1.0 / std::sqrt(static_cast<double>(multinomial(f.basis[i])));
    Eigen::MatrixXd M(B, B);
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j) M(i, j) = f.at(i, j) * w[i] * w[j];
    return M;
}

// spectral norm of the flattening in the isometric basis; dominates |p(u)|
// over the unit sphere
inline double operator_norm(const Flattening<double>& f) {
    if (f.dim() == 0) return 0.0;
    Eigen::MatrixXd M = scaled_matrix(f);
    M = 0.5 * (M + M.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

}  // namespace sosdict
