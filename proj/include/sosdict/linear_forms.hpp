#pragma once
//
// sosdict/linear_forms.hpp
//
// Eigen-facing polynomial helpers: expanding powers of linear forms and
// substituting a linear change of variables.
//

#include <Eigen/Dense>

#include <vector>

#include "sosdict/polynomial.hpp"

namespace sosdict {

inline PolyF linear_form_power(const Eigen::VectorXd& a, int d) {
    std::vector<double> v(a.data(), a.data() + a.size());
    return linear_form_power(v, d);
}

// p in m variables composed with the linear map u -> A^T u, giving a
// polynomial in n variables; A is n x m
inline PolyF substitute_linear(const PolyF& p, const Eigen::MatrixXd& A) {
    if (A.cols() != p.nvars())
        throw std::invalid_argument("substitute_linear: A must have one column per variable of p");
    int n = static_cast<int>(A.rows());
    if (n < 1) throw std::invalid_argument("substitute_linear: A must have at least one row");
    std::vector<PolyF> images;
    images.reserve(p.nvars());
    for (int j = 0; j < p.nvars(); ++j) {
        PolyF form(n);
        for (int i = 0; i < n; ++i) form.add_term(MultiIndex::unit(n, i), A(i, j));
        images.push_back(std::move(form));
    }
    return p.substitute(images);
}

// sum_j <a_j, u>^d over the columns of A, i.e. ||A^T u||_d^d for even d
inline PolyF columns_power_sum(const Eigen::MatrixXd& A, int d) {
    PolyF out(static_cast<int>(A.rows()));
    for (int j = 0; j < A.cols(); ++j) out += linear_form_power(A.col(j).eval(), d);
    return out;
}

}  // namespace sosdict
