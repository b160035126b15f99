#include "sosdict/sdp.hpp"

#include <cmath>
#include <stdexcept>

namespace sosdict {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// layout of the stacked scaled vectorization: per block, upper-triangular
// entries column by row with off-diagonals scaled by sqrt(2), so Frobenius
// inner products become plain dot products
struct SvecLayout {
    std::vector<int> dims;
    std::vector<int> offsets;
    int total = 0;

    explicit SvecLayout(const std::vector<int>& block_dims) : dims(block_dims) {
        offsets.reserve(dims.size());
        for (int d : dims) {
            offsets.push_back(total);
            total += d * (d + 1) / 2;
        }
    }

    int index(int block, int row, int col) const {
        // (row, col) with row <= col inside the block's packed triangle
        int d = dims[block];
        return offsets[block] + row * d - row * (row - 1) / 2 + (col - row);
    }

    std::vector<Eigen::MatrixXd> unpack(const Eigen::VectorXd& v) const {
        std::vector<Eigen::MatrixXd> blocks;
        blocks.reserve(dims.size());
        for (size_t bl = 0; bl < dims.size(); ++bl) {
            int d = dims[bl];
            Eigen::MatrixXd M(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double val = v[index(static_cast<int>(bl), i, j)];
                    if (i != j) val /= kSqrt2;
                    M(i, j) = val;
                    M(j, i) = val;
                }
            blocks.push_back(std::move(M));
        }
        return blocks;
    }

    void pack(const std::vector<Eigen::MatrixXd>& blocks, Eigen::VectorXd& v) const {
        for (size_t bl = 0; bl < dims.size(); ++bl) {
            int d = dims[bl];
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double val = blocks[bl](i, j);
                    if (i != j) val *= kSqrt2;
                    v[index(static_cast<int>(bl), i, j)] = val;
                }
        }
    }
};

// functional row in svec coordinates: coeff on entry (i,j), i < j, means
// coeff * X_ij once, which is (coeff / sqrt(2)) against the scaled entry
void add_entries_to_row(const SvecLayout& layout, const std::vector<SdpEntry>& entries,
                        Eigen::VectorXd& row) {
    for (const auto& e : entries) {
        double c = e.coeff;
        if (e.row != e.col) c /= kSqrt2;
        row[layout.index(e.block, e.row, e.col)] += c;
    }
}

void project_psd_inplace(const SvecLayout& layout, Eigen::VectorXd& v,
                         std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>& solvers) {
    auto blocks = layout.unpack(v);
    for (size_t bl = 0; bl < blocks.size(); ++bl) {
        auto& M = blocks[bl];
        if (M.rows() == 1) {
            M(0, 0) = std::max(0.0, M(0, 0));
            continue;
        }
        auto& es = solvers[bl];
        es.compute(M);
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        M = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    }
    layout.pack(blocks, v);
}

}  // namespace

void SdpProblem::validate() const {
    if (block_dims.empty()) throw std::invalid_argument("SdpProblem: no blocks");
    for (int d : block_dims)
        if (d < 1) throw std::invalid_argument("SdpProblem: block dimension must be positive");
    auto check_entries = [&](const std::vector<SdpEntry>& entries, const char* what) {
        for (const auto& e : entries) {
            if (e.block < 0 || e.block >= static_cast<int>(block_dims.size()))
                throw std::invalid_argument(std::string("SdpProblem: bad block index in ") + what);
            int d = block_dims[e.block];
            if (e.row < 0 || e.col < 0 || e.row >= d || e.col >= d)
                throw std::invalid_argument(std::string("SdpProblem: entry out of range in ") + what);
            if (e.row > e.col)
                throw std::invalid_argument(std::string("SdpProblem: entries must have row <= col in ") +
                                            what);
            if (!std::isfinite(e.coeff))
                throw std::invalid_argument(std::string("SdpProblem: non-finite coefficient in ") + what);
        }
    };
    for (const auto& c : constraints) {
        check_entries(c.entries, "constraint");
        if (!std::isfinite(c.rhs)) throw std::invalid_argument("SdpProblem: non-finite rhs");
    }
    check_entries(objective, "objective");
}

double constraint_value(const SdpConstraint& c, const std::vector<Eigen::MatrixXd>& blocks) {
    double v = 0.0;
    for (const auto& e : c.entries) v += e.coeff * blocks[e.block](e.row, e.col);
    return v;
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
    problem.validate();
    if (options.tol <= 0) throw std::invalid_argument("solve: tol must be positive");
    if (options.max_iters < 1) throw std::invalid_argument("solve: max_iters must be positive");

    const SvecLayout layout(problem.block_dims);
    const int N = layout.total;
    const int m = static_cast<int>(problem.constraints.size());

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, N);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(std::max(m, 1));
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(N);
        add_entries_to_row(layout, problem.constraints[i].entries, row);
        // equilibrate rows so the affine projector is well conditioned
        double scale = row.cwiseAbs().maxCoeff();
        if (scale == 0.0) {
            if (std::abs(problem.constraints[i].rhs) > options.tol)
                throw std::invalid_argument("solve: constraint with empty functional and nonzero rhs");
            scale = 1.0;
        }
        row_scale[i] = scale;
        A.row(i) = row / scale;
        b[i] = problem.constraints[i].rhs / scale;
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
    add_entries_to_row(layout, problem.objective, c);
    const bool has_objective = c.squaredNorm() > 0.0;

    SdpSolution sol;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    if (m > 0) {
        cod.compute(A);
        // estimate conditioning from the triangular factor of the
        // rank-revealing decomposition
        Eigen::VectorXd tdiag = cod.matrixT()
                                    .topLeftCorner(cod.rank(), cod.rank())
                                    .diagonal()
                                    .cwiseAbs();
        if (tdiag.size() > 0 && tdiag.minCoeff() > 0.0 &&
            tdiag.maxCoeff() / tdiag.minCoeff() > 1e12) {
            sol.condition_warning = "constraint matrix nearly rank deficient";
        }
    }

    auto project_affine = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
        if (m == 0) return p;
        return p - cod.solve(A * p - b);
    };

    // setup-time inconsistency: the affine system alone has no solution
    if (m > 0) {
        Eigen::VectorXd x0 = cod.solve(b);
        double resid = (A * x0 - b).cwiseAbs().maxCoeff();
        if (resid > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
            sol.status = SdpStatus::Infeasible;
            sol.infeasibility_evidence = resid;
            sol.blocks = layout.unpack(Eigen::VectorXd::Zero(N));
            return sol;
        }
    }

    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers(problem.block_dims.size());

    double rho = 1.0;
    const double relax = 1.6;
    Eigen::VectorXd x = project_affine(Eigen::VectorXd::Zero(N));
    Eigen::VectorXd z = x;
    project_psd_inplace(layout, z, solvers);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);

    double rhs_abs = 0.0;
    for (const auto& con : problem.constraints) rhs_abs = std::max(rhs_abs, std::abs(con.rhs));
    const double b_scale = 1.0 + rhs_abs;
    const double sqrtN = std::sqrt(static_cast<double>(N));

    // lazily built least-squares factor of A^T for dual certificates
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_at;
    bool have_cod_at = false;

    double prev_window_r = -1.0;
    long iter = 0;
    for (iter = 1; iter <= options.max_iters; ++iter) {
        Eigen::VectorXd x_in = z - u;
        if (has_objective) x_in += c / rho;
        x = project_affine(x_in);

        Eigen::VectorXd xh = relax * x + (1.0 - relax) * z;
        Eigen::VectorXd z_prev = z;
        z = xh + u;
        project_psd_inplace(layout, z, solvers);
        u += xh - z;

        double r_norm = (x - z).norm();
        double s_norm = rho * (z - z_prev).norm();
        double eps_pri = sqrtN * options.tol + options.tol * std::max(x.norm(), z.norm());
        double eps_dual = sqrtN * options.tol + options.tol * rho * u.norm();

        if (r_norm <= eps_pri && s_norm <= eps_dual) {
            // gate on the residual in original (unequilibrated) units
            double feas = 0.0;
            if (m > 0)
                feas = ((A * z - b).cwiseAbs().array() * row_scale.array()).maxCoeff();
            if (feas <= options.tol * b_scale) break;
        }

        // balance the residuals by rescaling the penalty occasionally
        if (iter % 100 == 0) {
            if (r_norm > 10.0 * s_norm && rho < 1e6) {
                rho *= 1.5;
                u /= 1.5;
            } else if (s_norm > 10.0 * r_norm && rho > 1e-6) {
                rho /= 1.5;
                u *= 1.5;
            }
        }

        // primal residual stuck far from zero: look for a separating
        // functional certifying that the affine slice misses the cone
        if (iter % 1000 == 0 && m > 0) {
            double scale = std::max(1.0, std::max(x.norm(), z.norm()));
            double r_rel = r_norm / scale;
            bool plateau = prev_window_r >= 0.0 && r_rel > 1e-4 &&
                           (prev_window_r - r_rel) < 1e-3 * prev_window_r;
            prev_window_r = r_rel;
            if (plateau) {
                Eigen::VectorXd delta = z - x;
                double dn = delta.norm();
                if (dn > 0) {
                    delta /= dn;
                    if (!have_cod_at) {
                        cod_at.compute(A.transpose());
                        have_cod_at = true;
                    }
                    Eigen::VectorXd y = cod_at.solve(delta);
                    double fit = (A.transpose() * y - delta).norm();
                    if (fit <= 0.05) {
                        auto Sb = layout.unpack(A.transpose() * y);
                        double min_eig = 0.0, max_eig = 0.0;
                        for (const auto& M : Sb) {
                            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                                M, Eigen::EigenvaluesOnly);
                            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
                            max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
                        }
                        double by = b.dot(y);
                        if (min_eig >= -1e-6 * std::max(1.0, max_eig) &&
                            by <= -1e-5 * y.norm() * b_scale) {
                            sol.status = SdpStatus::Infeasible;
                            sol.infeasibility_evidence = -by / y.norm();
                            sol.blocks = layout.unpack(z);
                            sol.iterations = iter;
                            return sol;
                        }
                    }
                }
            }
        }
    }

    sol.blocks = layout.unpack(z);
    sol.iterations = std::min(iter, options.max_iters);

    double feas = 0.0;
    for (const auto& con : problem.constraints)
        feas = std::max(feas, std::abs(constraint_value(con, sol.blocks) - con.rhs));
    sol.eps_feasibility = feas;

    double min_eig = 0.0;
    for (const auto& M : sol.blocks) {
        if (M.rows() == 1) {
            min_eig = std::min(min_eig, M(0, 0));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    sol.eps_psd = std::max(0.0, -min_eig);

    if (iter > options.max_iters) {
        sol.status = SdpStatus::Stalled;
        return sol;
    }

    sol.status = SdpStatus::Feasible;
    if (has_objective) {
        double val = 0.0;
        for (const auto& e : problem.objective) val += e.coeff * sol.blocks[e.block](e.row, e.col);
        sol.objective_value = val;
    }
    return sol;
}

}  // namespace sosdict
