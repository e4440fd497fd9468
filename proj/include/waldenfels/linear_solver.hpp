#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <string>
#include <vector>

#include "waldenfels/common.hpp"

namespace waldenfels {

struct SolveOptions {
    double rel_tol = 1e-10;
    int max_iter = 10000;
};

struct SolveStats {
    std::string method;
    int iterations = 0;
    double residual = 0;              // estimated relative residual
    std::vector<double> history;      // residual after each iteration chunk
};

struct solver_error : numeric_error {
    SolveStats stats;
    solver_error(const std::string& msg, SolveStats s)
        : numeric_error(msg), stats(std::move(s)) {}
};

/// Direct sparse solve for d=1, ILU-preconditioned BiCGSTAB for d=2.
/// The 1D direct route is SparseLU rather than a banded factorization: jump
/// couplings make the bandwidth the full matrix dimension.
inline Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                                    const Eigen::VectorXd& rhs, int dim,
                                    const SolveOptions& opts = {},
                                    SolveStats* stats_out = nullptr) {
    SolveStats stats;
    // zero rows mean the unknown is unconstrained
    for (int r = 0; r < A.outerSize(); ++r) {
        double mag = 0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it)
            mag = std::max(mag, std::abs(it.value()));
        if (mag == 0)
            throw solver_error(
                "operator row " + std::to_string(r) +
                    " is identically zero: solution is non-unique (c==0 with no coupling?)",
                stats);
    }

    const Eigen::SparseMatrix<double> Ac = A;  // column-major copy for the factorizations
    if (dim == 1) {
        stats.method = "sparse-lu";
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(Ac);
        if (lu.info() != Eigen::Success)
            throw solver_error("direct factorization failed: matrix is singular (non-unique)",
                               stats);
        Eigen::VectorXd x = lu.solve(rhs);
        stats.iterations = 1;
        const double denom = rhs.norm();
        stats.residual = denom == 0 ? (A * x).norm() : (A * x - rhs).norm() / denom;
        if (stats_out) *stats_out = stats;
        return x;
    }

    stats.method = "bicgstab-ilut";
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
    krylov.preconditioner().setDroptol(1e-8);
    krylov.setTolerance(opts.rel_tol);
    krylov.compute(Ac);
    if (krylov.info() != Eigen::Success)
        throw solver_error("ILU preconditioner setup failed", stats);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    const int chunk = 250;
    int done = 0;
    while (done < opts.max_iter) {
        krylov.setMaxIterations(std::min(chunk, opts.max_iter - done));
        x = krylov.solveWithGuess(rhs, x);
        done += static_cast<int>(krylov.iterations());
        stats.history.push_back(krylov.error());
        if (krylov.info() == Eigen::Success || krylov.error() <= opts.rel_tol) break;
        if (krylov.info() != Eigen::NoConvergence)
            throw solver_error("Krylov iteration broke down", stats);
    }
    stats.iterations = done;
    stats.residual = krylov.error();
    if (stats.residual > opts.rel_tol) {
        std::string msg = "linear solve failed to converge: residual " +
                          std::to_string(stats.residual) + " after " + std::to_string(done) +
                          " iterations";
        throw solver_error(msg, stats);
    }
    if (stats_out) *stats_out = stats;
    return x;
}

}  // namespace waldenfels
