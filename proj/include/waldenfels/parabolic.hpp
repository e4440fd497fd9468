#pragma once

#include <utility>

#include "waldenfels/elliptic.hpp"

namespace waldenfels {

/// Uniform time grid on [0,T]; dt is adjusted so steps * dt == T exactly.
struct TimeGrid {
    double T = 0;
    double dt = 0;
    int steps = 0;

    static TimeGrid make(double T, double dt_requested) {
        if (!(T > 0) || !(dt_requested > 0))
            throw config_error("time grid requires T > 0 and dt > 0");
        TimeGrid tg;
        tg.steps = std::max(1, static_cast<int>(std::llround(T / dt_requested)));
        tg.T = T;
        tg.dt = T / tg.steps;
        return tg;
    }
};

/// Time-stamped evolution; the first entry is the initial condition at t = 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;

    void push(double t, Field f) {
        if (!times.empty() && t <= times.back())
            throw numeric_error("trajectory time stamps must increase strictly");
        times.push_back(t);
        fields.push_back(std::move(f));
    }
    std::size_t size() const { return times.size(); }
};

/// One theta-step for du/dt = L u:
///   (I - theta dt M) u' = (I + (1-theta) dt M) u + dt q.
/// Exterior data enters through the operator's affine part q; the input
/// field's exterior values are carried over unchanged. theta = 1 is implicit
/// Euler. For theta < 1 the positivity restriction
/// dt max|diag M| <= 1/(1-theta) is checked and reported, not enforced.
inline Field step_theta(const DiscreteOperator& op, const Field& u, double dt,
                        double theta = 1.0, bool* positivity_warning = nullptr,
                        SolveStats* stats_out = nullptr) {
    if (!(theta >= 0 && theta <= 1)) throw config_error("theta must lie in [0,1]");
    if (!(dt > 0)) throw config_error("dt must be > 0");
    const int n = op.rows();
    Eigen::VectorXd ui = op.gather_interior(u);

    if (positivity_warning) *positivity_warning = false;
    if (theta < 1.0) {
        double dmax = 0;
        for (int k = 0; k < op.M.outerSize(); ++k)
            for (DiscreteOperator::Sparse::InnerIterator it(op.M, k); it; ++it)
                if (it.row() == it.col()) dmax = std::max(dmax, std::abs(it.value()));
        if (dt * dmax > 1.0 / (1.0 - theta) && positivity_warning) *positivity_warning = true;
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> A(n, n);
    A.setIdentity();
    A = A - (theta * dt) * op.M;
    Eigen::VectorXd rhs = ui + dt * op.q;
    if (theta < 1.0) rhs += ((1.0 - theta) * dt) * (op.M * ui);

    Eigen::VectorXd next = solve_linear(A, rhs, op.domain->grid.dim, {}, stats_out);
    Field out = u;
    for (int i = 0; i < n; ++i) out.values[op.domain->interior_nodes[i]] = next[i];
    out.time = u.time.value_or(0.0) + dt;
    return out;
}

/// Right-hand side operator of the density equation dp/dt = tr[a' Hess p]
/// - b . grad p - (div b) p + K p, with the same jump operator K as the
/// generator (the symmetric stable K is self-adjoint). The divergence comes
/// from coeffs.div_b when supplied, otherwise from central differences.
inline DiscreteOperator build_fpe_operator(const ProblemSpec& spec) {
    ProblemSpec s = spec;
    s.c_regime = CRegime::Unsigned;
    s.coeffs.f = nullptr;
    if (spec.coeffs.b) {
        const auto b = spec.coeffs.b;
        const int dim = spec.domain->grid.dim;
        s.coeffs.b = [b, dim](const Vec& x) {
            Vec v = b(x);
            for (int j = 0; j < dim; ++j) v[j] = -v[j];
            return v;
        };
        if (spec.coeffs.div_b) {
            const auto db = *spec.coeffs.div_b;
            s.coeffs.c = [db](const Vec& x) { return -db(x); };
        } else {
            const double h = spec.domain->grid.h;
            s.coeffs.c = [b, dim, h](const Vec& x) {
                double div = 0;
                for (int j = 0; j < dim; ++j) {
                    Vec xp = x, xm = x;
                    xp[j] += h;
                    xm[j] -= h;
                    div += (b(xp)[j] - b(xm)[j]) / (2 * h);
                }
                return -div;
            };
        }
    } else {
        s.coeffs.b = nullptr;
        s.coeffs.c = nullptr;
    }
    return assemble(s);
}

struct FpeResult {
    Trajectory trajectory;
    std::vector<double> mass_series;  // sum of p h^d over interior, every step
    double min_density = 0;
    bool positivity_ok = true;
    OperatorMetadata op_meta;
};

/// Evolves the density by implicit Euler under absorbing truncation (zero
/// exterior data; mass that leaks out never returns). Nonnegativity is a
/// structural consequence of the M-matrix property, monitored each step.
inline FpeResult solve_fpe(const ProblemSpec& spec, const Field& p0, const TimeGrid& tg) {
    const auto& dom = *spec.domain;
    for (double v : p0.values)
        if (v < 0) throw config_error("initial density must be nonnegative");
    if (spec.coeffs.g_far != 0.0)
        throw config_error("density evolution requires zero far-field data");
    for (int id : dom.exterior_nodes)
        if (spec.coeffs.eval_g(dom.grid.coord(id)) != 0.0)
            throw config_error("density evolution requires zero exterior data");
    const double cell = std::pow(dom.grid.h, dom.grid.dim);
    double mass0 = 0;
    for (int id : dom.interior_nodes) mass0 += p0.values[id];
    mass0 *= cell;
    if (mass0 > 1 + 1e-9)
        throw config_error("initial density carries mass " + std::to_string(mass0) + " > 1");

    DiscreteOperator op = build_fpe_operator(spec);
    const int n = op.rows();
    Eigen::SparseMatrix<double> A(n, n);
    {
        Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(n, n);
        Ar.setIdentity();
        Ar = Ar - tg.dt * op.M;
        A = Ar;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw solver_error("implicit Euler factorization failed", {});

    FpeResult out;
    out.op_meta = op.meta;
    Field p = p0;
    p.time = 0.0;
    out.trajectory.push(0.0, p);
    out.mass_series.push_back(mass0);
    out.min_density = 0;
    Eigen::VectorXd v = op.gather_interior(p);
    for (int s = 1; s <= tg.steps; ++s) {
        v = lu.solve(v).eval();  // q == 0 under absorbing truncation
        Field f(spec.domain, 0.0);
        double mass = 0, mn = kInf;
        for (int i = 0; i < n; ++i) {
            f.values[dom.interior_nodes[i]] = v[i];
            mass += v[i];
            mn = std::min(mn, v[i]);
        }
        out.min_density = std::min(out.min_density, mn);
        if (mn < -1e-12) out.positivity_ok = false;
        f.time = s * tg.dt;
        out.trajectory.push(s * tg.dt, std::move(f));
        out.mass_series.push_back(mass * cell);
    }
    if (!out.positivity_ok && op.meta.m_matrix == TriState::Pass)
        throw numeric_error("density went below -1e-12 despite an M-matrix operator");
    return out;
}

}  // namespace waldenfels
