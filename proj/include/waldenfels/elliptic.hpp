#pragma once

#include <cmath>

#include "waldenfels/linear_solver.hpp"
#include "waldenfels/operator.hpp"

namespace waldenfels {

/// Fills a field with the problem's exterior data: g on exterior-data nodes,
/// the far-field constant on nodes beyond E.
inline void impose_exterior_data(Field& u, const ProblemSpec& spec) {
    const auto& dom = *spec.domain;
    for (int id = 0; id < dom.grid.num_nodes(); ++id) {
        if (dom.node_class[id] == NodeClass::ExteriorData)
            u.values[id] = spec.coeffs.eval_g(dom.grid.coord(id));
        else if (dom.node_class[id] == NodeClass::Outside)
            u.values[id] = spec.coeffs.g_far;
    }
}

/// Solves L u = f in D with u = g on closure(E) \ D. The returned field
/// satisfies the residual contract |M u + q - f|_inf <= 1e-9 (1 + |f|_inf),
/// re-verified after the solve.
inline Field solve_exterior_dirichlet(const ProblemSpec& spec, SolveStats* stats_out = nullptr,
                                      const DiscreteOperator* prebuilt = nullptr) {
    spec.validate();
    DiscreteOperator local_op;
    const DiscreteOperator& op = prebuilt ? *prebuilt : (local_op = assemble(spec), local_op);
    const auto& dom = *spec.domain;

    Eigen::VectorXd fv(dom.num_interior());
    for (int i = 0; i < dom.num_interior(); ++i)
        fv[i] = spec.coeffs.eval_f(dom.grid.coord(dom.interior_nodes[i]));

    SolveStats stats;
    Eigen::VectorXd u = solve_linear(op.M, fv - op.q, dom.grid.dim, {}, &stats);

    const double fmax = fv.size() ? fv.cwiseAbs().maxCoeff() : 0.0;
    const double res = (op.M * u + op.q - fv).cwiseAbs().maxCoeff();
    if (!(res <= 1e-9 * (1 + fmax)))
        throw solver_error("residual contract violated: |Mu+q-f|_inf = " + std::to_string(res),
                           stats);
    if (stats_out) *stats_out = stats;

    Field out(spec.domain, 0.0);
    for (int i = 0; i < dom.num_interior(); ++i) out.values[dom.interior_nodes[i]] = u[i];
    impose_exterior_data(out, spec);
    if (!out.all_finite()) throw numeric_error("solution field contains non-finite values");
    return out;
}

namespace detail {
inline void require_c_zero(const ProblemSpec& spec, const char* who) {
    if (spec.c_regime == CRegime::Zero && !spec.coeffs.c) return;
    if (spec.coeffs.c) {
        for (int id : spec.domain->interior_nodes)
            if (spec.coeffs.c(spec.domain->grid.coord(id)) != 0.0)
                throw config_error(std::string(who) + " requires c == 0 in D");
    }
}
}  // namespace detail

/// Mean time for the process to leave D: solves L tau = -1 in D with tau = 0
/// on the whole complement (exterior data and far field).
inline Field mean_exit_time(const ProblemSpec& spec, SolveStats* stats_out = nullptr) {
    detail::require_c_zero(spec, "mean_exit_time");
    ProblemSpec s = spec;
    s.c_regime = CRegime::Zero;
    s.coeffs.f = [](const Vec&) { return -1.0; };
    s.coeffs.g = nullptr;
    s.coeffs.g_far = 0.0;
    Field tau = solve_exterior_dirichlet(s, stats_out);
    for (double v : tau.values)
        if (v < -1e-9)
            throw numeric_error("mean exit time came out negative: " + std::to_string(v));
    return tau;
}

/// Fraction of jump directions at infinity that land in U; the constant
/// far-field datum consistent with an isotropic kernel.
inline double far_field_indicator_average(const Region& U, int dim) {
    const double big = 1e9;
    if (dim == 1)
        return 0.5 * (U.contains(vec1(big), 1) ? 1.0 : 0.0) +
               0.5 * (U.contains(vec1(-big), 1) ? 1.0 : 0.0);
    int hits = 0;
    const int n = 1440;
    for (int i = 0; i < n; ++i) {
        const double th = 2 * std::numbers::pi * (i + 0.5) / n;
        if (U.contains(Vec{big * std::cos(th), big * std::sin(th)}, 2)) ++hits;
    }
    return static_cast<double>(hits) / n;
}

/// Probability that the process first leaves D by landing in the target set
/// U subset of D^c: solves L p = 0 with p = 1 on U, 0 on D^c \ U.
inline Field escape_probability(const ProblemSpec& spec, const Region& U,
                                SolveStats* stats_out = nullptr) {
    detail::require_c_zero(spec, "escape_probability");
    const auto& dom = *spec.domain;
    const double eps = dom.boundary_tol();
    for (int id : dom.interior_nodes)
        if (U.contains(dom.grid.coord(id), dom.grid.dim, -eps))
            throw config_error("escape target U intersects D");

    ProblemSpec s = spec;
    s.c_regime = CRegime::Zero;
    s.coeffs.f = nullptr;
    const int dim = dom.grid.dim;
    s.coeffs.g = [U, dim, eps](const Vec& x) {
        return U.contains(x, dim, eps) ? 1.0 : 0.0;
    };
    s.coeffs.g_far = far_field_indicator_average(U, dim);
    Field p = solve_exterior_dirichlet(s, stats_out);
    for (int id : dom.interior_nodes) {
        const double v = p.values[id];
        if (v < -1e-9 || v > 1 + 1e-9)
            throw numeric_error("escape probability out of [0,1]: " + std::to_string(v));
    }
    return p;
}

}  // namespace waldenfels
