#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "waldenfels/grid.hpp"
#include "waldenfels/levy_kernel.hpp"

namespace waldenfels {

/// Coefficient fields of the operator tr[a' Hess u] + b.grad u + c u (+ jump
/// part), together with the data of the exterior-value problem. Null function
/// slots are structurally zero, which the assemblers exploit.
struct CoefficientFields {
    std::function<SymMat(const Vec&)> a;     // diffusion matrix, symmetric
    std::function<Vec(const Vec&)> b;        // drift
    std::function<double(const Vec&)> c;     // zeroth order
    std::function<double(const Vec&)> f;     // right-hand side
    std::function<double(const Vec&)> g;     // exterior data on closure(E) \ D
    double g_far = 0.0;                      // constant beyond the truncation radius
    std::optional<std::function<double(const Vec&)>> div_b;  // analytic divergence of b

    bool pure_local_zero() const { return !a && !b && !c; }

    SymMat eval_a(const Vec& x) const { return a ? a(x) : SymMat{}; }
    Vec eval_b(const Vec& x) const { return b ? b(x) : Vec{0, 0}; }
    double eval_c(const Vec& x) const { return c ? c(x) : 0.0; }
    double eval_f(const Vec& x) const { return f ? f(x) : 0.0; }
    double eval_g(const Vec& x) const { return g ? g(x) : 0.0; }

    /// Builds the symmetric diffusion field from a full matrix callback,
    /// rejecting non-symmetric input.
    static std::function<SymMat(const Vec&)> symmetric_from_full(
        std::function<std::array<std::array<double, 2>, 2>(const Vec&)> full, int dim,
        double tol = 1e-12) {
        return [full = std::move(full), dim, tol](const Vec& x) {
            auto m = full(x);
            if (dim == 2 && std::abs(m[0][1] - m[1][0]) > tol * (1 + std::abs(m[0][1])))
                throw config_error("diffusion matrix a must be symmetric");
            return SymMat{m[0][0], dim == 2 ? m[0][1] : 0.0, dim == 2 ? m[1][1] : 0.0};
        };
    }
};

/// Declared sign regime of the zeroth-order coefficient; checks and solver
/// guarantees are dispatched on it.
enum class CRegime { Zero, NonPositive, Unsigned };

inline const char* to_string(CRegime r) {
    switch (r) {
        case CRegime::Zero: return "c==0";
        case CRegime::NonPositive: return "c<=0";
        default: return "unsigned";
    }
}

/// Full description of one exterior-value problem: geometry, coefficients,
/// jump measure and quadrature parameters. delta/R equal to zero select the
/// defaults (delta = h, R = far_field_radius / 2).
struct ProblemSpec {
    std::shared_ptr<const Domain> domain;
    CoefficientFields coeffs;
    std::optional<LevyKernel> kernel;
    double delta = 0;
    double R = 0;
    CRegime c_regime = CRegime::Unsigned;

    double resolved_delta() const { return delta > 0 ? delta : domain->grid.h; }
    double resolved_R() const { return R > 0 ? R : domain->far_field_radius / 2; }

    /// Checks the declared c-regime against the coefficient values at every
    /// interior node, and kernel/domain dimension agreement.
    void validate() const {
        if (!domain) throw config_error("problem has no domain");
        if (domain->grid.dim > 2) throw config_error("solvers support d in {1,2} only");
        if (kernel && kernel->dim() != domain->grid.dim)
            throw config_error("kernel dimension does not match the grid");
        if (c_regime != CRegime::Unsigned && coeffs.c) {
            for (int id : domain->interior_nodes) {
                const double cv = coeffs.c(domain->grid.coord(id));
                if (c_regime == CRegime::Zero && cv != 0.0)
                    throw config_error("declared c==0 but c is nonzero at an interior node");
                if (c_regime == CRegime::NonPositive && cv > 0.0)
                    throw config_error("declared c<=0 but c is positive at an interior node");
            }
        }
    }
};

}  // namespace waldenfels
