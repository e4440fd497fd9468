#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "waldenfels/problem.hpp"

namespace waldenfels {

struct MMatrixViolation {
    int row_node = -1;   // grid node id of the offending row
    int col_node = -1;   // grid node id of the offending column (-1: diagonal / row sum)
    double value = 0;
    std::string what;
};

struct MMatrixReport {
    TriState verdict = TriState::Unknown;
    bool offdiag_ok = true;
    bool diag_ok = true;
    bool rowsum_ok = true;
    double tol = 0;
    std::optional<MMatrixViolation> first_violation;
};

struct OperatorMetadata {
    TriState m_matrix = TriState::Unknown;
    double gamma_estimate = 0;   // min eigenvalue of a over interior nodes
    double delta = 0;            // effective singular-core radius
    double R = 0;                // effective quadrature truncation radius
    std::string kernel_fingerprint;
    bool positivity_warning = false;
    std::vector<std::string> notes;
};

/// Sparse image of the operator over interior unknowns:
///   (L u)_i = (M u_int)_i + (B u_ext)_i + far_i * g_far.
/// q caches the affine part B g + far g_far for the configured exterior data,
/// so that solving L u = f is M u_int = f - q. No hidden state.
class DiscreteOperator {
  public:
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    std::shared_ptr<const Domain> domain;
    Sparse M;             // interior x interior
    Sparse B;             // interior x exterior-data
    Eigen::VectorXd far;  // coupling weight to the far-field constant
    Eigen::VectorXd q;    // B g + far g_far
    double g_far = 0;
    OperatorMetadata meta;

    int rows() const { return static_cast<int>(M.rows()); }

    /// (L u) at interior nodes, reading interior and exterior values from the
    /// field and the far-field constant from the operator.
    Field apply(const Field& u) const {
        if (!u.domain || u.domain->grid.num_nodes() != domain->grid.num_nodes())
            throw config_error("apply: field shape does not match the operator grid");
        Eigen::VectorXd ui = gather_interior(u), ue = gather_exterior(u);
        Eigen::VectorXd r = M * ui + B * ue + far * g_far;
        Field out(domain, 0.0);
        out.time = u.time;
        for (int i = 0; i < rows(); ++i) out.values[domain->interior_nodes[i]] = r[i];
        return out;
    }

    Eigen::VectorXd gather_interior(const Field& u) const {
        Eigen::VectorXd v(domain->num_interior());
        for (int i = 0; i < domain->num_interior(); ++i)
            v[i] = u.values[domain->interior_nodes[i]];
        return v;
    }
    Eigen::VectorXd gather_exterior(const Field& u) const {
        Eigen::VectorXd v(domain->num_exterior());
        for (int i = 0; i < domain->num_exterior(); ++i)
            v[i] = u.values[domain->exterior_nodes[i]];
        return v;
    }

    void dump_triplets(std::ostream& os) const {
        os << "# rows=" << M.rows() << " interior, matrix M then coupling B then far\n";
        for (int k = 0; k < M.outerSize(); ++k)
            for (Sparse::InnerIterator it(M, k); it; ++it)
                os << "M " << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        for (int k = 0; k < B.outerSize(); ++k)
            for (Sparse::InnerIterator it(B, k); it; ++it)
                os << "B " << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        for (int i = 0; i < far.size(); ++i)
            if (far[i] != 0) os << "F " << i << ' ' << far[i] << '\n';
    }
};

/// Sign-structure audit for the generator convention: off-diagonal entries and
/// exterior couplings nonnegative; diagonal and row sums (including coupling)
/// nonpositive where c <= 0. Reports the first violating entry.
inline MMatrixReport verify_m_matrix(const DiscreteOperator& op) {
    MMatrixReport rep;
    double scale = 1.0;
    for (int k = 0; k < op.M.outerSize(); ++k)
        for (DiscreteOperator::Sparse::InnerIterator it(op.M, k); it; ++it)
            if (it.row() == it.col()) scale = std::max(scale, std::abs(it.value()));
    rep.tol = 1e-12 * scale;

    const auto& dom = *op.domain;
    auto violate = [&](bool& flag, int row, int col_node, double v, const char* what) {
        flag = false;
        if (!rep.first_violation)
            rep.first_violation = MMatrixViolation{dom.interior_nodes[row], col_node, v, what};
    };

    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(op.rows());
    for (int k = 0; k < op.M.outerSize(); ++k)
        for (DiscreteOperator::Sparse::InnerIterator it(op.M, k); it; ++it) {
            rowsum[it.row()] += it.value();
            if (it.row() != it.col() && it.value() < -rep.tol)
                violate(rep.offdiag_ok, static_cast<int>(it.row()),
                        dom.interior_nodes[it.col()], it.value(), "negative off-diagonal");
            if (it.row() == it.col() && it.value() > rep.tol)
                violate(rep.diag_ok, static_cast<int>(it.row()), -1, it.value(),
                        "positive diagonal");
        }
    for (int k = 0; k < op.B.outerSize(); ++k)
        for (DiscreteOperator::Sparse::InnerIterator it(op.B, k); it; ++it) {
            rowsum[it.row()] += it.value();
            if (it.value() < -rep.tol)
                violate(rep.offdiag_ok, static_cast<int>(it.row()),
                        dom.exterior_nodes[it.col()], it.value(), "negative exterior coupling");
        }
    for (int i = 0; i < op.rows(); ++i) {
        if (op.far[i] < -rep.tol)
            violate(rep.offdiag_ok, i, -1, op.far[i], "negative far-field coupling");
        rowsum[i] += op.far[i];
        if (rowsum[i] > rep.tol * 10)
            violate(rep.rowsum_ok, i, -1, rowsum[i], "positive row sum");
    }

    if (!rep.offdiag_ok)
        rep.verdict = TriState::Fail;
    else if (rep.diag_ok && rep.rowsum_ok)
        rep.verdict = TriState::Pass;
    else
        rep.verdict = TriState::Unknown;  // sign structure fine, zeroth order positive
    return rep;
}

namespace detail {

/// Triplet accumulator that routes stencil weights by node class.
struct AssemblyBuffer {
    const Domain& dom;
    std::vector<Eigen::Triplet<double>> tm, tb;
    Eigen::VectorXd far;

    explicit AssemblyBuffer(const Domain& d)
        : dom(d), far(Eigen::VectorXd::Zero(d.num_interior())) {}

    /// Adds weight w coupling row to the node at multi-index (ix,iy); off-grid
    /// targets take the far-field constant.
    void add(int row, int ix, int iy, double w) {
        if (w == 0) return;
        if (!dom.grid.in_range(ix, iy)) {
            far[row] += w;
            return;
        }
        const int id = dom.grid.id(ix, iy);
        switch (dom.node_class[id]) {
            case NodeClass::Interior:
                tm.emplace_back(row, dom.interior_index[id], w);
                break;
            case NodeClass::ExteriorData:
                tb.emplace_back(row, dom.exterior_index[id], w);
                break;
            case NodeClass::Outside:
                far[row] += w;
                break;
        }
    }
    void add_diag(int row, int ix, int iy, double w) {
        tm.emplace_back(row, dom.interior_index[dom.grid.id(ix, iy)], w);
    }

    /// Central second differences for tr[a' Hess u] at node (ix,iy).
    void diffusion_stencil(int row, int ix, int iy, const SymMat& a, double h) {
        const double h2 = h * h;
        const int dim = dom.grid.dim;
        if (a.xx != 0) {
            const double w = a.xx / h2;
            add(row, ix + 1, iy, w);
            add(row, ix - 1, iy, w);
            add_diag(row, ix, iy, -2 * w);
        }
        if (dim == 2 && a.yy != 0) {
            const double w = a.yy / h2;
            add(row, ix, iy + 1, w);
            add(row, ix, iy - 1, w);
            add_diag(row, ix, iy, -2 * w);
        }
        if (dim == 2 && a.xy != 0) {
            // 2 a_xy u_xy with the four-point cross stencil
            const double w = a.xy / (2 * h2);
            add(row, ix + 1, iy + 1, w);
            add(row, ix - 1, iy - 1, w);
            add(row, ix + 1, iy - 1, -w);
            add(row, ix - 1, iy + 1, -w);
        }
    }

    /// b . grad u, central when the mesh-Peclet condition |b_j| h <= 2 a_jj
    /// holds, first-order upwind otherwise (keeps off-diagonals nonnegative).
    void drift_stencil(int row, int ix, int iy, const Vec& b, const SymMat& a, double h) {
        const int dim = dom.grid.dim;
        for (int j = 0; j < dim; ++j) {
            const double bj = b[j];
            if (bj == 0) continue;
            const double ajj = j == 0 ? a.xx : a.yy;
            const int sx = j == 0 ? 1 : 0, sy = j == 0 ? 0 : 1;
            if (std::abs(bj) * h <= 2 * ajj) {
                const double w = bj / (2 * h);
                add(row, ix + sx, iy + sy, w);
                add(row, ix - sx, iy - sy, -w);
            } else if (bj > 0) {
                add(row, ix + sx, iy + sy, bj / h);
                add_diag(row, ix, iy, -bj / h);
            } else {
                add(row, ix - sx, iy - sy, -bj / h);
                add_diag(row, ix, iy, bj / h);
            }
        }
    }

    void finalize(DiscreteOperator& op, const CoefficientFields& coeffs) {
        const int ni = dom.num_interior(), ne = dom.num_exterior();
        op.M.resize(ni, ni);
        op.M.setFromTriplets(tm.begin(), tm.end());
        op.B.resize(ni, ne);
        op.B.setFromTriplets(tb.begin(), tb.end());
        op.far = std::move(far);
        op.g_far = coeffs.g_far;
        Eigen::VectorXd ge(ne);
        for (int j = 0; j < ne; ++j)
            ge[j] = coeffs.eval_g(dom.grid.coord(dom.exterior_nodes[j]));
        op.q = op.B * ge + op.far * op.g_far;
    }
};

}  // namespace detail

/// Discretizes the local part tr[a' Hess u] + b . grad u + c u with central
/// second differences; drift falls back to upwind where the mesh-Peclet
/// condition fails. Coefficients must be finite on the grid.
inline DiscreteOperator assemble_local(const CoefficientFields& coeffs,
                                       std::shared_ptr<const Domain> domain) {
    const Domain& dom = *domain;
    const double h = dom.grid.h;
    detail::AssemblyBuffer buf(dom);
    double gamma = kInf;
    for (int row = 0; row < dom.num_interior(); ++row) {
        const int id = dom.interior_nodes[row];
        const auto mi = dom.grid.multi_index(id);
        const Vec x = dom.grid.coord(id);
        const SymMat a = coeffs.eval_a(x);
        const Vec b = coeffs.eval_b(x);
        const double c = coeffs.eval_c(x);
        if (!std::isfinite(a.xx + a.xy + a.yy) || !std::isfinite(b[0] + b[1]) ||
            !std::isfinite(c))
            throw config_error("coefficients must be finite on the computational domain");
        gamma = std::min(gamma, a.min_eigenvalue(dom.grid.dim));
        buf.diffusion_stencil(row, mi[0], mi[1], a, h);
        buf.drift_stencil(row, mi[0], mi[1], b, a, h);
        if (c != 0) buf.add_diag(row, mi[0], mi[1], c);
    }
    DiscreteOperator op;
    op.domain = std::move(domain);
    buf.finalize(op, coeffs);
    op.meta.gamma_estimate = gamma == kInf ? 0 : gamma;
    op.meta.m_matrix = verify_m_matrix(op).verdict;
    return op;
}

namespace detail {

struct CellEntry {
    int k[2];        // offset in grid steps
    double w;        // cell measure
    bool compensated;  // |z_k| < 1: subtract z . grad u
};

/// Shared (translation-invariant) quadrature table: exact cell masses on the
/// annulus delta' <= |z| <= R', cells aligned with the grid so every sample
/// lands on a node. Offsets are emitted in +/- pairs so symmetric kernels
/// cancel the compensator drift exactly.
struct NonlocalTable {
    std::vector<CellEntry> cells;
    SymMat sigma_eff;       // effective singular-core second moment
    Vec comp_drift{0, 0};   // - sum of w z over compensated cells
    double tail = 0;
    double delta_eff = 0, R_eff = 0;
    bool matched = true;    // moment-matched core applied
};

inline NonlocalTable build_stable_table(const LevyKernel& kernel, const Grid& grid,
                                        double delta, double R) {
    const double h = grid.h;
    const int dim = grid.dim;
    NonlocalTable t;
    const long m_core = std::max(0L, std::lround(delta / h - 0.5));
    const long m_R = std::lround(R / h - 0.5);
    if (m_R < m_core + 1)
        throw quadrature_error("quadrature radius R leaves no cells outside the core");
    t.delta_eff = (m_core + 0.5) * h;
    t.R_eff = (m_R + 0.5) * h;
    if (t.delta_eff > 1.0 && kernel.support_mask())
        throw config_error("singular core exceeds the compensator cutoff for a clipped kernel");

    SymMat disc2;  // sum of w z (x) z over the table
    auto push_pair = [&](int kx, int ky, double wp, double wm) {
        const Vec z{kx * h, ky * h};
        const bool comp = norm(z, dim) < 1.0;
        if (wp > 0) t.cells.push_back({{kx, ky}, wp, comp});
        if (wm > 0) t.cells.push_back({{-kx, -ky}, wm, comp});
        disc2.xx += (wp + wm) * z[0] * z[0];
        disc2.xy += (wp + wm) * z[0] * z[1];
        disc2.yy += (wp + wm) * z[1] * z[1];
        if (comp) {
            const double dw = wp - wm;  // exactly zero for symmetric kernels
            t.comp_drift[0] -= dw * z[0];
            t.comp_drift[1] -= dw * z[1];
        }
    };

    if (dim == 1) {
        for (long k = m_core + 1; k <= m_R; ++k) {
            const double a = (k - 0.5) * h, b = (k + 0.5) * h;
            push_pair(static_cast<int>(k), 0, kernel.interval_mass_1d(a, b),
                      kernel.interval_mass_1d(-b, -a));
        }
    } else {
        const double dp = t.delta_eff, Rp = t.R_eff;
        const long kmax = m_R + 1;
        const bool masked = kernel.support_mask().has_value();
        auto cell_weight = [&](double cx, double cy) {
            // distances from origin to the cell
            const double ax = std::max(0.0, std::abs(cx) - h / 2);
            const double ay = std::max(0.0, std::abs(cy) - h / 2);
            const double rmin = std::hypot(ax, ay);
            const double rmax = std::hypot(std::abs(cx) + h / 2, std::abs(cy) + h / 2);
            if (rmax <= dp || rmin >= Rp) return 0.0;
            if (!masked && rmin >= dp && rmax <= Rp) {
                // fully inside: tensor Gauss-Legendre 3x3 on the smooth density
                static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
                static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
                double s = 0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        s += gw[i] * gw[j] *
                             kernel.density(Vec{cx + gx[i] * h / 2, cy + gx[j] * h / 2});
                return s * h * h / 4;
            }
            // crossing a zone boundary (or masked): subdivided midpoint with indicator
            const int sub = 16;
            const double hs = h / sub;
            double s = 0;
            for (int i = 0; i < sub; ++i)
                for (int j = 0; j < sub; ++j) {
                    const Vec p{cx - h / 2 + (i + 0.5) * hs, cy - h / 2 + (j + 0.5) * hs};
                    const double r = norm(p, 2);
                    if (r < dp || r > Rp) continue;
                    if (masked && !kernel.support_contains(p)) continue;
                    s += kernel.density(p) * hs * hs;
                }
            return s;
        };
        for (long kx = 0; kx <= kmax; ++kx)
            for (long ky = (kx == 0 ? 1 : -kmax); ky <= kmax; ++ky) {
                // half lattice: (kx,ky) with kx>0, plus kx==0,ky>0
                const double cx = kx * h, cy = ky * h;
                if (std::hypot(std::abs(cx) + h / 2, std::abs(cy) + h / 2) <= dp) continue;
                if (std::hypot(std::max(0.0, std::abs(cx) - h / 2),
                               std::max(0.0, std::abs(cy) - h / 2)) >= Rp)
                    continue;
                push_pair(static_cast<int>(kx), static_cast<int>(ky), cell_weight(cx, cy),
                          cell_weight(-cx, -cy));
            }
    }

    t.tail = kernel.tail_mass(t.R_eff);
    // Moment-matched core: the surrogate absorbs the difference between the
    // exact annulus second moment and its discrete image, which makes the
    // three-zone scheme exact on quadratics and restores O(h^2) consistency.
    const SymMat core = kernel.small_jump_second_moment(t.delta_eff);
    SymMat matched = core + (kernel.annulus_second_moment(t.delta_eff, t.R_eff) - disc2);
    if (matched.min_eigenvalue(dim) <= 0) {
        matched = core;
        t.matched = false;
    }
    t.sigma_eff = matched;
    return t;
}

}  // namespace detail

/// Discretizes the jump part with the three-zone scheme: a second-moment
/// diffusion surrogate inside |z| < delta', exact cell masses sampled at grid
/// offsets on delta' <= |z| <= R', and (g_far - u(x)) * tail_mass(R') beyond.
/// delta and R are snapped to cell boundaries (half-integer multiples of h).
/// Cells landing outside closure(E) are dropped, which realizes the support
/// restriction supp nu subset closure(E) - x.
inline DiscreteOperator assemble_nonlocal(const LevyKernel& kernel,
                                          const CoefficientFields& coeffs,
                                          std::shared_ptr<const Domain> domain, double delta,
                                          double R) {
    const Domain& dom = *domain;
    const double h = dom.grid.h;
    const int dim = dom.grid.dim;
    if (kernel.state_dependent())
        throw std::domain_error("state-dependent kernels are unsupported by the assembler");
    if (kernel.dim() != dim) throw config_error("kernel dimension does not match the grid");
    if (delta < h / 2 * (1 - 1e-12))
        throw quadrature_error("quadrature error: delta must be >= h/2");
    if (R > dom.far_field_radius * (1 + 1e-12))
        throw config_error("R exceeds the far-field truncation radius");

    detail::AssemblyBuffer buf(dom);
    DiscreteOperator op;
    OperatorMetadata& meta = op.meta;
    meta.kernel_fingerprint = kernel.fingerprint();

    const bool whole_space = dom.e_whole_space;

    if (kernel.kind() == LevyKernel::Kind::Finite) {
        // Atoms handled exactly; each snaps to the grid cell containing it.
        struct Atom {
            int k[2];
            double w;
            bool comp;
            Vec z;
        };
        std::vector<Atom> atoms;
        SymMat local_sm;  // sub-cell atoms: exact local surrogate
        Vec local_drift{0, 0};
        for (const auto& j : kernel.jumps()) {
            if (j.mass == 0 || !kernel.support_contains(j.z)) continue;
            Atom a;
            a.k[0] = static_cast<int>(std::llround(j.z[0] / h));
            a.k[1] = dim == 2 ? static_cast<int>(std::llround(j.z[1] / h)) : 0;
            a.w = j.mass;
            a.z = {a.k[0] * h, a.k[1] * h};
            a.comp = norm(a.z, dim) < 1.0;
            if (a.k[0] == 0 && a.k[1] == 0) {
                // jump shorter than half a cell: second-moment surrogate + drift
                local_sm.xx += j.mass * j.z[0] * j.z[0];
                local_sm.xy += j.mass * j.z[0] * j.z[1];
                local_sm.yy += j.mass * j.z[1] * j.z[1];
                if (norm(j.z, dim) < 1.0)
                    for (int d = 0; d < dim; ++d) local_drift[d] -= j.mass * j.z[d];
                continue;
            }
            atoms.push_back(a);
        }
        for (int row = 0; row < dom.num_interior(); ++row) {
            const int id = dom.interior_nodes[row];
            const auto mi = dom.grid.multi_index(id);
            const Vec x = dom.grid.coord(id);
            Vec drift = local_drift;
            for (const auto& a : atoms) {
                const Vec target{x[0] + a.z[0], x[1] + a.z[1]};
                if (!whole_space && !dom.e_closure_contains(target)) continue;  // dropped
                buf.add(row, mi[0] + a.k[0], mi[1] + a.k[1], a.w);
                buf.add_diag(row, mi[0], mi[1], -a.w);
                if (a.comp)
                    for (int d = 0; d < dim; ++d) drift[d] -= a.w * a.z[d];
            }
            buf.diffusion_stencil(row, mi[0], mi[1], local_sm * 0.5, h);
            buf.drift_stencil(row, mi[0], mi[1], drift, local_sm * 0.5, h);
        }
        meta.delta = 0;
        meta.R = 0;
        meta.notes.push_back("atomic measure: atoms placed exactly, no quadrature truncation");
        op.domain = domain;
        buf.finalize(op, coeffs);
        op.meta.m_matrix = verify_m_matrix(op).verdict;
        return op;
    }

    auto table = detail::build_stable_table(kernel, dom.grid, delta, R);
    meta.delta = table.delta_eff;
    meta.R = table.R_eff;
    if (!table.matched)
        meta.notes.push_back("moment-matched core disabled (nonpositive surrogate)");
    if (!whole_space)
        meta.notes.push_back(
            "bounded E: cells kept by landing-node membership, clipped core moments per node");

    // Fast path: whole-space E, shared table for every row.
    // Bounded E: cells are kept or dropped per node, the core and tail moments
    // are recomputed on the clipped measure, and the core is left unmatched.
    for (int row = 0; row < dom.num_interior(); ++row) {
        const int id = dom.interior_nodes[row];
        const auto mi = dom.grid.multi_index(id);
        const Vec x = dom.grid.coord(id);

        SymMat sigma = table.sigma_eff;
        Vec drift = table.comp_drift;
        double tail = table.tail;

        if (whole_space) {
            for (const auto& cell : table.cells) {
                buf.add(row, mi[0] + cell.k[0], mi[1] + cell.k[1], cell.w);
                buf.add_diag(row, mi[0], mi[1], -cell.w);
            }
        } else {
            const SupportMask mask = dom.mask_at(x);
            const LevyKernel clipped = kernel.clip_support(mask);
            sigma = clipped.small_jump_second_moment(table.delta_eff);
            tail = clipped.tail_mass(table.R_eff);
            drift = {0, 0};
            for (const auto& cell : table.cells) {
                const Vec target{x[0] + cell.k[0] * h, x[1] + cell.k[1] * h};
                if (!dom.e_closure_contains(target)) continue;
                buf.add(row, mi[0] + cell.k[0], mi[1] + cell.k[1], cell.w);
                buf.add_diag(row, mi[0], mi[1], -cell.w);
                if (cell.compensated)
                    for (int d = 0; d < dim; ++d) drift[d] -= cell.w * cell.k[d] * h;
            }
        }

        buf.diffusion_stencil(row, mi[0], mi[1], sigma * 0.5, h);
        buf.drift_stencil(row, mi[0], mi[1], drift, sigma * 0.5, h);
        if (tail != 0) {
            buf.far[row] += tail;
            buf.add_diag(row, mi[0], mi[1], -tail);
        }
    }

    op.domain = domain;
    buf.finalize(op, coeffs);
    op.meta.m_matrix = verify_m_matrix(op).verdict;
    return op;
}

/// L = A + K. Pure-local and pure-nonlocal specs return the corresponding
/// assembler's output unchanged; otherwise the two sparse images are summed
/// and the metadata merged.
inline DiscreteOperator assemble(const ProblemSpec& spec) {
    spec.validate();
    const double delta = spec.resolved_delta(), R = spec.resolved_R();
    const bool has_local = !spec.coeffs.pure_local_zero();
    if (!spec.kernel) {
        if (!has_local) throw config_error("empty operator: no coefficients and no kernel");
        return assemble_local(spec.coeffs, spec.domain);
    }
    if (!has_local) return assemble_nonlocal(*spec.kernel, spec.coeffs, spec.domain, delta, R);

    DiscreteOperator local = assemble_local(spec.coeffs, spec.domain);
    DiscreteOperator jump = assemble_nonlocal(*spec.kernel, spec.coeffs, spec.domain, delta, R);
    DiscreteOperator op;
    op.domain = spec.domain;
    op.M = local.M + jump.M;
    op.B = local.B + jump.B;
    op.far = local.far + jump.far;
    op.g_far = spec.coeffs.g_far;
    op.q = local.q + jump.q;
    op.meta = jump.meta;
    op.meta.gamma_estimate = local.meta.gamma_estimate;
    op.meta.m_matrix = verify_m_matrix(op).verdict;
    return op;
}

}  // namespace waldenfels
