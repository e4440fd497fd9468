#pragma once

#include <deque>
#include <map>
#include <set>

#include "waldenfels/operator.hpp"
#include "waldenfels/parabolic.hpp"

namespace waldenfels {

enum class Verdict { Pass, Fail, Inapplicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "inapplicable";
    }
}

struct Witness {
    int node_id = -1;
    Vec coords{0, 0};
    double value = 0;
    double bound = 0;
    int time_index = -1;
    double time = 0;
    std::string description;
};

/// Structured evidence for one principle check. A fail always carries a
/// witness; an inapplicable verdict names the unmet precondition.
struct PrincipleReport {
    std::string check;
    Verdict verdict = Verdict::Inapplicable;
    std::optional<Witness> witness;
    double tol = 0;
    std::map<std::string, std::string> preconditions;
    std::vector<std::string> notes;
};

struct CheckOptions {
    double tol = 1e-9;
    /// Skip the numerical verification of the operator hypothesis (used by
    /// constructed-violation fixtures only).
    bool assume_hypothesis = false;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Numerically verifies L u >= -tol at interior nodes. Returns the violating
/// node when the hypothesis fails.
inline std::optional<Witness> hypothesis_sign(const DiscreteOperator& op, const Field& u,
                                              double tol, int sign) {
    const Field r = op.apply(u);
    for (int id : op.domain->interior_nodes) {
        const double v = sign * r.values[id];
        if (v < -tol) {
            Witness w;
            w.node_id = id;
            w.coords = op.domain->grid.coord(id);
            w.value = r.values[id];
            w.bound = 0;
            w.description = sign > 0 ? "Lu < 0 at this node" : "Lu > 0 at this node";
            return w;
        }
    }
    return std::nullopt;
}

/// Exterior supremum of the field, folding in the far-field constant when the
/// computation truncates an unbounded E.
inline double exterior_sup(const Field& u, const ProblemSpec& spec,
                           std::vector<std::string>* notes) {
    double m = u.max_exterior();
    if (spec.domain->e_whole_space) {
        m = std::max(m, spec.coeffs.g_far);
        if (notes)
            notes->push_back("E truncated at radius " +
                             fmt(spec.domain->far_field_radius) +
                             "; far-field constant included in the exterior supremum");
    }
    return m;
}

/// Connected components of the interior node set under axis adjacency.
inline std::vector<int> interior_components(const Domain& dom) {
    std::vector<int> comp(dom.grid.num_nodes(), -1);
    int ncomp = 0;
    for (int seed : dom.interior_nodes) {
        if (comp[seed] != -1) continue;
        std::deque<int> queue{seed};
        comp[seed] = ncomp;
        while (!queue.empty()) {
            const int id = queue.front();
            queue.pop_front();
            const auto mi = dom.grid.multi_index(id);
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 2 * dom.grid.dim; ++k) {
                const int ix = mi[0] + dx[k], iy = mi[1] + dy[k];
                if (!dom.grid.in_range(ix, iy)) continue;
                const int nid = dom.grid.id(ix, iy);
                if (dom.node_class[nid] == NodeClass::Interior && comp[nid] == -1) {
                    comp[nid] = ncomp;
                    queue.push_back(nid);
                }
            }
        }
        ++ncomp;
    }
    return comp;
}

}  // namespace detail

/// Weak elliptic principle: under L u >= 0 in D, the supremum of u over
/// closure(E) is attained on closure(E) \ D (c == 0), or bounded by the
/// positive part of the exterior supremum (c <= 0).
inline PrincipleReport check_weak_elliptic(const Field& u, const ProblemSpec& spec,
                                           const DiscreteOperator& op,
                                           const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "weak_maximum_elliptic";
    rep.tol = opts.tol;
    rep.preconditions["c_regime"] = to_string(spec.c_regime);
    rep.preconditions["m_matrix"] = to_string(op.meta.m_matrix);

    if (spec.c_regime == CRegime::Unsigned) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("requires declared regime c==0 or c<=0");
        return rep;
    }
    if (!opts.assume_hypothesis) {
        if (auto w = detail::hypothesis_sign(op, u, opts.tol, +1)) {
            rep.verdict = Verdict::Inapplicable;
            rep.witness = *w;
            rep.notes.push_back("hypothesis Lu >= 0 fails");
            return rep;
        }
        rep.preconditions["hypothesis"] = "Lu >= -tol verified";
    } else {
        rep.preconditions["hypothesis"] = "assumed by caller";
    }

    double bound = detail::exterior_sup(u, spec, &rep.notes);
    if (spec.c_regime == CRegime::NonPositive) bound = std::max(bound, 0.0);
    rep.preconditions["exterior_sup"] = detail::fmt(bound);

    for (int id : spec.domain->interior_nodes) {
        if (u.values[id] > bound + opts.tol) {
            Witness w;
            w.node_id = id;
            w.coords = spec.domain->grid.coord(id);
            w.value = u.values[id];
            w.bound = bound;
            w.description = "interior value exceeds the exterior supremum";
            rep.witness = w;
            rep.verdict = Verdict::Fail;
            return rep;
        }
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

/// Weak parabolic principle for a trajectory of -du/dt + L u >= 0: the
/// supremum over the cylinder is attained on the parabolic boundary (initial
/// data or exterior data).
inline PrincipleReport check_weak_parabolic(const Trajectory& traj, const ProblemSpec& spec,
                                            const DiscreteOperator& op,
                                            const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "weak_maximum_parabolic";
    rep.tol = opts.tol;
    rep.preconditions["c_regime"] = to_string(spec.c_regime);
    rep.preconditions["m_matrix"] = to_string(op.meta.m_matrix);
    if (traj.size() < 2) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("trajectory holds fewer than two time levels");
        return rep;
    }
    if (spec.c_regime == CRegime::Unsigned) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("requires declared regime c==0 or c<=0");
        return rep;
    }

    if (!opts.assume_hypothesis) {
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const double dt = traj.times[k] - traj.times[k - 1];
            const Field r = op.apply(traj.fields[k]);
            for (int id : spec.domain->interior_nodes) {
                const double dudt =
                    (traj.fields[k].values[id] - traj.fields[k - 1].values[id]) / dt;
                // scale-aware slack: the discrete time derivative amplifies
                // solver round-off by 1/dt
                const double slack = opts.tol * (1 + std::abs(dudt));
                if (-dudt + r.values[id] < -slack) {
                    Witness w;
                    w.node_id = id;
                    w.coords = spec.domain->grid.coord(id);
                    w.value = -dudt + r.values[id];
                    w.time_index = static_cast<int>(k);
                    w.time = traj.times[k];
                    w.description = "-du/dt + Lu < 0";
                    rep.witness = w;
                    rep.verdict = Verdict::Inapplicable;
                    rep.notes.push_back("hypothesis -du/dt + Lu >= 0 fails");
                    return rep;
                }
            }
        }
        rep.preconditions["hypothesis"] = "-du/dt + Lu >= -tol verified each step";
    } else {
        rep.preconditions["hypothesis"] = "assumed by caller";
    }

    double bound = -kInf;
    for (double v : traj.fields[0].values) bound = std::max(bound, v);  // initial data
    for (const auto& f : traj.fields) bound = std::max(bound, f.max_exterior());
    if (spec.domain->e_whole_space) bound = std::max(bound, spec.coeffs.g_far);
    if (spec.c_regime == CRegime::NonPositive) bound = std::max(bound, 0.0);
    rep.preconditions["parabolic_boundary_sup"] = detail::fmt(bound);

    for (std::size_t k = 1; k < traj.size(); ++k)
        for (int id : spec.domain->interior_nodes)
            if (traj.fields[k].values[id] > bound + opts.tol) {
                Witness w;
                w.node_id = id;
                w.coords = spec.domain->grid.coord(id);
                w.value = traj.fields[k].values[id];
                w.bound = bound;
                w.time_index = static_cast<int>(k);
                w.time = traj.times[k];
                w.description = "interior value exceeds the parabolic boundary supremum";
                rep.witness = w;
                rep.verdict = Verdict::Fail;
                return rep;
            }
    rep.verdict = Verdict::Pass;
    return rep;
}

/// Comparison principle: L u <= L v in D and u >= v on the exterior imply
/// u >= v everywhere (c <= 0).
inline PrincipleReport check_comparison(const Field& u, const Field& v,
                                        const ProblemSpec& spec, const DiscreteOperator& op,
                                        const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "comparison";
    rep.tol = opts.tol;
    rep.preconditions["c_regime"] = to_string(spec.c_regime);
    if (spec.c_regime == CRegime::Unsigned) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("requires c <= 0");
        return rep;
    }
    if (!opts.assume_hypothesis) {
        const Field lu = op.apply(u), lv = op.apply(v);
        for (int id : spec.domain->interior_nodes)
            if (lu.values[id] > lv.values[id] + opts.tol * (1 + std::abs(lv.values[id]))) {
                rep.verdict = Verdict::Inapplicable;
                rep.notes.push_back("hypothesis Lu <= Lv fails at an interior node");
                return rep;
            }
        for (int id : spec.domain->exterior_nodes)
            if (u.values[id] < v.values[id] - opts.tol) {
                rep.verdict = Verdict::Inapplicable;
                rep.notes.push_back("hypothesis u >= v on the exterior fails");
                return rep;
            }
        rep.preconditions["hypothesis"] = "Lu <= Lv and exterior ordering verified";
    } else {
        rep.preconditions["hypothesis"] = "assumed by caller";
    }
    for (int id : spec.domain->interior_nodes)
        if (u.values[id] < v.values[id] - opts.tol) {
            Witness w;
            w.node_id = id;
            w.coords = spec.domain->grid.coord(id);
            w.value = u.values[id];
            w.bound = v.values[id];
            w.description = "ordering u >= v violated at an interior node";
            rep.witness = w;
            rep.verdict = Verdict::Fail;
            return rep;
        }
    rep.verdict = Verdict::Pass;
    return rep;
}

/// Strong elliptic principle: an interior node attaining the global maximum
/// (under the theorem's c-regime cases) forces constancy on its connected
/// component of D. Vacuously passes when no interior node attains the max.
inline PrincipleReport check_strong_elliptic(const Field& u, const ProblemSpec& spec,
                                             const DiscreteOperator& op,
                                             const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "strong_maximum_elliptic";
    rep.tol = opts.tol;
    rep.preconditions["c_regime"] = to_string(spec.c_regime);
    if (!opts.assume_hypothesis) {
        if (auto w = detail::hypothesis_sign(op, u, opts.tol, +1)) {
            rep.verdict = Verdict::Inapplicable;
            rep.witness = *w;
            rep.notes.push_back("hypothesis Lu >= 0 fails");
            return rep;
        }
        rep.preconditions["hypothesis"] = "Lu >= -tol verified";
    } else {
        rep.preconditions["hypothesis"] = "assumed by caller";
    }

    const double m_all = std::max(u.max_interior(),
                                  detail::exterior_sup(u, spec, nullptr));
    rep.preconditions["global_max"] = detail::fmt(m_all);
    // theorem cases: c==0 always; c<=0 needs a nonnegative max; otherwise a zero max
    if (spec.c_regime == CRegime::NonPositive && m_all < -opts.tol) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("c <= 0 case requires a nonnegative maximum");
        return rep;
    }
    if (spec.c_regime == CRegime::Unsigned && std::abs(m_all) > opts.tol) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("unsigned c requires a zero maximum");
        return rep;
    }

    const auto comp = detail::interior_components(*spec.domain);
    const double range_scale = [&] {
        double lo = kInf, hi = -kInf;
        for (double v : u.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    }();
    const double tol_const = 1e-6 * (1 + range_scale);

    std::set<int> attained_components;
    int attain_node = -1;
    for (int id : spec.domain->interior_nodes)
        if (u.values[id] >= m_all - opts.tol) {
            attained_components.insert(comp[id]);
            if (attain_node < 0) attain_node = id;
        }
    if (attained_components.empty()) {
        rep.verdict = Verdict::Pass;
        rep.notes.push_back("no interior node attains the global maximum (vacuous)");
        return rep;
    }
    rep.notes.push_back("interior maximizer present; constancy required on its component");
    for (int id : spec.domain->interior_nodes) {
        if (!attained_components.count(comp[id])) continue;
        if (std::abs(u.values[id] - m_all) > tol_const) {
            Witness w;
            w.node_id = id;
            w.coords = spec.domain->grid.coord(id);
            w.value = u.values[id];
            w.bound = m_all;
            w.description = "component holds an interior maximizer (node " +
                            std::to_string(attain_node) + ") but is not constant";
            rep.witness = w;
            rep.verdict = Verdict::Fail;
            return rep;
        }
    }
    rep.verdict = Verdict::Pass;
    return rep;
}

/// Strong parabolic principle: an interior maximizer at time t0 forces
/// constancy of the component for all earlier positive times.
inline PrincipleReport check_strong_parabolic(const Trajectory& traj, const ProblemSpec& spec,
                                              const DiscreteOperator& op,
                                              const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "strong_maximum_parabolic";
    rep.tol = opts.tol;
    rep.preconditions["c_regime"] = to_string(spec.c_regime);
    if (traj.size() < 2) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("trajectory holds fewer than two time levels");
        return rep;
    }
    if (!opts.assume_hypothesis) {
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const double dt = traj.times[k] - traj.times[k - 1];
            const Field r = op.apply(traj.fields[k]);
            for (int id : spec.domain->interior_nodes) {
                const double dudt =
                    (traj.fields[k].values[id] - traj.fields[k - 1].values[id]) / dt;
                if (-dudt + r.values[id] < -opts.tol * (1 + std::abs(dudt))) {
                    rep.verdict = Verdict::Inapplicable;
                    rep.notes.push_back("hypothesis -du/dt + Lu >= 0 fails");
                    return rep;
                }
            }
        }
        rep.preconditions["hypothesis"] = "-du/dt + Lu >= -tol verified each step";
    } else {
        rep.preconditions["hypothesis"] = "assumed by caller";
    }

    double m_all = -kInf;
    for (const auto& f : traj.fields)
        for (double v : f.values) m_all = std::max(m_all, v);
    if (spec.domain->e_whole_space) m_all = std::max(m_all, spec.coeffs.g_far);
    rep.preconditions["global_max"] = detail::fmt(m_all);
    if (spec.c_regime == CRegime::NonPositive && m_all < -opts.tol) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("c <= 0 case requires a nonnegative maximum");
        return rep;
    }
    if (spec.c_regime == CRegime::Unsigned && std::abs(m_all) > opts.tol) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("unsigned c requires a zero maximum");
        return rep;
    }

    const auto comp = detail::interior_components(*spec.domain);
    double range_scale = 0;
    {
        double lo = kInf, hi = -kInf;
        for (const auto& f : traj.fields)
            for (double v : f.values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        range_scale = hi - lo;
    }
    const double tol_const = 1e-6 * (1 + range_scale);

    bool any = false;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        for (int id : spec.domain->interior_nodes) {
            if (traj.fields[k].values[id] < m_all - opts.tol) continue;
            any = true;
            // constancy over the maximizer's component for all 0 < t <= t_k
            for (std::size_t k2 = 1; k2 <= k; ++k2)
                for (int id2 : spec.domain->interior_nodes) {
                    if (comp[id2] != comp[id]) continue;
                    if (std::abs(traj.fields[k2].values[id2] - m_all) > tol_const) {
                        Witness w;
                        w.node_id = id2;
                        w.coords = spec.domain->grid.coord(id2);
                        w.value = traj.fields[k2].values[id2];
                        w.bound = m_all;
                        w.time_index = static_cast<int>(k2);
                        w.time = traj.times[k2];
                        w.description =
                            "interior maximizer at a later time, component not constant";
                        rep.witness = w;
                        rep.verdict = Verdict::Fail;
                        return rep;
                    }
                }
        }
    }
    rep.verdict = Verdict::Pass;
    if (!any) rep.notes.push_back("no interior space-time maximizer (vacuous)");
    return rep;
}

/// Hopf boundary lemma: at a strict boundary maximum of u with nondegenerate
/// diffusion, the one-sided outer-normal difference quotient is positive.
inline PrincipleReport check_hopf(const Field& u, const ProblemSpec& spec,
                                  const DiscreteOperator& op, int boundary_node,
                                  const CheckOptions& opts = {}) {
    PrincipleReport rep;
    rep.check = "hopf_boundary";
    rep.tol = opts.tol;
    rep.preconditions["gamma_estimate"] = detail::fmt(op.meta.gamma_estimate);
    if (!(op.meta.gamma_estimate > 0)) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("degenerate diffusion: the boundary-slope argument is gated off");
        return rep;
    }
    const auto& dom = *spec.domain;
    if (boundary_node < 0 || boundary_node >= dom.grid.num_nodes() ||
        dom.node_class[boundary_node] != NodeClass::ExteriorData) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("given node is not an exterior-data node");
        return rep;
    }
    if (!opts.assume_hypothesis) {
        if (auto w = detail::hypothesis_sign(op, u, opts.tol, +1)) {
            rep.verdict = Verdict::Inapplicable;
            rep.witness = *w;
            rep.notes.push_back("hypothesis Lu >= 0 fails");
            return rep;
        }
    }
    const double ub = u.values[boundary_node];
    if (!(ub > u.max_interior() + opts.tol)) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("boundary value is not strictly above all interior values");
        return rep;
    }
    // inward neighbor defines the outer normal direction
    const auto mi = dom.grid.multi_index(boundary_node);
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    int inward = -1;
    for (int k = 0; k < 2 * dom.grid.dim; ++k) {
        const int ix = mi[0] + dx[k], iy = mi[1] + dy[k];
        if (dom.grid.in_range(ix, iy) &&
            dom.node_class[dom.grid.id(ix, iy)] == NodeClass::Interior) {
            inward = dom.grid.id(ix, iy);
            break;
        }
    }
    if (inward < 0) {
        rep.verdict = Verdict::Inapplicable;
        rep.notes.push_back("node has no interior axis neighbor");
        return rep;
    }
    const double slope = (ub - u.values[inward]) / dom.grid.h;
    Witness w;
    w.node_id = boundary_node;
    w.coords = dom.grid.coord(boundary_node);
    w.value = slope;
    w.bound = opts.tol;
    w.description = "one-sided outer-normal difference quotient";
    rep.witness = w;
    rep.verdict = slope > opts.tol ? Verdict::Pass : Verdict::Fail;
    return rep;
}

struct PropagationClosure {
    std::vector<int> nodes;   // grid node ids in the closure, sorted
    bool stabilized = false;
    bool covers_closure_of_d = false;
    int iterations = 0;
};

/// Discrete fixed point of the maximizer-propagation recursion: starting from
/// x0, repeatedly translate the jump support from every interior node already
/// reached, intersected with the grid.
inline PropagationClosure propagation_closure(const ProblemSpec& spec, int x0_node,
                                              int max_iter = 64) {
    const auto& dom = *spec.domain;
    if (x0_node < 0 || dom.node_class[x0_node] != NodeClass::Interior)
        throw config_error("propagation closure requires an interior start node");
    PropagationClosure out;
    std::vector<char> in_set(dom.grid.num_nodes(), 0);
    std::vector<int> frontier{x0_node};
    in_set[x0_node] = 1;

    const bool stable = spec.kernel && spec.kernel->kind() == LevyKernel::Kind::AlphaStable;
    const bool tabulated = spec.kernel && spec.kernel->kind() == LevyKernel::Kind::Tabulated;
    std::vector<std::array<int, 2>> atom_offsets;
    if (spec.kernel && spec.kernel->kind() == LevyKernel::Kind::Finite) {
        const double h = dom.grid.h;
        for (const auto& j : spec.kernel->jumps())
            if (j.mass > 0)
                atom_offsets.push_back({static_cast<int>(std::llround(j.z[0] / h)),
                                        static_cast<int>(std::llround(j.z[1] / h))});
    }

    auto supp_contains = [&](const Vec& z) {
        if (!spec.kernel) return false;
        if (!spec.kernel->support_contains(z)) return false;
        if (tabulated) return spec.kernel->density(z) > 0;
        return true;  // alpha-stable: full support modulo the mask
    };

    for (int it = 0; it < max_iter && !frontier.empty(); ++it) {
        out.iterations = it + 1;
        std::vector<int> next;
        for (int id : frontier) {
            if (dom.node_class[id] != NodeClass::Interior) continue;  // iterate from D only
            const Vec x = dom.grid.coord(id);
            const auto mi = dom.grid.multi_index(id);
            auto visit = [&](int ix, int iy) {
                if (!dom.grid.in_range(ix, iy)) return;
                const int nid = dom.grid.id(ix, iy);
                if (in_set[nid] || dom.node_class[nid] == NodeClass::Outside) return;
                const Vec y = dom.grid.coord(nid);
                const Vec z{y[0] - x[0], y[1] - x[1]};
                if (!dom.e_closure_contains(y)) return;
                if (!supp_contains(z)) return;
                in_set[nid] = 1;
                next.push_back(nid);
            };
            if (!atom_offsets.empty()) {
                for (const auto& k : atom_offsets) visit(mi[0] + k[0], mi[1] + k[1]);
            } else if (stable || tabulated) {
                for (int iy = 0; iy < dom.grid.n[1]; ++iy)
                    for (int ix = 0; ix < dom.grid.n[0]; ++ix)
                        if (!(ix == mi[0] && iy == mi[1])) visit(ix, iy);
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) out.stabilized = true;
    }

    const double eps = dom.boundary_tol();
    out.covers_closure_of_d = true;
    for (int id = 0; id < dom.grid.num_nodes(); ++id) {
        if (in_set[id]) out.nodes.push_back(id);
        const bool in_dbar =
            dom.node_class[id] == NodeClass::Interior ||
            (dom.node_class[id] != NodeClass::Outside &&
             dom.region_d.contains(dom.grid.coord(id), dom.grid.dim, eps));
        if (in_dbar && !in_set[id]) out.covers_closure_of_d = false;
    }
    return out;
}

}  // namespace waldenfels
