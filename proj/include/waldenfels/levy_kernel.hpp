#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "waldenfels/common.hpp"
#include "waldenfels/geometry.hpp"

namespace waldenfels {

/// Normalization making the isotropic alpha-stable jump operator equal to
/// -(-Laplace)^{alpha/2}:  c = alpha Gamma((d+alpha)/2) /
/// (2^{1-alpha} pi^{d/2} Gamma(1-alpha/2)).
inline double stable_normalization(double alpha, int dim) {
    return alpha * std::tgamma((dim + alpha) / 2.0) /
           (std::pow(2.0, 1.0 - alpha) * std::pow(std::numbers::pi, dim / 2.0) *
            std::tgamma(1.0 - alpha / 2.0));
}

struct Jump {
    Vec z{0, 0};
    double mass = 0;
};

/// Declared power-law bounds for a tabulated density: nu(dz) ~ |z|^{-p} dz
/// near the origin and near infinity. Integrability requires
/// origin_exponent < d+2 and infinity_exponent > d.
struct IntegrabilityCertificate {
    double origin_exponent;
    double infinity_exponent;
};

struct MomentCheck {
    TriState finite = TriState::Unknown;  // Unknown = unverifiable
    double value = 0;                     // integral of (1 ^ |z|^2) nu(dz)
    std::string note;
};

namespace detail {

/// Adaptive Simpson on [a,b], recursion-depth capped.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double d = left + right - whole;
    if (depth <= 0 || std::abs(d) <= 15 * tol) return left + right + d / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int depth = 40) {
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, depth);
}

}  // namespace detail

/// Translation-invariant Levy jump measure nu(dz) on R^d \ {0}, d in {1,2}:
/// isotropic alpha-stable, a finite atomic measure, or a tabulated density.
/// An optional support mask clips the measure; every exposed moment then
/// integrates over the clipped domain. Immutable after construction.
class LevyKernel {
  public:
    enum class Kind { AlphaStable, Finite, Tabulated };

    static LevyKernel alpha_stable(double alpha, int dim, double scale = 1.0) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw std::domain_error("alpha-stable kernel requires alpha in (0,2), got " +
                                    std::to_string(alpha));
        if (dim < 1) throw std::domain_error("kernel dimension must be >= 1");
        if (!(scale > 0.0)) throw std::domain_error("kernel scale must be > 0");
        LevyKernel k;
        k.kind_ = Kind::AlphaStable;
        k.dim_ = dim;
        k.alpha_ = alpha;
        k.norm_ = scale * stable_normalization(alpha, dim);
        return k;
    }

    static LevyKernel finite(std::vector<Jump> jumps, int dim) {
        LevyKernel k;
        k.kind_ = Kind::Finite;
        k.dim_ = dim;
        for (const auto& j : jumps)
            if (j.mass < 0) throw std::domain_error("finite measure requires nonnegative masses");
        k.jumps_ = std::move(jumps);
        return k;
    }

    static LevyKernel tabulated(std::function<double(const Vec&)> density, int dim,
                                std::optional<IntegrabilityCertificate> cert = {}) {
        LevyKernel k;
        k.kind_ = Kind::Tabulated;
        k.dim_ = dim;
        k.density_ = std::move(density);
        k.certificate_ = cert;
        return k;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double normalization() const { return norm_; }
    const std::vector<Jump>& jumps() const { return jumps_; }
    const std::optional<SupportMask>& support_mask() const { return mask_; }
    const std::optional<IntegrabilityCertificate>& certificate() const { return certificate_; }

    /// Hook for state-dependent measures nu(x,.). Closed-form moments and the
    /// assemblers require translation invariance and reject kernels with this set.
    LevyKernel with_site_modulation(std::function<double(const Vec&)> modulation) const {
        LevyKernel k = *this;
        k.site_modulation_ = std::move(modulation);
        return k;
    }
    bool state_dependent() const { return site_modulation_.has_value(); }

    bool support_contains(const Vec& z) const {
        return !mask_ || mask_->region.contains(z, dim_);
    }

    double density(const Vec& z) const {
        require_invariant();
        if (mask_ && !mask_->region.contains(z, dim_)) return 0.0;
        switch (kind_) {
            case Kind::AlphaStable: {
                const double r = norm(z, dim_);
                return norm_ * std::pow(r, -(dim_ + alpha_));
            }
            case Kind::Tabulated:
                return density_(z);
            default:
                throw std::domain_error("finite measures have no density");
        }
    }

    /// Restrict the measure to the mask; all moments integrate over the
    /// clipped domain from then on. Clipping with the current mask is the identity.
    LevyKernel clip_support(const SupportMask& mask) const {
        LevyKernel k = *this;
        if (!mask_) {
            k.mask_ = mask;
        } else if (*mask_ == mask) {
            return k;
        } else {
            k.mask_ = SupportMask{
                Region::intersection_of({mask_->region, mask.region})};
        }
        return k;
    }

    /// int_{|z| < delta} z (x) z nu(dz), clipped by the mask.
    SymMat small_jump_second_moment(double delta) const {
        require_invariant();
        if (!(delta > 0)) throw std::domain_error("small_jump_second_moment requires delta > 0");
        if (kind_ == Kind::Finite) {
            SymMat s;
            for (const auto& j : jumps_) {
                if (!support_contains(j.z)) continue;
                if (norm(j.z, dim_) < delta) {
                    s.xx += j.mass * j.z[0] * j.z[0];
                    s.xy += j.mass * j.z[0] * j.z[1];
                    s.yy += j.mass * j.z[1] * j.z[1];
                }
            }
            return s;
        }
        return second_moment_radial(0.0, delta);
    }

    /// nu({|z| > R}), clipped by the mask.
    double tail_mass(double R) const {
        require_invariant();
        if (!(R > 0)) throw std::domain_error("tail_mass requires R > 0");
        if (kind_ == Kind::Finite) {
            double s = 0;
            for (const auto& j : jumps_)
                if (support_contains(j.z) && norm(j.z, dim_) > R) s += j.mass;
            return s;
        }
        return mass_radial(R, kInf);
    }

    /// nu([a,b] intersect mask) on the line (1D kernels), a < b, 0 not inside.
    double interval_mass_1d(double a, double b) const {
        require_invariant();
        if (dim_ != 1) throw std::domain_error("interval_mass_1d requires a 1D kernel");
        if (!(a < b)) return 0.0;
        if (a < 0 && b > 0) throw std::domain_error("interval must not contain the origin");
        if (kind_ == Kind::Finite) {
            double s = 0;
            for (const auto& j : jumps_)
                if (support_contains(j.z) && j.z[0] >= a && j.z[0] <= b) s += j.mass;
            return s;
        }
        IntervalSet segs = mask_ ? intersect_intervals(region_intervals_1d(mask_->region),
                                                       {{a, b}})
                                 : IntervalSet{{a, b}};
        double s = 0;
        for (const auto& seg : segs) {
            const double u = seg.second <= 0 ? -seg.second : seg.first;
            const double v = seg.second <= 0 ? -seg.first : seg.second;
            const double sgn = seg.second <= 0 ? -1.0 : 1.0;
            if (kind_ == Kind::AlphaStable) {
                s += norm_ * radial_power_integral(0.0, std::max(u, 1e-300), v);
            } else {
                auto fm = [&](double r) { return tab_density_radial(r, {sgn, 0}); };
                s += detail::integrate(fm, std::max(u, 1e-300), std::min(v, 1e12), 1e-13);
            }
        }
        return s;
    }

    /// nu({r1 <= |z| <= r2}), clipped by the mask.
    double annulus_mass(double r1, double r2) const {
        require_invariant();
        if (kind_ == Kind::Finite) {
            double s = 0;
            for (const auto& j : jumps_) {
                const double r = norm(j.z, dim_);
                if (support_contains(j.z) && r >= r1 && r <= r2) s += j.mass;
            }
            return s;
        }
        return mass_radial(r1, r2);
    }

    /// int_{r1 <= |z| <= r2} z (x) z nu(dz), clipped by the mask.
    SymMat annulus_second_moment(double r1, double r2) const {
        require_invariant();
        if (kind_ == Kind::Finite) {
            SymMat s;
            for (const auto& j : jumps_) {
                const double r = norm(j.z, dim_);
                if (support_contains(j.z) && r >= r1 && r <= r2) {
                    s.xx += j.mass * j.z[0] * j.z[0];
                    s.xy += j.mass * j.z[0] * j.z[1];
                    s.yy += j.mass * j.z[1] * j.z[1];
                }
            }
            return s;
        }
        return second_moment_radial(r1, r2);
    }

    /// Moment condition int (1 ^ |z|^2) nu(dz) < infinity. Verifiable in closed
    /// form for the stable kind, by summation for finite measures, and via the
    /// integrability certificate for tabulated densities (Unknown without one).
    MomentCheck check_levy_moment() const {
        require_invariant();
        MomentCheck out;
        switch (kind_) {
            case Kind::AlphaStable:
                out.finite = TriState::Pass;
                out.value = small_jump_second_moment(1.0).trace(dim_) + tail_mass(1.0);
                return out;
            case Kind::Finite: {
                out.finite = TriState::Pass;
                double v = 0;
                for (const auto& j : jumps_) {
                    if (!support_contains(j.z)) continue;
                    const double r2 = dot(j.z, j.z, dim_);
                    v += j.mass * std::min(1.0, r2);
                }
                out.value = v;
                return out;
            }
            case Kind::Tabulated: {
                if (!certificate_) {
                    out.finite = TriState::Unknown;
                    out.note = "tabulated density carries no integrability certificate";
                    return out;
                }
                const bool ok = certificate_->origin_exponent < dim_ + 2.0 &&
                                certificate_->infinity_exponent > dim_;
                out.finite = ok ? TriState::Pass : TriState::Fail;
                if (ok)
                    out.value = small_jump_second_moment(1.0).trace(dim_) + tail_mass(1.0);
                else {
                    out.value = kInf;
                    out.note = "certificate exponents violate the moment condition";
                }
                return out;
            }
        }
        return out;
    }

    std::string fingerprint() const {
        char buf[160];
        switch (kind_) {
            case Kind::AlphaStable:
                std::snprintf(buf, sizeof buf, "alpha_stable(alpha=%.12g,d=%d,c=%.12g%s)",
                              alpha_, dim_, norm_, mask_ ? ",clipped" : "");
                return buf;
            case Kind::Finite:
                std::snprintf(buf, sizeof buf, "finite(n=%zu%s)", jumps_.size(),
                              mask_ ? ",clipped" : "");
                return buf;
            case Kind::Tabulated:
                std::snprintf(buf, sizeof buf, "tabulated(d=%d%s)", dim_,
                              mask_ ? ",clipped" : "");
                return buf;
        }
        return "?";
    }

  private:
    Kind kind_ = Kind::AlphaStable;
    int dim_ = 1;
    double alpha_ = 1.0;
    double norm_ = 0.0;
    std::vector<Jump> jumps_;
    std::function<double(const Vec&)> density_;
    std::optional<IntegrabilityCertificate> certificate_;
    std::optional<SupportMask> mask_;
    std::optional<std::function<double(const Vec&)>> site_modulation_;

    void require_invariant() const {
        if (site_modulation_)
            throw std::domain_error(
                "state-dependent kernel: closed-form moments require translation invariance");
    }

    // One-sided radial primitives for a density rho(r) = norm * r^{-d-alpha}
    // integrated against r^{p} over [r1, r2] with the surface element:
    //   d=1: 2 * int r^{p-1-alpha} dr (both half-lines); d=2 uses angular factors.

    double radial_power_integral(double p, double r1, double r2) const {
        // int_{r1}^{r2} r^{p-1-alpha} dr
        const double e = p - alpha_;
        auto pw = [&](double r) { return r == kInf ? 0.0 : std::pow(r, e); };
        if (e == 0.0) return std::log(r2 / r1);
        if (e < 0) return (pw(r1) - pw(r2)) / (-e);
        return (pw(r2) - pw(r1)) / e;
    }

    double tab_density_radial(double r, const Vec& dir) const {
        return density_(Vec{r * dir[0], r * dir[1]});
    }

    double mass_radial(double r1, double r2) const {
        if (r2 <= r1) return 0.0;
        if (kind_ == Kind::AlphaStable && !mask_) {
            const double S = dim_ == 1 ? 2.0 : 2.0 * std::numbers::pi;
            return norm_ * S * radial_power_integral(0.0, r1, r2);
        }
        return masked_moment(r1, r2).mass;
    }

    SymMat second_moment_radial(double r1, double r2) const {
        if (r2 <= r1) return {};
        if (kind_ == Kind::AlphaStable && !mask_) {
            const double S = dim_ == 1 ? 2.0 : 2.0 * std::numbers::pi;
            const double v = norm_ * (S / dim_) * radial_power_integral(2.0, r1, r2);
            return SymMat::identity(dim_, v);
        }
        return masked_moment(r1, r2).m2;
    }

    struct Moments {
        double mass = 0;
        SymMat m2;
    };

    /// Mass and second moment over {r1 <= |z| <= r2} intersect mask, generic path.
    Moments masked_moment(double r1, double r2) const {
        Moments out;
        if (dim_ == 1) {
            IntervalSet segs =
                mask_ ? region_intervals_1d(mask_->region) : IntervalSet{{-kInf, kInf}};
            IntervalSet shell = {{-r2, -r1}, {r1, r2}};
            if (r1 == 0.0) shell = {{-r2, r2}};
            for (const auto& s : intersect_intervals(segs, shell)) {
                // split at zero; integrate on |z| coordinates
                auto piece = [&](double a, double b) {  // 0 <= a < b
                    if (b <= a) return;
                    if (kind_ == Kind::AlphaStable) {
                        out.mass += norm_ * radial_power_integral(0.0, std::max(a, 1e-300), b);
                        out.m2.xx += norm_ * radial_power_integral(2.0, std::max(a, 1e-300), b);
                    } else {  // tabulated, 1D
                        auto fm = [&](double r) { return tab_density_radial(r, {1, 0}); };
                        auto f2 = [&](double r) { return r * r * tab_density_radial(r, {1, 0}); };
                        const double bb = std::min(b, 1e12);
                        if (a > 0)
                            out.mass += detail::integrate(fm, a, bb, 1e-13);
                        else
                            out.mass = kInf;  // undefined mass across the origin
                        out.m2.xx += detail::integrate(f2, std::max(a, 1e-300), bb, 1e-13);
                    }
                };
                if (s.second <= 0) {
                    // reflect: integrate density at -r
                    if (kind_ == Kind::AlphaStable) {
                        piece(-s.second, -s.first);
                    } else {
                        auto fm = [&](double r) { return tab_density_radial(r, {-1, 0}); };
                        auto f2 = [&](double r) { return r * r * tab_density_radial(r, {-1, 0}); };
                        const double a = -s.second, b = std::min(-s.first, 1e12);
                        if (a > 0) out.mass += detail::integrate(fm, a, b, 1e-13);
                        out.m2.xx += detail::integrate(f2, std::max(a, 1e-300), b, 1e-13);
                    }
                } else if (s.first >= 0) {
                    piece(s.first, s.second);
                } else {
                    piece(0.0, s.second);
                    if (kind_ == Kind::AlphaStable) {
                        piece(0.0, -s.first);
                    } else {
                        auto fm = [&](double r) { return tab_density_radial(r, {-1, 0}); };
                        auto f2 = [&](double r) { return r * r * tab_density_radial(r, {-1, 0}); };
                        out.mass += detail::integrate(fm, 1e-300, -s.first, 1e-13);
                        out.m2.xx += detail::integrate(f2, 1e-300, -s.first, 1e-13);
                    }
                }
            }
            return out;
        }
        // d = 2: angular composite Simpson, radial closed forms per ray.
        const int npanel = 4096;
        const double dth = 2.0 * std::numbers::pi / npanel;
        auto ray_contrib = [&](double th, Moments& acc, double w) {
            const Vec dir{std::cos(th), std::sin(th)};
            IntervalSet segs = mask_ ? region_ray_intervals(mask_->region, dir, 2)
                                     : IntervalSet{{0, kInf}};
            segs = intersect_intervals(segs, {{r1, r2}});
            for (const auto& s : segs) {
                double m, q;
                if (kind_ == Kind::AlphaStable) {
                    m = norm_ * radial_power_integral(0.0, std::max(s.first, 1e-300), s.second);
                    q = norm_ * radial_power_integral(2.0, std::max(s.first, 1e-300), s.second);
                } else {
                    auto fm = [&](double r) { return r * tab_density_radial(r, dir); };
                    auto f2 = [&](double r) { return r * r * r * tab_density_radial(r, dir); };
                    const double b = std::min(s.second, 1e9);
                    m = detail::integrate(fm, std::max(s.first, 1e-300), b, 1e-12);
                    q = detail::integrate(f2, std::max(s.first, 1e-300), b, 1e-12);
                }
                acc.mass += w * m;
                acc.m2.xx += w * q * dir[0] * dir[0];
                acc.m2.xy += w * q * dir[0] * dir[1];
                acc.m2.yy += w * q * dir[1] * dir[1];
            }
        };
        // Simpson weights over the periodic angle
        for (int i = 0; i < npanel; ++i) {
            const double a = i * dth;
            ray_contrib(a, out, dth / 6.0);
            ray_contrib(a + dth / 2, out, 4.0 * dth / 6.0);
            ray_contrib(a + dth, out, dth / 6.0);
        }
        return out;
    }
};

/// Kernel with normalization fixed so that K = -(-Laplace)^{alpha/2}.
inline LevyKernel make_alpha_stable(double alpha, int dim) {
    return LevyKernel::alpha_stable(alpha, dim);
}

}  // namespace waldenfels
