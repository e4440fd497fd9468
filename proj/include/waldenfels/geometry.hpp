#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "waldenfels/common.hpp"

namespace waldenfels {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed geometric region of R^d assembled from boxes, balls and half-spaces.
/// Supports the set algebra needed for jump-support clipping: membership with
/// a signed tolerance, decomposition into intervals (1D), and ray tracing (2D).
struct Region {
    enum class Kind { All, Box, Ball, HalfSpace, Union, Intersection };

    Kind kind = Kind::All;
    Vec lo{0, 0}, hi{0, 0};      // Box
    Vec center{0, 0};            // Ball
    double radius = 0;           // Ball
    Vec normal{1, 0};            // HalfSpace: { x : n.x >= offset }
    double offset = 0;           // HalfSpace
    std::vector<Region> parts;   // Union / Intersection

    static Region all() { return {}; }
    static Region interval(double a, double b) {
        Region r; r.kind = Kind::Box; r.lo = vec1(a); r.hi = vec1(b);
        return r;
    }
    static Region box(Vec lo, Vec hi) {
        Region r; r.kind = Kind::Box; r.lo = lo; r.hi = hi;
        return r;
    }
    static Region ball(Vec c, double rad) {
        Region r; r.kind = Kind::Ball; r.center = c; r.radius = rad;
        return r;
    }
    static Region half_space(Vec n, double off) {
        Region r; r.kind = Kind::HalfSpace; r.normal = n; r.offset = off;
        return r;
    }
    static Region union_of(std::vector<Region> ps) {
        Region r; r.kind = Kind::Union; r.parts = std::move(ps);
        return r;
    }
    static Region intersection_of(std::vector<Region> ps) {
        Region r; r.kind = Kind::Intersection; r.parts = std::move(ps);
        return r;
    }

    /// Membership with signed tolerance: tol > 0 fattens the region,
    /// tol < 0 shrinks it (strict interior test).
    bool contains(const Vec& p, int dim, double tol = 0.0) const {
        switch (kind) {
            case Kind::All:
                return true;
            case Kind::Box:
                for (int j = 0; j < dim; ++j)
                    if (p[j] < lo[j] - tol || p[j] > hi[j] + tol) return false;
                return true;
            case Kind::Ball: {
                Vec d{p[0] - center[0], p[1] - center[1]};
                return norm(d, dim) <= radius + tol;
            }
            case Kind::HalfSpace:
                return dot(normal, p, dim) >= offset - tol * norm(normal, dim);
            case Kind::Union:
                for (const auto& r : parts)
                    if (r.contains(p, dim, tol)) return true;
                return false;
            case Kind::Intersection:
                for (const auto& r : parts)
                    if (!r.contains(p, dim, tol)) return false;
                return true;
        }
        return false;
    }

    bool operator==(const Region& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
            case Kind::All: return true;
            case Kind::Box: return lo == o.lo && hi == o.hi;
            case Kind::Ball: return center == o.center && radius == o.radius;
            case Kind::HalfSpace: return normal == o.normal && offset == o.offset;
            default: return parts == o.parts;
        }
    }

    /// True if the origin-centered ball of radius r is contained in the region
    /// (conservative for unions).
    bool contains_origin_ball(double r, int dim) const {
        switch (kind) {
            case Kind::All:
                return true;
            case Kind::Box:
                for (int j = 0; j < dim; ++j)
                    if (lo[j] > -r || hi[j] < r) return false;
                return true;
            case Kind::Ball:
                return norm(center, dim) + r <= radius;
            case Kind::HalfSpace:
                return offset <= -r * norm(normal, dim);
            case Kind::Union:
                for (const auto& p : parts)
                    if (p.contains_origin_ball(r, dim)) return true;
                return false;
            case Kind::Intersection:
                for (const auto& p : parts)
                    if (!p.contains_origin_ball(r, dim)) return false;
                return true;
        }
        return false;
    }

    /// Supremum of |x| over the region (kInf when unbounded).
    double bounding_radius(int dim) const {
        switch (kind) {
            case Kind::All:
            case Kind::HalfSpace:
                return kInf;
            case Kind::Box: {
                double s = 0;
                for (int j = 0; j < dim; ++j)
                    s += std::max(lo[j] * lo[j], hi[j] * hi[j]);
                return std::sqrt(s);
            }
            case Kind::Ball:
                return norm(center, dim) + radius;
            case Kind::Union: {
                double m = 0;
                for (const auto& p : parts) m = std::max(m, p.bounding_radius(dim));
                return m;
            }
            case Kind::Intersection: {
                double m = kInf;
                for (const auto& p : parts) m = std::min(m, p.bounding_radius(dim));
                return m;
            }
        }
        return kInf;
    }

    /// Axis-aligned bounding box (components +-kInf when unbounded).
    void bounding_box(int dim, Vec& blo, Vec& bhi) const {
        switch (kind) {
            case Kind::All:
            case Kind::HalfSpace:
                blo = {-kInf, -kInf}; bhi = {kInf, kInf};
                return;
            case Kind::Box:
                blo = lo; bhi = hi;
                return;
            case Kind::Ball:
                for (int j = 0; j < dim; ++j) {
                    blo[j] = center[j] - radius;
                    bhi[j] = center[j] + radius;
                }
                return;
            case Kind::Union: {
                blo = {kInf, kInf}; bhi = {-kInf, -kInf};
                for (const auto& p : parts) {
                    Vec l, h;
                    p.bounding_box(dim, l, h);
                    for (int j = 0; j < dim; ++j) {
                        blo[j] = std::min(blo[j], l[j]);
                        bhi[j] = std::max(bhi[j], h[j]);
                    }
                }
                return;
            }
            case Kind::Intersection: {
                blo = {-kInf, -kInf}; bhi = {kInf, kInf};
                for (const auto& p : parts) {
                    Vec l, h;
                    p.bounding_box(dim, l, h);
                    for (int j = 0; j < dim; ++j) {
                        blo[j] = std::max(blo[j], l[j]);
                        bhi[j] = std::min(bhi[j], h[j]);
                    }
                }
                return;
            }
        }
    }
};

/// Sorted disjoint intervals on the real line.
using IntervalSet = std::vector<std::pair<double, double>>;

inline IntervalSet normalize_intervals(IntervalSet v) {
    std::sort(v.begin(), v.end());
    IntervalSet out;
    for (auto& iv : v) {
        if (iv.second <= iv.first) continue;
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

inline IntervalSet intersect_intervals(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet out;
    for (const auto& x : a)
        for (const auto& y : b) {
            double lo = std::max(x.first, y.first), hi = std::min(x.second, y.second);
            if (lo < hi) out.emplace_back(lo, hi);
        }
    return normalize_intervals(out);
}

/// Exact 1D decomposition of a region into disjoint intervals.
inline IntervalSet region_intervals_1d(const Region& r) {
    using K = Region::Kind;
    switch (r.kind) {
        case K::All:
            return {{-kInf, kInf}};
        case K::Box:
            return normalize_intervals({{r.lo[0], r.hi[0]}});
        case K::Ball:
            return normalize_intervals({{r.center[0] - r.radius, r.center[0] + r.radius}});
        case K::HalfSpace: {
            const double n = r.normal[0];
            if (n == 0) return r.offset <= 0 ? IntervalSet{{-kInf, kInf}} : IntervalSet{};
            return n > 0 ? IntervalSet{{r.offset / n, kInf}}
                         : IntervalSet{{-kInf, r.offset / n}};
        }
        case K::Union: {
            IntervalSet out;
            for (const auto& p : r.parts) {
                auto s = region_intervals_1d(p);
                out.insert(out.end(), s.begin(), s.end());
            }
            return normalize_intervals(out);
        }
        case K::Intersection: {
            IntervalSet out{{-kInf, kInf}};
            for (const auto& p : r.parts) out = intersect_intervals(out, region_intervals_1d(p));
            return out;
        }
    }
    return {};
}

/// Parameter intervals t >= 0 with origin + t*dir inside the region (2D).
inline IntervalSet region_ray_intervals(const Region& r, const Vec& dir, int dim) {
    using K = Region::Kind;
    switch (r.kind) {
        case K::All:
            return {{0, kInf}};
        case K::Box: {
            double t0 = 0, t1 = kInf;
            for (int j = 0; j < dim; ++j) {
                if (dir[j] == 0) {
                    if (0 < r.lo[j] || 0 > r.hi[j]) return {};
                } else {
                    double a = r.lo[j] / dir[j], b = r.hi[j] / dir[j];
                    if (a > b) std::swap(a, b);
                    t0 = std::max(t0, a);
                    t1 = std::min(t1, b);
                }
            }
            return t0 < t1 ? IntervalSet{{t0, t1}} : IntervalSet{};
        }
        case K::Ball: {
            // |t*dir - c|^2 = r^2, |dir| = 1
            const double b = -2 * dot(dir, r.center, dim);
            const double c = dot(r.center, r.center, dim) - r.radius * r.radius;
            const double disc = b * b - 4 * c;
            if (disc <= 0) return {};
            const double s = std::sqrt(disc);
            double t0 = std::max(0.0, (-b - s) / 2), t1 = (-b + s) / 2;
            return t0 < t1 ? IntervalSet{{t0, t1}} : IntervalSet{};
        }
        case K::HalfSpace: {
            const double nd = dot(r.normal, dir, dim);
            if (nd == 0) return r.offset <= 0 ? IntervalSet{{0, kInf}} : IntervalSet{};
            const double t = r.offset / nd;
            if (nd > 0) return t <= 0 ? IntervalSet{{0, kInf}} : IntervalSet{{t, kInf}};
            return t <= 0 ? IntervalSet{} : IntervalSet{{0, t}};
        }
        case K::Union: {
            IntervalSet out;
            for (const auto& p : r.parts) {
                auto s = region_ray_intervals(p, dir, dim);
                out.insert(out.end(), s.begin(), s.end());
            }
            return normalize_intervals(out);
        }
        case K::Intersection: {
            IntervalSet out{{0, kInf}};
            for (const auto& p : r.parts)
                out = intersect_intervals(out, region_ray_intervals(p, dir, dim));
            return out;
        }
    }
    return {};
}

/// Support restriction for a jump measure: the admissible displacement set.
/// An empty region makes the nonlocal term vanish.
struct SupportMask {
    Region region = Region::all();

    bool operator==(const SupportMask& o) const { return region == o.region; }
};

}  // namespace waldenfels
