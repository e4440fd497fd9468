#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace waldenfels {

/// Spatial point / vector for d in {1,2}. Unused components stay zero.
using Vec = std::array<double, 2>;

inline Vec vec1(double x) { return {x, 0.0}; }
inline Vec vec2(double x, double y) { return {x, y}; }

inline double dot(const Vec& a, const Vec& b, int dim) {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += a[j] * b[j];
    return s;
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

/// Symmetric d x d matrix, d in {1,2}; xy ignored in 1D.
struct SymMat {
    double xx = 0, xy = 0, yy = 0;

    SymMat& operator+=(const SymMat& o) {
        xx += o.xx; xy += o.xy; yy += o.yy;
        return *this;
    }
    SymMat operator+(const SymMat& o) const { SymMat r = *this; r += o; return r; }
    SymMat operator-(const SymMat& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    SymMat operator*(double s) const { return {xx * s, xy * s, yy * s}; }

    double trace(int dim) const { return dim == 1 ? xx : xx + yy; }
    double min_eigenvalue(int dim) const {
        if (dim == 1) return xx;
        const double m = 0.5 * (xx + yy);
        const double d = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
        return m - d;
    }
    static SymMat identity(int dim, double s = 1.0) {
        return dim == 1 ? SymMat{s, 0, 0} : SymMat{s, 0, s};
    }
};

enum class TriState { Pass, Fail, Unknown };

inline const char* to_string(TriState t) {
    switch (t) {
        case TriState::Pass: return "pass";
        case TriState::Fail: return "fail";
        default: return "unknown";
    }
}

/// Invalid problem setup detected while parsing or validating inputs.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature resolution incompatible with the grid.
struct quadrature_error : config_error {
    using config_error::config_error;
};

/// Failure of a numerical procedure on an otherwise valid problem.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic pairwise reduction; independent of how values were produced.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size());
}

}  // namespace waldenfels
