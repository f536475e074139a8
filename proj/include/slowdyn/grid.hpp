#pragma once

#include <cmath>
#include <cstdlib>

#include "slowdyn/errors.hpp"

namespace slowdyn {

/// Discretization of the doubly periodic box [0,L)^2 with a truncated vertical
/// Fourier expansion. Collocation points are x_i = i L/nx, y_j = j L/ny.
/// nz is used only when reconstructing three-dimensional fields on z-levels.
struct GridSpec {
    int nx = 0;       ///< horizontal points in x; even, >= 8
    int ny = 0;       ///< horizontal points in y; even, >= 8
    double L = 1.0;   ///< box period, same in every direction
    int kz_max = 0;   ///< vertical mode truncation (modes 0..kz_max retained)
    int nz = 1;       ///< z collocation levels for reconstruction; >= 2*kz_max+1

    void validate() const {
        if (nx < 8 || nx % 2 != 0) throw ConfigError("nx must be even and >= 8");
        if (ny < 8 || ny % 2 != 0) throw ConfigError("ny must be even and >= 8");
        if (!(L > 0.0)) throw ConfigError("L must be positive");
        if (kz_max < 0) throw ConfigError("kz_max must be nonnegative");
        if (nz < 2 * kz_max + 1) throw ConfigError("nz must be >= 2*kz_max + 1");
    }
};

/// Signed integer wavenumber of storage row/column i on an n-point grid,
/// in [-n/2, n/2). Index 0 is the mean, index n/2 the Nyquist mode.
constexpr int mode_from_index(int i, int n) { return (i < n / 2) ? i : i - n; }

/// Inverse of mode_from_index.
constexpr int index_from_mode(int m, int n) { return (m >= 0) ? m : m + n; }

/// True when (m, n) lies on a Nyquist line; these modes have no conjugate
/// partner and are annihilated by the odd-derivative operators.
constexpr bool is_nyquist(int m, int n, int nx, int ny) {
    return m == -nx / 2 || n == -ny / 2;
}

/// Retention test of the 2/3 dealiasing rule: modes with 3|m| > nx or
/// 3|n| > ny are zeroed before and after pointwise products.
constexpr bool in_dealias_band(int m, int n, int nx, int ny) {
    return 3 * std::abs(m) <= nx && 3 * std::abs(n) <= ny;
}

} // namespace slowdyn
