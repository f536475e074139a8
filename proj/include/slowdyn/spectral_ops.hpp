#pragma once

/// Spectral building blocks on the doubly periodic box.
///
/// Transform normalization, fixed everywhere in this project: coefficients
/// are trigonometric-polynomial amplitudes,
///     f(x,y) = sum_{m,n} c(m,n) e^{2*pi*i*(m x + n y)/L},
///     c(m,n) = (1/(nx*ny)) sum_{i,j} f(x_i,y_j) e^{-2*pi*i*(m i/nx + n j/ny)}.
/// Under this convention Parseval reads
///     (1/(nx*ny)) sum |f(x_i,y_j)|^2 = sum |c(m,n)|^2,
/// and the L^2(T^2) norm is ||f|| = L * sqrt(sum |c|^2).
///
/// Derivative operators zero the Nyquist lines (m = -nx/2 or n = -ny/2):
/// those modes carry no sign information for odd derivatives. The even-order
/// Laplacian and its inverse keep them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "slowdyn/errors.hpp"
#include "slowdyn/fft.hpp"
#include "slowdyn/field.hpp"
#include "slowdyn/grid.hpp"

namespace slowdyn {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Forward transform of a real collocation field into amplitude-normalized
/// spectral coefficients.
inline SpectralField2D to_spectral(const RealField2D& f) {
    const int nx = f.nx(), ny = f.ny();
    std::vector<cplx> in(f.size());
    for (size_t i = 0; i < in.size(); ++i) in[i] = cplx{f.values()[i], 0.0};
    SpectralField2D out(nx, ny, f.L());
    detail::fft2_forward(nx, ny, in.data(), out.coeffs().data());
    const double scale = 1.0 / (static_cast<double>(nx) * ny);
    for (cplx& z : out.coeffs()) z *= scale;
    return out;
}

/// Complex collocation values of a spectral field (needed for the genuinely
/// complex vertical density modes). No normalization: the coefficients are
/// already amplitudes.
inline std::vector<cplx> to_physical_complex(const SpectralField2D& f) {
    std::vector<cplx> out(f.size());
    detail::fft2_backward(f.nx(), f.ny(), f.coeffs().data(), out.data());
    return out;
}

/// Inverse transform of a Hermitian-symmetric field; imaginary round-off is
/// discarded.
inline RealField2D to_real(const SpectralField2D& f) {
    std::vector<cplx> tmp = to_physical_complex(f);
    RealField2D out(f.nx(), f.ny(), f.L());
    for (size_t i = 0; i < tmp.size(); ++i) out.values()[i] = tmp[i].real();
    return out;
}

/// Forward transform of complex collocation values.
inline SpectralField2D spectral_of_physical(const std::vector<cplx>& vals, int nx, int ny, double L) {
    SpectralField2D out(nx, ny, L);
    detail::fft2_forward(nx, ny, vals.data(), out.coeffs().data());
    const double scale = 1.0 / (static_cast<double>(nx) * ny);
    for (cplx& z : out.coeffs()) z *= scale;
    return out;
}

/// Horizontal gradient (d/dx f, d/dy f); Nyquist lines are zeroed in both
/// components.
inline VectorField2D gradient_h(const SpectralField2D& f) {
    const int nx = f.nx(), ny = f.ny();
    const double k0 = two_pi / f.L();
    VectorField2D g{SpectralField2D(nx, ny, f.L()), SpectralField2D(nx, ny, f.L())};
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            if (is_nyquist(m, n, nx, ny)) continue;
            const cplx c = f(i, j);
            g.u(i, j) = cplx{0.0, k0 * m} * c;
            g.v(i, j) = cplx{0.0, k0 * n} * c;
        }
    }
    return g;
}

/// Horizontal Laplacian, multiplication by -|k_h|^2 (Nyquist modes included).
inline SpectralField2D laplacian_h(const SpectralField2D& f) {
    const int nx = f.nx(), ny = f.ny();
    const double k0sq = (two_pi / f.L()) * (two_pi / f.L());
    SpectralField2D out(nx, ny, f.L());
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            out(i, j) = -k0sq * static_cast<double>(m) * m * f(i, j) - k0sq * static_cast<double>(n) * n * f(i, j);
        }
    }
    return out;
}

/// Solve lap_h g = f for a mean-zero source: divide each mode by -|k_h|^2 and
/// leave the mean at zero. laplacian_h(invert_laplacian_h(f)) == f exactly.
inline SpectralField2D invert_laplacian_h(const SpectralField2D& f) {
    if (std::abs(f.mean()) > 1e-10)
        throw PreconditionError("invert_laplacian_h: source must have zero mean");
    const int nx = f.nx(), ny = f.ny();
    const double k0sq = (two_pi / f.L()) * (two_pi / f.L());
    SpectralField2D out(nx, ny, f.L());
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            if (m == 0 && n == 0) continue;
            out(i, j) = f(i, j) / (-k0sq * (static_cast<double>(m) * m + static_cast<double>(n) * n));
        }
    }
    return out;
}

/// Velocity from vorticity on the periodic box: u_h = grad_h^perp psi with
/// psi the streamfunction, grad_h^perp = (-d/dy, d/dx) and
/// omega = dv/dx - du/dy = lap_h psi. The result has zero mean, is
/// divergence-free mode by mode, and curl(u_h) reproduces every non-Nyquist
/// mode of omega.
inline VectorField2D biot_savart(const SpectralField2D& omega) {
    if (std::abs(omega.mean()) > 1e-10)
        throw PreconditionError("biot_savart: vorticity must have zero mean");
    const SpectralField2D psi = invert_laplacian_h(omega);
    VectorField2D g = gradient_h(psi);
    VectorField2D u;
    u.u = std::move(g.v); // -psi_y
    u.u *= -1.0;
    u.v = std::move(g.u); //  psi_x
    return u;
}

/// Zero every mode outside the 2/3 dealiasing band.
inline SpectralField2D dealias_truncate(const SpectralField2D& f) {
    const int nx = f.nx(), ny = f.ny();
    SpectralField2D out(nx, ny, f.L());
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            if (in_dealias_band(m, n, nx, ny)) out(i, j) = f(i, j);
        }
    }
    return out;
}

/// Pointwise product with 2/3-rule dealiasing: truncate both factors,
/// multiply at the collocation points, transform back, truncate again.
/// Exact (alias-free) on the retained band for band-limited factors.
/// Bilinear and symmetric in its arguments.
inline SpectralField2D dealiased_product(const SpectralField2D& f, const SpectralField2D& g) {
    if (!f.same_grid(g)) throw ConfigError("dealiased_product: grid mismatch");
    const std::vector<cplx> pf = to_physical_complex(dealias_truncate(f));
    const std::vector<cplx> pg = to_physical_complex(dealias_truncate(g));
    std::vector<cplx> prod(pf.size());
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = pf[i] * pg[i];
    return dealias_truncate(spectral_of_physical(prod, f.nx(), f.ny(), f.L()));
}

/// ||grad xi||^2 over the 3D torus for xi = (-lap)^{-1} rho, evaluated by the
/// spectral sum L^3 * sum |rho_k(m,n)|^2 / |K|^2 with
/// |K|^2 = (2 pi / L)^2 (m^2 + n^2 + k^2). Vertical modes k = 1..kz_max carry
/// a factor 2 for their implied Hermitian partners; the (0,0,0) mode must
/// vanish and is excluded.
inline double invert_laplacian_3d_gradient(const VerticalModeStack& rho) {
    if (rho.kz_max() < 0) return 0.0;
    if (std::abs(rho.mode(0).mean()) > 1e-10)
        throw PreconditionError("invert_laplacian_3d_gradient: stack must have zero total mean");
    const SpectralField2D& r0 = rho.mode(0);
    const int nx = r0.nx(), ny = r0.ny();
    const double L = r0.L();
    const double k0sq = (two_pi / L) * (two_pi / L);
    double sum = 0.0;
    for (int k = 0; k <= rho.kz_max(); ++k) {
        const double mult = (k == 0) ? 1.0 : 2.0;
        const SpectralField2D& rk = rho.mode(k);
        for (int i = 0; i < nx; ++i) {
            const int m = mode_from_index(i, nx);
            for (int j = 0; j < ny; ++j) {
                const int n = mode_from_index(j, ny);
                if (k == 0 && m == 0 && n == 0) continue;
                const double kk = static_cast<double>(m) * m + static_cast<double>(n) * n + static_cast<double>(k) * k;
                sum += mult * std::norm(rk(i, j)) / (k0sq * kk);
            }
        }
    }
    return L * L * L * sum;
}

/// The vertical average <rho>_z is exactly the k = 0 mode.
inline SpectralField2D z_average(const VerticalModeStack& rho) { return rho.mode(0); }

/// Density slice at height z in [0, L):
///     rho(x,y,z) = rho_0(x,y) + sum_{k>=1} 2 Re( rho_k(x,y) e^{2*pi*i*k*z/L} ).
inline RealField2D reconstruct_vertical(const VerticalModeStack& rho, double z) {
    const double L = rho.L();
    if (!(z >= 0.0 && z < L)) throw std::domain_error("reconstruct_vertical: z outside [0, L)");
    const SpectralField2D& r0 = rho.mode(0);
    RealField2D out(r0.nx(), r0.ny(), L);
    {
        const std::vector<cplx> p0 = to_physical_complex(r0);
        for (size_t i = 0; i < p0.size(); ++i) out.values()[i] = p0[i].real();
    }
    for (int k = 1; k <= rho.kz_max(); ++k) {
        const double theta = two_pi * k * z / L;
        const cplx phase{std::cos(theta), std::sin(theta)};
        const std::vector<cplx> pk = to_physical_complex(rho.mode(k));
        for (size_t i = 0; i < pk.size(); ++i)
            out.values()[i] += 2.0 * (pk[i] * phase).real();
    }
    return out;
}

// --- Parseval norms and inner products -------------------------------------

/// ||f||_{L^2(T^2)} = L * sqrt(sum |c|^2), exact under the normalization above.
inline double l2_norm(const SpectralField2D& f) {
    double s = 0.0;
    for (const cplx& z : f.coeffs()) s += std::norm(z);
    return f.L() * std::sqrt(s);
}

/// L^2(T^2) inner product <f, g> = L^2 * Re sum conj(c_f) c_g.
inline double inner_l2(const SpectralField2D& f, const SpectralField2D& g) {
    if (!f.same_grid(g)) throw PreconditionError("inner_l2: grid mismatch");
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i)
        s += (std::conj(f.coeffs()[i]) * g.coeffs()[i]).real();
    return f.L() * f.L() * s;
}

/// Squared H^1 seminorm ||grad_h f||^2_{L^2} = L^2 * sum |k_h|^2 |c|^2
/// (Nyquist lines excluded, consistent with gradient_h).
inline double h1_seminorm_sq(const SpectralField2D& f) {
    const int nx = f.nx(), ny = f.ny();
    const double k0sq = (two_pi / f.L()) * (two_pi / f.L());
    double s = 0.0;
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            if (is_nyquist(m, n, nx, ny)) continue;
            s += k0sq * (static_cast<double>(m) * m + static_cast<double>(n) * n) * std::norm(f(i, j));
        }
    }
    return f.L() * f.L() * s;
}

} // namespace slowdyn
