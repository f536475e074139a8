#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "slowdyn/errors.hpp"
#include "slowdyn/grid.hpp"

namespace slowdyn {

using cplx = std::complex<double>;

/// A real scalar sampled at the collocation points of a GridSpec,
/// row-major with x as the slow index: values[i*ny + j] = f(x_i, y_j).
class RealField2D {
public:
    RealField2D() = default;
    RealField2D(int nx, int ny, double L) : nx_(nx), ny_(ny), L_(L), v_(static_cast<size_t>(nx) * ny, 0.0) {}

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double L() const { return L_; }
    size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * ny_ + j]; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * ny_ + j]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool all_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int nx_ = 0, ny_ = 0;
    double L_ = 0.0;
    std::vector<double> v_;
};

/// Complex Fourier coefficients of a doubly periodic scalar, stored in wrapped
/// (FFT) order: coefficient of e^{2*pi*i*(m x + n y)/L} lives at
/// [index_from_mode(m,nx)*ny + index_from_mode(n,ny)].
///
/// Coefficients are trigonometric-polynomial amplitudes:
///     f(x,y) = sum_{m,n} c(m,n) e^{2*pi*i*(m x + n y)/L},
/// so a constant field c has c(0,0) = c and cos(2*pi*x/L) has c(+-1,0) = 1/2.
/// Fields representing real scalars satisfy c(-m,-n) = conj(c(m,n)); the
/// vertical density modes with k != 0 are genuinely complex and do not.
class SpectralField2D {
public:
    SpectralField2D() = default;
    SpectralField2D(int nx, int ny, double L) : nx_(nx), ny_(ny), L_(L), c_(static_cast<size_t>(nx) * ny, cplx{0.0, 0.0}) {}

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double L() const { return L_; }
    size_t size() const { return c_.size(); }

    bool same_grid(const SpectralField2D& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && L_ == o.L_;
    }

    /// Access by signed integer wavenumber, m in [-nx/2, nx/2), n in [-ny/2, ny/2).
    cplx& at_mode(int m, int n) { return c_[static_cast<size_t>(index_from_mode(m, nx_)) * ny_ + index_from_mode(n, ny_)]; }
    cplx at_mode(int m, int n) const { return c_[static_cast<size_t>(index_from_mode(m, nx_)) * ny_ + index_from_mode(n, ny_)]; }

    /// Raw access in storage (wrapped) order.
    cplx& operator()(int i, int j) { return c_[static_cast<size_t>(i) * ny_ + j]; }
    cplx operator()(int i, int j) const { return c_[static_cast<size_t>(i) * ny_ + j]; }

    std::vector<cplx>& coeffs() { return c_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx mean() const { return c_.empty() ? cplx{0.0, 0.0} : c_[0]; }

    bool all_finite() const {
        for (const cplx& z : c_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : c_) m = std::max(m, std::abs(z));
        return m;
    }

    /// Largest deviation from Hermitian symmetry c(-m,-n) = conj(c(m,n)).
    double hermitian_defect() const {
        double d = 0.0;
        for (int i = 0; i < nx_; ++i) {
            const int im = index_from_mode(-mode_from_index(i, nx_), nx_);
            for (int j = 0; j < ny_; ++j) {
                const int jm = index_from_mode(-mode_from_index(j, ny_), ny_);
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(im, jm))));
            }
        }
        return d;
    }

    SpectralField2D& operator+=(const SpectralField2D& o) {
        check_same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    SpectralField2D& operator-=(const SpectralField2D& o) {
        check_same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    SpectralField2D& operator*=(double a) {
        for (cplx& z : c_) z *= a;
        return *this;
    }
    /// this += a * o, the workhorse of the time stepper.
    SpectralField2D& axpy(double a, const SpectralField2D& o) {
        check_same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += a * o.c_[i];
        return *this;
    }

private:
    void check_same(const SpectralField2D& o) const {
        if (!same_grid(o)) throw PreconditionError("spectral field grid mismatch");
    }

    int nx_ = 0, ny_ = 0;
    double L_ = 0.0;
    std::vector<cplx> c_;
};

inline SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
inline SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
inline SpectralField2D operator*(double s, SpectralField2D a) { return a *= s; }

/// The two components of a horizontal vector field in spectral form.
struct VectorField2D {
    SpectralField2D u; ///< x component
    SpectralField2D v; ///< y component
};

/// Ordered vertical Fourier modes of the density fluctuation: mode(0) is the
/// z-average <rho>_z (Hermitian, real-valued), mode(k) for k = 1..kz_max the
/// coefficient of e^{2*pi*i*k*z/L}. Negative modes are implied by
/// rho_{-k} = conj(rho_k) and never stored.
class VerticalModeStack {
public:
    VerticalModeStack() = default;
    VerticalModeStack(int kz_max, int nx, int ny, double L) {
        modes_.reserve(static_cast<size_t>(kz_max) + 1);
        for (int k = 0; k <= kz_max; ++k) modes_.emplace_back(nx, ny, L);
    }

    int kz_max() const { return static_cast<int>(modes_.size()) - 1; }
    double L() const { return modes_.empty() ? 0.0 : modes_[0].L(); }

    SpectralField2D& mode(int k) { return modes_[static_cast<size_t>(k)]; }
    const SpectralField2D& mode(int k) const { return modes_[static_cast<size_t>(k)]; }

    bool same_shape(const VerticalModeStack& o) const {
        return kz_max() == o.kz_max() && (modes_.empty() || modes_[0].same_grid(o.modes_[0]));
    }

    bool all_finite() const {
        for (const auto& m : modes_)
            if (!m.all_finite()) return false;
        return true;
    }

    VerticalModeStack& axpy(double a, const VerticalModeStack& o) {
        if (!same_shape(o)) throw PreconditionError("vertical mode stack shape mismatch");
        for (size_t k = 0; k < modes_.size(); ++k) modes_[k].axpy(a, o.modes_[k]);
        return *this;
    }
    VerticalModeStack& operator-=(const VerticalModeStack& o) {
        if (!same_shape(o)) throw PreconditionError("vertical mode stack shape mismatch");
        for (size_t k = 0; k < modes_.size(); ++k) modes_[k] -= o.modes_[k];
        return *this;
    }

private:
    std::vector<SpectralField2D> modes_;
};

} // namespace slowdyn
