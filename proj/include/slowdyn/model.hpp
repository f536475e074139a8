#pragma once

/// State and right-hand side of the inviscid slow-dynamics system in
/// vorticity form, evolved fully in spectral space:
///
///   d(omega)/dt + u_h . grad_h omega            = 0
///   d(w)/dt     + u_h . grad_h w                = -(1/Fr) rho_0
///   d(rho_0)/dt + u_h . grad_h rho_0            = +(1/Fr) w
///   d(rho_k)/dt + u_h . grad_h rho_k
///               + i (2 pi k / L) w rho_k        = 0,            k = 1..kz_max
///
/// with u_h recovered from omega by the periodic Biot-Savart law. The vertical
/// mode coupling uses the physical wavenumber 2*pi*k/L of e^{2*pi*i*k*z/L};
/// with L = 2*pi this reduces to the bare integer k. Optional viscous terms
/// add (1/Re) lap_h to the velocity equations and (1/(Re*Pr)) applied to the
/// full 3D Laplacian (lap_h - (2*pi*k/L)^2) to the density modes.
///
/// Advection is evaluated in convective form with 2/3-dealiased products; for
/// divergence-free u_h this keeps the quadratic invariants of the
/// semi-discrete system exact. The mean of every advection term vanishes
/// identically for divergence-free transport and is set to exactly zero, so
/// the (0,0) modes of w and rho_0 obey the decoupled rotation
///   d(mean_w)/dt = -(1/Fr) mean_rho0,  d(mean_rho0)/dt = +(1/Fr) mean_w
/// to machine precision and the mean of omega stays identically zero.

#include <cmath>
#include <string>
#include <vector>

#include "slowdyn/errors.hpp"
#include "slowdyn/field.hpp"
#include "slowdyn/spectral_ops.hpp"

namespace slowdyn {

/// Model constants. Fr is the Froude number; 1/Fr is the angular frequency of
/// the w / rho_0 oscillation. Re and Pr are used only when viscous is set.
struct PhysicalParams {
    double L = 1.0;
    double Fr = 1.0;
    bool viscous = false;
    double Re = 0.0;
    double Pr = 0.0;

    void validate() const {
        if (!(L > 0.0)) throw ConfigError("L must be positive");
        if (!(Fr > 0.0)) throw ConfigError("Fr must be positive");
        if (viscous && !(Re > 0.0)) throw ConfigError("Re must be positive when viscous");
        if (viscous && !(Pr > 0.0)) throw ConfigError("Pr must be positive when viscous");
    }
};

/// Full dynamical state: time stamp, vorticity, vertical velocity, and the
/// vertical density mode stack (rho_0 = <rho>_z at index 0).
struct ModelState {
    double t = 0.0;
    SpectralField2D omega;
    SpectralField2D w;
    VerticalModeStack rho;

    int kz_max() const { return rho.kz_max(); }

    bool all_finite() const {
        return std::isfinite(t) && omega.all_finite() && w.all_finite() && rho.all_finite();
    }

    void validate() const {
        if (!omega.same_grid(w) || !w.same_grid(rho.mode(0)))
            throw PreconditionError("model state: fields live on different grids");
        if (std::abs(omega.mean()) > 1e-10)
            throw PreconditionError("model state: vorticity must have zero mean");
        if (!all_finite()) throw BlowupError("model state contains non-finite values", t);
    }
};

/// Time derivative of every evolved field; same shapes as ModelState.
struct StateTendency {
    SpectralField2D omega;
    SpectralField2D w;
    VerticalModeStack rho;
};

/// state + a * tendency (the RK4 stage update). Time is advanced by dt_frac.
inline ModelState state_axpy(const ModelState& s, double a, const StateTendency& k, double dt_frac) {
    ModelState out = s;
    out.t = s.t + dt_frac;
    out.omega.axpy(a, k.omega);
    out.w.axpy(a, k.w);
    out.rho.axpy(a, k.rho);
    return out;
}

/// Horizontal velocity of a state via the Biot-Savart law.
inline VectorField2D velocity(const ModelState& state) { return biot_savart(state.omega); }

namespace detail {

// Dealiased convective advection u . grad_h f for a velocity already
// truncated and moved to the collocation grid. The mean of the result is
// identically zero for divergence-free u and is forced to exact zero.
inline SpectralField2D advect(const std::vector<cplx>& pu, const std::vector<cplx>& pv,
                              const SpectralField2D& f) {
    const VectorField2D grad = gradient_h(f);
    const std::vector<cplx> pfx = to_physical_complex(dealias_truncate(grad.u));
    const std::vector<cplx> pfy = to_physical_complex(dealias_truncate(grad.v));
    std::vector<cplx> q(pfx.size());
    for (size_t i = 0; i < q.size(); ++i) q[i] = pu[i] * pfx[i] + pv[i] * pfy[i];
    SpectralField2D out = dealias_truncate(spectral_of_physical(q, f.nx(), f.ny(), f.L()));
    out.coeffs()[0] = cplx{0.0, 0.0};
    return out;
}

} // namespace detail

/// Right-hand side of the system for a given state. Pure function of the
/// fields (time-translation invariant); the per-mode rho_k contributions are
/// mutually independent and written to disjoint slots.
inline StateTendency tendency(const ModelState& state, const PhysicalParams& params) {
    params.validate();
    state.validate();
    const double L = state.omega.L();
    const double inv_fr = 1.0 / params.Fr;

    const VectorField2D u = velocity(state);
    const std::vector<cplx> pu = to_physical_complex(dealias_truncate(u.u));
    const std::vector<cplx> pv = to_physical_complex(dealias_truncate(u.v));

    StateTendency dot;
    dot.omega = detail::advect(pu, pv, state.omega);
    dot.omega *= -1.0;

    dot.w = detail::advect(pu, pv, state.w);
    dot.w *= -1.0;
    dot.w.axpy(-inv_fr, state.rho.mode(0));

    dot.rho = VerticalModeStack(state.kz_max(), state.omega.nx(), state.omega.ny(), L);
    {
        SpectralField2D adv = detail::advect(pu, pv, state.rho.mode(0));
        adv *= -1.0;
        adv.axpy(inv_fr, state.w);
        dot.rho.mode(0) = std::move(adv);
    }

    const std::vector<cplx> pw = state.kz_max() >= 1
                                     ? to_physical_complex(dealias_truncate(state.w))
                                     : std::vector<cplx>{};
    for (int k = 1; k <= state.kz_max(); ++k) {
        const SpectralField2D& rk = state.rho.mode(k);
        SpectralField2D adv = detail::advect(pu, pv, rk);

        // i (2 pi k / L) * dealiased(w * rho_k), the vertical phase rotation
        const std::vector<cplx> prk = to_physical_complex(dealias_truncate(rk));
        std::vector<cplx> q(prk.size());
        for (size_t i = 0; i < q.size(); ++i) q[i] = pw[i] * prk[i];
        SpectralField2D wrk = dealias_truncate(spectral_of_physical(q, rk.nx(), rk.ny(), L));

        const cplx ik{0.0, two_pi * k / L};
        SpectralField2D& out = dot.rho.mode(k);
        for (size_t i = 0; i < out.size(); ++i)
            out.coeffs()[i] = -adv.coeffs()[i] - ik * wrk.coeffs()[i];
    }

    if (params.viscous) {
        const double nu = 1.0 / params.Re;
        const double kappa = 1.0 / (params.Re * params.Pr);
        dot.omega.axpy(nu, laplacian_h(state.omega));
        dot.w.axpy(nu, laplacian_h(state.w));
        for (int k = 0; k <= state.kz_max(); ++k) {
            const SpectralField2D& rk = state.rho.mode(k);
            SpectralField2D diff = laplacian_h(rk);
            const double kz = two_pi * k / L;
            diff.axpy(-kz * kz, rk);
            dot.rho.mode(k).axpy(kappa, diff);
        }
    }

    if (!dot.omega.all_finite() || !dot.w.all_finite() || !dot.rho.all_finite())
        throw BlowupError("non-finite tendency", state.t);
    return dot;
}

} // namespace slowdyn
