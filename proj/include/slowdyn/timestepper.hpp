#pragma once

/// Explicit time integration: classical RK4 with an advective CFL step bound.
/// The CFL velocity scale is max(||u_h||_inf, L/Fr): the second term keeps the
/// step small enough to resolve the 1/Fr oscillation of (w, rho_0) even when
/// the flow is quiescent. Fixed-order stepping keeps runs deterministic and
/// convergence studies clean; dt is recomputed from the current state every
/// step unless dt_override pins it.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slowdyn/errors.hpp"
#include "slowdyn/model.hpp"

namespace slowdyn {

/// Run-length and cadence parameters.
struct RunConfig {
    double t_end = 1.0;
    double cfl = 0.5;
    std::optional<double> dt_override;
    int diag_every = 10;                 ///< steps between diagnostic emissions
    std::optional<int> snapshot_every;   ///< steps between snapshot emissions

    void validate() const {
        if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
        if (dt_override && !(*dt_override > 0.0)) throw ConfigError("dt_override must be positive");
        if (diag_every < 1) throw ConfigError("diag_every must be a positive integer");
        if (snapshot_every && *snapshot_every < 1) throw ConfigError("snapshot_every must be a positive integer");
    }
};

/// Advective CFL bound: dt = cfl * min(L/nx, L/ny) / max(||u_h||_inf, L/Fr).
/// ||u_h||_inf is the largest velocity magnitude over the collocation grid.
inline double cfl_dt(const ModelState& state, const PhysicalParams& params, double cfl) {
    const VectorField2D uv = velocity(state);
    const RealField2D pu = to_real(uv.u);
    const RealField2D pv = to_real(uv.v);
    double umax = 0.0;
    for (size_t i = 0; i < pu.size(); ++i)
        umax = std::max(umax, std::hypot(pu.values()[i], pv.values()[i]));
    const double L = state.omega.L();
    const double h = std::min(L / state.omega.nx(), L / state.omega.ny());
    const double vel = std::max(umax, params.L / params.Fr);
    return cfl * h / vel;
}

/// One classical four-stage Runge-Kutta step of size dt.
inline ModelState rk4_step(const ModelState& state, double dt, const PhysicalParams& params) {
    if (!(dt > 0.0)) throw PreconditionError("rk4_step: dt must be positive");
    const StateTendency k1 = tendency(state, params);
    const StateTendency k2 = tendency(state_axpy(state, 0.5 * dt, k1, 0.5 * dt), params);
    const StateTendency k3 = tendency(state_axpy(state, 0.5 * dt, k2, 0.5 * dt), params);
    const StateTendency k4 = tendency(state_axpy(state, dt, k3, dt), params);

    ModelState out = state;
    out.t = state.t + dt;
    const double c = dt / 6.0;
    out.omega.axpy(c, k1.omega);
    out.omega.axpy(2.0 * c, k2.omega);
    out.omega.axpy(2.0 * c, k3.omega);
    out.omega.axpy(c, k4.omega);
    out.w.axpy(c, k1.w);
    out.w.axpy(2.0 * c, k2.w);
    out.w.axpy(2.0 * c, k3.w);
    out.w.axpy(c, k4.w);
    out.rho.axpy(c, k1.rho);
    out.rho.axpy(2.0 * c, k2.rho);
    out.rho.axpy(2.0 * c, k3.rho);
    out.rho.axpy(c, k4.rho);

    if (!out.all_finite()) throw BlowupError("non-finite state after RK4 step", out.t);
    return out;
}

/// Consumers of integration output. on_diagnostic fires at t = 0, every
/// diag_every steps, and at t_end; on_snapshot every snapshot_every steps.
/// Either callback may be empty. Both are invoked synchronously.
struct IntegrationSink {
    std::function<void(const ModelState&, long)> on_diagnostic;
    std::function<void(const ModelState&, long)> on_snapshot;
};

/// Step from the initial state to t_end. Deterministic: identical inputs
/// produce identical outputs bit for bit.
inline ModelState integrate(const ModelState& initial, const PhysicalParams& params,
                            const RunConfig& run, const IntegrationSink& sink = {}) {
    params.validate();
    run.validate();
    ModelState state = initial;
    state.validate();

    if (sink.on_diagnostic) sink.on_diagnostic(state, 0);
    const double t_end = run.t_end;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    long step = 0;
    while (state.t < t_end - eps) {
        double dt = run.dt_override ? *run.dt_override : cfl_dt(state, params, run.cfl);
        dt = std::min(dt, t_end - state.t);
        state = rk4_step(state, dt, params);
        ++step;
        const bool last = state.t >= t_end - eps;
        if (sink.on_diagnostic && (last || step % run.diag_every == 0))
            sink.on_diagnostic(state, step);
        if (sink.on_snapshot && run.snapshot_every && step % *run.snapshot_every == 0)
            sink.on_snapshot(state, step);
    }
    return state;
}

/// Measured convergence order of RK4 against the exact linear oscillator
/// w(t) = A cos(t/Fr), rho_0(t) = A sin(t/Fr) (quiescent velocity): the
/// least-squares slope of log(error) against log(dt).
inline double oscillator_convergence_order(const PhysicalParams& params,
                                           std::span<const double> dts, double t_end,
                                           std::vector<double>* errors_out = nullptr) {
    const int n = 8;
    const double amp = 1.0;
    std::vector<double> errs;
    for (double dt : dts) {
        ModelState s;
        s.omega = SpectralField2D(n, n, params.L);
        s.w = SpectralField2D(n, n, params.L);
        s.rho = VerticalModeStack(0, n, n, params.L);
        s.w.at_mode(0, 0) = amp;
        RunConfig rc;
        rc.t_end = t_end;
        rc.dt_override = dt;
        const ModelState f = integrate(s, params, rc);
        const double phase = t_end / params.Fr;
        const cplx w_err = f.w.at_mode(0, 0) - cplx{amp * std::cos(phase), 0.0};
        const cplx r_err = f.rho.mode(0).at_mode(0, 0) - cplx{amp * std::sin(phase), 0.0};
        errs.push_back(std::sqrt(std::norm(w_err) + std::norm(r_err)));
    }
    if (errors_out) *errors_out = errs;
    // least-squares slope of log(err) vs log(dt)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(errs.size());
    for (size_t i = 0; i < errs.size(); ++i) {
        const double x = std::log(dts[i]);
        const double y = std::log(std::max(errs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace slowdyn
