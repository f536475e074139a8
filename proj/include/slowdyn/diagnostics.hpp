#pragma once

/// Norm ledger and runtime verification of the model's conservation laws and
/// growth estimates.
///
/// Conventions: L^2 quantities come from Parseval sums and are exact for the
/// discrete fields. L^p (finite p) and L^inf quantities are collocation
/// quadratures and maxima of the spectrally reconstructed fields, i.e. lower
/// bounds on the true sup-norms; they enter the checked inequalities on the
/// left and inside growth exponents on the right, so those checks are tight
/// in practice on smooth, well-resolved data rather than rigorous for rough
/// ones. Time integrals in the growth exponents use the trapezoid rule over
/// the recorded diagnostic samples.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slowdyn/errors.hpp"
#include "slowdyn/grid.hpp"
#include "slowdyn/model.hpp"
#include "slowdyn/spectral_ops.hpp"
#include "slowdyn/timestepper.hpp"

namespace slowdyn {

/// Per-time-sample norms consumed by the bound checks and the CSV writer.
/// h1_* are squared H^1 seminorms; w1inf_* are grid maxima of |grad_h .|.
struct DiagnosticsRecord {
    double t = 0.0;
    double l2_w = 0.0;
    double l2_rho0 = 0.0;
    double linf_w = 0.0;
    double linf_rho0 = 0.0;
    double h1_w = 0.0;
    double h1_rho0 = 0.0;
    double w1inf_w = 0.0;
    double w1inf_rho0 = 0.0;
    double l2_rho_3d = 0.0;
    double linf_rho_3d = 0.0;
    double lp_omega_2 = 0.0;
    double lp_omega_4 = 0.0;
    double lp_omega_8 = 0.0;
    double lp_omega_inf = 0.0;
    double linf_grad_u = 0.0;
    double mean_w = 0.0;
    double mean_rho0 = 0.0;

    static const std::vector<std::string>& field_names() {
        static const std::vector<std::string> names = {
            "t", "l2_w", "l2_rho0", "linf_w", "linf_rho0", "h1_w", "h1_rho0",
            "w1inf_w", "w1inf_rho0", "l2_rho_3d", "linf_rho_3d",
            "lp_omega_2", "lp_omega_4", "lp_omega_8", "lp_omega_inf",
            "linf_grad_u", "mean_w", "mean_rho0"};
        return names;
    }

    std::vector<double> field_values() const {
        return {t, l2_w, l2_rho0, linf_w, linf_rho0, h1_w, h1_rho0,
                w1inf_w, w1inf_rho0, l2_rho_3d, linf_rho_3d,
                lp_omega_2, lp_omega_4, lp_omega_8, lp_omega_inf,
                linf_grad_u, mean_w, mean_rho0};
    }
};

/// Per-vertical-mode L^q norms (k = 1..kz_max, q in {2, 4, inf}) at one time.
struct ModalNormsRecord {
    double t = 0.0;
    std::vector<double> l2;   ///< index k-1
    std::vector<double> l4;
    std::vector<double> linf;
};

namespace detail {

inline double grad_max_on_grid(const SpectralField2D& f) {
    const VectorField2D g = gradient_h(f);
    const RealField2D gx = to_real(g.u);
    const RealField2D gy = to_real(g.v);
    double m = 0.0;
    for (size_t i = 0; i < gx.size(); ++i)
        m = std::max(m, std::hypot(gx.values()[i], gy.values()[i]));
    return m;
}

inline double lp_collocation(const RealField2D& f, double p) {
    const double cell = (f.L() / f.nx()) * (f.L() / f.ny());
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(cell * s, 1.0 / p);
}

} // namespace detail

/// Evaluate every tracked norm of a state. Pure: equal states yield equal
/// records. grid supplies kz_max-consistent nz for the 3D reconstruction.
inline DiagnosticsRecord compute_record(const ModelState& state, const GridSpec& grid) {
    DiagnosticsRecord r;
    r.t = state.t;
    const SpectralField2D& rho0 = state.rho.mode(0);

    r.l2_w = l2_norm(state.w);
    r.l2_rho0 = l2_norm(rho0);
    r.h1_w = h1_seminorm_sq(state.w);
    r.h1_rho0 = h1_seminorm_sq(rho0);
    r.mean_w = state.w.mean().real();
    r.mean_rho0 = rho0.mean().real();

    r.linf_w = to_real(state.w).max_abs();
    r.linf_rho0 = to_real(rho0).max_abs();
    r.w1inf_w = detail::grad_max_on_grid(state.w);
    r.w1inf_rho0 = detail::grad_max_on_grid(rho0);

    // ||rho||_{L^2(T^3)} by Parseval over the stack (negative vertical modes
    // implied by Hermitian symmetry contribute the factor 2).
    {
        double s = 0.0;
        for (int k = 0; k <= state.kz_max(); ++k) {
            const double mult = (k == 0) ? 1.0 : 2.0;
            for (const cplx& z : state.rho.mode(k).coeffs()) s += mult * std::norm(z);
        }
        const double L = state.omega.L();
        r.l2_rho_3d = std::sqrt(L * L * L * s);
    }
    for (int iz = 0; iz < grid.nz; ++iz) {
        const double z = grid.L * iz / grid.nz;
        r.linf_rho_3d = std::max(r.linf_rho_3d, reconstruct_vertical(state.rho, z).max_abs());
    }

    const RealField2D omega_phys = to_real(state.omega);
    r.lp_omega_2 = l2_norm(state.omega);
    r.lp_omega_4 = detail::lp_collocation(omega_phys, 4.0);
    r.lp_omega_8 = detail::lp_collocation(omega_phys, 8.0);
    r.lp_omega_inf = omega_phys.max_abs();

    const VectorField2D u = velocity(state);
    const RealField2D ux = to_real(gradient_h(u.u).u);
    const RealField2D uy = to_real(gradient_h(u.u).v);
    const RealField2D vx = to_real(gradient_h(u.v).u);
    const RealField2D vy = to_real(gradient_h(u.v).v);
    for (size_t i = 0; i < ux.size(); ++i) {
        const double g2 = ux.values()[i] * ux.values()[i] + uy.values()[i] * uy.values()[i] +
                          vx.values()[i] * vx.values()[i] + vy.values()[i] * vy.values()[i];
        r.linf_grad_u = std::max(r.linf_grad_u, std::sqrt(g2));
    }
    return r;
}

/// Per-mode L^q norms of the k >= 1 density modes (collocation for q = 4, inf).
inline ModalNormsRecord compute_modal_norms(const ModelState& state) {
    ModalNormsRecord r;
    r.t = state.t;
    for (int k = 1; k <= state.kz_max(); ++k) {
        const SpectralField2D& rk = state.rho.mode(k);
        r.l2.push_back(l2_norm(rk));
        const std::vector<cplx> p = to_physical_complex(rk);
        const double cell = (rk.L() / rk.nx()) * (rk.L() / rk.ny());
        double s4 = 0.0, mx = 0.0;
        for (const cplx& z : p) {
            const double a = std::abs(z);
            s4 += a * a * a * a;
            mx = std::max(mx, a);
        }
        r.l4.push_back(std::pow(cell * s4, 0.25));
        r.linf.push_back(mx);
    }
    return r;
}

/// Tolerances for the bound checks. Equality-type bounds use relative drift;
/// inequality bounds accept margin >= -inequality_rel * scale. The collocation
/// L^4 / L^8 / L^inf vorticity norms carry discretization error of their own,
/// hence the graded per-norm drift allowances.
struct BoundCheckTolerances {
    double equality_rel = 1e-8;
    double inequality_rel = 1e-6;
    double omega_l4_rel = 1e-4;
    double omega_l8_rel = 1e-3;
    double omega_linf_rel = 1e-2;
    double modal_l2_rel = 1e-8;
    double modal_l4_rel = 1e-4;
    double modal_linf_rel = 1e-2;
    double mean_zero_abs = 1e-12;
    double mean_rotation_abs = 1e-10;
};

/// One checked inequality (or equality) at one record time.
struct BoundEntry {
    std::string name;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; ///< rhs - lhs
    bool satisfied = false;
};

/// Outcome of check_apriori_bounds: entries grouped per record time, in the
/// fixed order of bound_names, plus the constants of the growth estimates.
struct BoundReport {
    std::vector<std::string> bound_names;
    std::vector<std::vector<BoundEntry>> per_time;
    double K0 = 0.0;        ///< sqrt(L)/Fr * sqrt(l2_w^2 + l2_rho0^2) at t = 0
    double K0_tilde = 0.0;  ///< 2 * (w1inf_w + w1inf_rho0) at t = 0

    bool all_satisfied() const {
        for (const auto& row : per_time)
            for (const auto& e : row)
                if (!e.satisfied) return false;
        return true;
    }

    /// Smallest margin of the named bound over all times (0 if absent).
    double worst_margin(const std::string& name) const {
        double m = std::numeric_limits<double>::infinity();
        bool found = false;
        for (const auto& row : per_time)
            for (const auto& e : row)
                if (e.name == name) {
                    m = std::min(m, e.margin);
                    found = true;
                }
        return found ? m : 0.0;
    }
};

/// Evaluate the growth and conservation estimates against a recorded history:
///   oscillator energy equality, linear L^2 growth of rho, exponential
///   L^inf growth of w + rho_0, the H^1 and W^{1,inf} Gronwall envelopes,
///   the rho L^inf bound, per-p conservation of the vorticity norms, and a
///   Poincare consistency flag with the sharp discrete constant L/(2 pi)
///   applied to the mean-removed fields.
inline BoundReport check_apriori_bounds(std::span<const DiagnosticsRecord> history,
                                        const PhysicalParams& params,
                                        const BoundCheckTolerances& tol = {}) {
    if (history.empty()) throw PreconditionError("check_apriori_bounds: empty history");
    if (std::abs(history.front().t) > 1e-12)
        throw PreconditionError("check_apriori_bounds: history must start at t = 0");
    for (size_t i = 1; i < history.size(); ++i)
        if (!(history[i].t > history[i - 1].t))
            throw PreconditionError("check_apriori_bounds: history must be strictly time-ordered");

    const DiagnosticsRecord& r0 = history.front();
    const double L = params.L;
    const double fr = params.Fr;

    BoundReport report;
    report.bound_names = {
        "osc_energy_conservation", "rho_l2_linear_growth", "wrho0_linf_growth",
        "wrho0_h1_gronwall", "rho_linf_bound", "wrho0_w1inf_gronwall",
        "omega_l2_conservation", "omega_l4_conservation", "omega_l8_conservation",
        "omega_linf_conservation", "poincare_w", "poincare_rho0"};
    report.K0 = std::sqrt(L) / fr * std::sqrt(r0.l2_w * r0.l2_w + r0.l2_rho0 * r0.l2_rho0);
    report.K0_tilde = 2.0 * (r0.w1inf_w + r0.w1inf_rho0);

    const double osc0 = r0.l2_w * r0.l2_w + r0.l2_rho0 * r0.l2_rho0;
    const double linf0 = r0.linf_w + r0.linf_rho0;
    const double h10 = r0.h1_w + r0.h1_rho0;

    auto equality = [&](const std::string& name, double t, double lhs, double rhs, double rel) {
        BoundEntry e{name, t, lhs, rhs, rhs - lhs, false};
        e.satisfied = std::abs(lhs - rhs) <= rel * std::max(std::abs(rhs), 1e-300);
        return e;
    };
    auto inequality = [&](const std::string& name, double t, double lhs, double rhs) {
        BoundEntry e{name, t, lhs, rhs, rhs - lhs, false};
        const double scale = std::max(std::abs(rhs), std::abs(lhs));
        e.satisfied = e.margin >= -tol.inequality_rel * scale;
        return e;
    };

    double grad_u_integral = 0.0; // trapezoid of linf_grad_u over the history
    for (size_t i = 0; i < history.size(); ++i) {
        const DiagnosticsRecord& r = history[i];
        if (i > 0)
            grad_u_integral += 0.5 * (r.linf_grad_u + history[i - 1].linf_grad_u) * (r.t - history[i - 1].t);
        const double t = r.t;
        std::vector<BoundEntry> row;

        row.push_back(equality("osc_energy_conservation", t,
                               r.l2_w * r.l2_w + r.l2_rho0 * r.l2_rho0, osc0, tol.equality_rel));
        row.push_back(inequality("rho_l2_linear_growth", t, r.l2_rho_3d, r0.l2_rho_3d + report.K0 * t));
        row.push_back(inequality("wrho0_linf_growth", t, r.linf_w + r.linf_rho0, linf0 * std::exp(t / fr)));
        row.push_back(inequality("wrho0_h1_gronwall", t, r.h1_w + r.h1_rho0,
                                 h10 * std::exp(2.0 * grad_u_integral)));
        row.push_back(inequality("rho_linf_bound", t, r.linf_rho_3d,
                                 r0.linf_rho_3d + linf0 * std::exp(t / fr)));
        row.push_back(inequality("wrho0_w1inf_gronwall", t, r.w1inf_w + r.w1inf_rho0,
                                 report.K0_tilde * std::exp(grad_u_integral + t / fr)));
        row.push_back(equality("omega_l2_conservation", t, r.lp_omega_2, r0.lp_omega_2, tol.equality_rel));
        row.push_back(equality("omega_l4_conservation", t, r.lp_omega_4, r0.lp_omega_4, tol.omega_l4_rel));
        row.push_back(equality("omega_l8_conservation", t, r.lp_omega_8, r0.lp_omega_8, tol.omega_l8_rel));
        row.push_back(equality("omega_linf_conservation", t, r.lp_omega_inf, r0.lp_omega_inf, tol.omega_linf_rel));

        const double c_poincare = L / two_pi; // sharp for mean-zero fields
        const double l2w_osc = std::sqrt(std::max(0.0, r.l2_w * r.l2_w - L * L * r.mean_w * r.mean_w));
        const double l2r_osc = std::sqrt(std::max(0.0, r.l2_rho0 * r.l2_rho0 - L * L * r.mean_rho0 * r.mean_rho0));
        row.push_back(inequality("poincare_w", t, l2w_osc, c_poincare * std::sqrt(r.h1_w)));
        row.push_back(inequality("poincare_rho0", t, l2r_osc, c_poincare * std::sqrt(r.h1_rho0)));

        report.per_time.push_back(std::move(row));
    }
    return report;
}

/// Outcome of the mean-evolution check.
struct MeanEvolutionReport {
    bool zero_mean_case = false;
    bool all_satisfied = true;
    double max_error = 0.0; ///< worst |actual - expected| over both means and all times
};

/// The (0,0) modes decouple from everything else and rotate with angular
/// frequency 1/Fr:
///   mean_w(t)   = mean_w(0) cos(t/Fr) - mean_rho0(0) sin(t/Fr),
///   mean_rho0(t)= mean_w(0) sin(t/Fr) + mean_rho0(0) cos(t/Fr).
/// Vanishing initial means therefore stay zero.
inline MeanEvolutionReport mean_evolution_check(std::span<const DiagnosticsRecord> history,
                                                const PhysicalParams& params,
                                                double tolerance_zero = 1e-12,
                                                double tolerance_rotation = 1e-10) {
    if (history.empty()) throw PreconditionError("mean_evolution_check: empty history");
    MeanEvolutionReport rep;
    const double w0 = history.front().mean_w;
    const double r0 = history.front().mean_rho0;
    const double t0 = history.front().t;
    rep.zero_mean_case = std::abs(w0) <= tolerance_zero && std::abs(r0) <= tolerance_zero;
    for (const DiagnosticsRecord& r : history) {
        double ew, er, tolerance;
        if (rep.zero_mean_case) {
            ew = 0.0;
            er = 0.0;
            tolerance = tolerance_zero;
        } else {
            const double phase = (r.t - t0) / params.Fr;
            ew = w0 * std::cos(phase) - r0 * std::sin(phase);
            er = w0 * std::sin(phase) + r0 * std::cos(phase);
            tolerance = tolerance_rotation;
        }
        const double err = std::max(std::abs(r.mean_w - ew), std::abs(r.mean_rho0 - er));
        rep.max_error = std::max(rep.max_error, err);
        if (err > tolerance) rep.all_satisfied = false;
    }
    return rep;
}

/// Outcome of the per-mode conservation check.
struct ModalConservationReport {
    bool all_satisfied = true;
    double max_rel_drift_l2 = 0.0;
    double max_rel_drift_l4 = 0.0;
    double max_rel_drift_linf = 0.0;
};

/// The modulus of each rho_k is transported, so every L^q norm of every mode
/// is conserved; checked as relative drift against the initial record.
inline ModalConservationReport modal_lq_conservation_check(std::span<const ModalNormsRecord> history,
                                                           const BoundCheckTolerances& tol = {}) {
    ModalConservationReport rep;
    if (history.empty()) return rep;
    const ModalNormsRecord& first = history.front();
    auto drift = [](double now, double init) {
        return std::abs(now - init) / std::max(std::abs(init), 1e-300);
    };
    for (const ModalNormsRecord& r : history) {
        for (size_t k = 0; k < first.l2.size(); ++k) {
            if (first.l2[k] > 0.0) {
                rep.max_rel_drift_l2 = std::max(rep.max_rel_drift_l2, drift(r.l2[k], first.l2[k]));
                rep.max_rel_drift_l4 = std::max(rep.max_rel_drift_l4, drift(r.l4[k], first.l4[k]));
                rep.max_rel_drift_linf = std::max(rep.max_rel_drift_linf, drift(r.linf[k], first.linf[k]));
            } else if (r.l2[k] > 1e-300) {
                rep.all_satisfied = false;
            }
        }
    }
    if (rep.max_rel_drift_l2 > tol.modal_l2_rel || rep.max_rel_drift_l4 > tol.modal_l4_rel ||
        rep.max_rel_drift_linf > tol.modal_linf_rel)
        rep.all_satisfied = false;
    return rep;
}

/// Squared continuous-dependence distance between two states:
///   D = ||u1 - u2||^2 + ||w1 - w2||^2 + ||rho0_1 - rho0_2||^2
///       + ||grad (-lap)^{-1} (rho_1 - rho_2)||^2_{L^2(T^3)},
/// with the velocity difference reconstructed from the vorticity difference.
/// Symmetric in its arguments and zero iff the evolved fields coincide.
inline double continuous_dependence_distance(const ModelState& a, const ModelState& b) {
    if (!a.omega.same_grid(b.omega) || a.kz_max() != b.kz_max())
        throw PreconditionError("continuous_dependence_distance: grid or truncation mismatch");
    SpectralField2D domega = a.omega;
    domega -= b.omega;
    const VectorField2D du = biot_savart(domega);
    SpectralField2D dw = a.w;
    dw -= b.w;
    VerticalModeStack drho = a.rho;
    drho -= b.rho;
    const double u2 = l2_norm(du.u) * l2_norm(du.u) + l2_norm(du.v) * l2_norm(du.v);
    const double w2 = l2_norm(dw) * l2_norm(dw);
    const double r2 = l2_norm(drho.mode(0)) * l2_norm(drho.mode(0));
    return u2 + w2 + r2 + invert_laplacian_3d_gradient(drho);
}

/// One sample of the twin-run separation curve.
struct TwinCurvePoint {
    double t = 0.0;
    double distance = 0.0; ///< D(t)
};

/// Result of a twin experiment: the separation curve, the least-squares slope
/// of log D(t) (the fitted exponential rate), and whether log D stays below
/// its own fitted line plus line_margin (no super-exponential separation).
struct TwinResult {
    std::vector<TwinCurvePoint> curve;
    double fitted_rate = 0.0;
    double fitted_intercept = 0.0;
    double max_excess = 0.0;
    bool growth_bounded = true;
};

/// Integrate two states in lockstep (shared dt, the smaller of the two CFL
/// bounds) and record D(t) at the diagnostic cadence.
inline TwinResult twin_experiment(const ModelState& base, const ModelState& perturbed,
                                  const PhysicalParams& params, const RunConfig& run,
                                  double line_margin = 0.5) {
    params.validate();
    run.validate();
    ModelState s1 = base;
    ModelState s2 = perturbed;
    s1.validate();
    s2.validate();

    TwinResult res;
    res.curve.push_back({0.0, continuous_dependence_distance(s1, s2)});
    const double t_end = run.t_end;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    long step = 0;
    while (s1.t < t_end - eps) {
        double dt = run.dt_override ? *run.dt_override
                                    : std::min(cfl_dt(s1, params, run.cfl), cfl_dt(s2, params, run.cfl));
        dt = std::min(dt, t_end - s1.t);
        try {
            s1 = rk4_step(s1, dt, params);
        } catch (const BlowupError& e) {
            throw BlowupError(std::string("twin experiment, baseline run: ") + e.what(), e.time());
        }
        try {
            s2 = rk4_step(s2, dt, params);
        } catch (const BlowupError& e) {
            throw BlowupError(std::string("twin experiment, perturbed run: ") + e.what(), e.time());
        }
        ++step;
        if (s1.t >= t_end - eps || step % run.diag_every == 0)
            res.curve.push_back({s1.t, continuous_dependence_distance(s1, s2)});
    }

    // fit log D = a + b t over the positive samples
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long npos = 0;
    for (const auto& p : res.curve) {
        if (p.distance <= 0.0) continue;
        const double y = std::log(p.distance);
        sx += p.t;
        sy += y;
        sxx += p.t * p.t;
        sxy += p.t * y;
        ++npos;
    }
    if (npos >= 2) {
        const double denom = npos * sxx - sx * sx;
        if (std::abs(denom) > 0.0) {
            res.fitted_rate = (npos * sxy - sx * sy) / denom;
            res.fitted_intercept = (sy - res.fitted_rate * sx) / npos;
            for (const auto& p : res.curve) {
                if (p.distance <= 0.0) continue;
                const double excess = std::log(p.distance) - (res.fitted_intercept + res.fitted_rate * p.t);
                res.max_excess = std::max(res.max_excess, excess);
            }
        }
    }
    res.growth_bounded = res.max_excess <= line_margin;
    return res;
}

/// Convenience sink that materializes records and modal norms during a run.
class RecordingSink {
public:
    explicit RecordingSink(GridSpec grid) : grid_(grid) {}

    IntegrationSink sink() {
        IntegrationSink s;
        s.on_diagnostic = [this](const ModelState& st, long) {
            records_.push_back(compute_record(st, grid_));
            modal_.push_back(compute_modal_norms(st));
        };
        return s;
    }

    const std::vector<DiagnosticsRecord>& records() const { return records_; }
    const std::vector<ModalNormsRecord>& modal_norms() const { return modal_; }

private:
    GridSpec grid_;
    std::vector<DiagnosticsRecord> records_;
    std::vector<ModalNormsRecord> modal_;
};

} // namespace slowdyn
