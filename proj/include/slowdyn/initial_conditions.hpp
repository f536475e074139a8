#pragma once

/// Initial-condition generators. Random fields use std::mt19937_64 (an
/// exactly specified engine, so streams are identical on every platform) with
/// an explicit 53-bit mapping to doubles; the per-field draw order is fixed
/// (omega, w, rho_0, rho_1, ..., modes scanned in storage order), so a seed
/// pins the state bit for bit.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "slowdyn/errors.hpp"
#include "slowdyn/field.hpp"
#include "slowdyn/grid.hpp"
#include "slowdyn/io.hpp"
#include "slowdyn/model.hpp"

namespace slowdyn {

/// Deterministic uniform stream; never uses the platform-defined
/// distribution wrappers.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

/// Named generator plus its parameters; unused fields are ignored by
/// generators that do not consume them.
struct InitialConditionSpec {
    std::string name;                ///< taylor_green | single_mode | random_spectrum | oscillator_only | from_checkpoint
    double amplitude = 1.0;          ///< vorticity amplitude
    double w_amplitude = 0.0;        ///< w amplitude (generator-specific default applied at build)
    double rho0_amplitude = 0.0;     ///< rho_0 amplitude
    double rho_amplitude = 0.0;      ///< amplitude of the k >= 1 density modes
    double spectrum_slope = 4.0;     ///< s in the (1+|k|)^{-s} amplitude law
    std::uint64_t seed = 0;
    int mode_m = 1;                  ///< wavenumbers for single_mode / oscillator_only
    int mode_n = 0;
    int rho_k_index = 1;             ///< which rho_k the single_mode generator fills
    std::string checkpoint_path;     ///< for from_checkpoint

    bool w_amplitude_set = false;    ///< parser bookkeeping: explicit vs default
    bool rho0_amplitude_set = false;
    bool rho_amplitude_set = false;
};

namespace detail {

/// Random band-limited field with coefficient modulus amp*(1+|k|)^{-slope}
/// and uniformly random phases; mean-zero and restricted to the 2/3 band
/// (which excludes the Nyquist lines). hermitian builds a real-valued field.
inline SpectralField2D random_spectrum_field(int nx, int ny, double L, double amp, double slope,
                                             SeededRng& rng, bool hermitian) {
    SpectralField2D f(nx, ny, L);
    for (int i = 0; i < nx; ++i) {
        const int m = mode_from_index(i, nx);
        for (int j = 0; j < ny; ++j) {
            const int n = mode_from_index(j, ny);
            if ((m == 0 && n == 0) || !in_dealias_band(m, n, nx, ny)) continue;
            if (hermitian && !(m > 0 || (m == 0 && n > 0))) continue; // canonical half only
            const double r = amp * std::pow(1.0 + std::sqrt(static_cast<double>(m) * m + static_cast<double>(n) * n), -slope);
            const double phi = two_pi * rng.uniform01();
            const cplx c{r * std::cos(phi), r * std::sin(phi)};
            f.at_mode(m, n) = c;
            if (hermitian) f.at_mode(-m, -n) = std::conj(c);
        }
    }
    return f;
}

/// amp * cos(2 pi (m x + n y)/L) as a spectral field.
inline SpectralField2D cosine_mode(int nx, int ny, double L, int m, int n, double amp) {
    SpectralField2D f(nx, ny, L);
    if (amp != 0.0) {
        f.at_mode(m, n) += cplx{0.5 * amp, 0.0};
        f.at_mode(-m, -n) += cplx{0.5 * amp, 0.0};
    }
    return f;
}

} // namespace detail

/// Build the initial ModelState for a generator spec. The (0,0) mode of the
/// vorticity is zero for every generator. cli_seed, when nonnegative, wins
/// over the seed stored in the spec.
inline ModelState build_initial_state(const InitialConditionSpec& ic, const GridSpec& grid,
                                      std::int64_t cli_seed = -1) {
    grid.validate();
    const std::uint64_t seed = cli_seed >= 0 ? static_cast<std::uint64_t>(cli_seed) : ic.seed;
    const int nx = grid.nx, ny = grid.ny;
    const double L = grid.L;

    ModelState s;
    s.t = 0.0;
    s.omega = SpectralField2D(nx, ny, L);
    s.w = SpectralField2D(nx, ny, L);
    s.rho = VerticalModeStack(grid.kz_max, nx, ny, L);

    if (ic.name == "taylor_green") {
        // omega = A cos(2 pi x/L) cos(2 pi y/L); optional random w / rho parts
        const double a = 0.25 * ic.amplitude;
        s.omega.at_mode(1, 1) = a;
        s.omega.at_mode(-1, -1) = a;
        s.omega.at_mode(1, -1) = a;
        s.omega.at_mode(-1, 1) = a;
        SeededRng rng(seed);
        if (ic.w_amplitude != 0.0)
            s.w = detail::random_spectrum_field(nx, ny, L, ic.w_amplitude, ic.spectrum_slope, rng, true);
        if (ic.rho0_amplitude != 0.0)
            s.rho.mode(0) = detail::random_spectrum_field(nx, ny, L, ic.rho0_amplitude, ic.spectrum_slope, rng, true);
        if (ic.rho_amplitude != 0.0)
            for (int k = 1; k <= grid.kz_max; ++k)
                s.rho.mode(k) = detail::random_spectrum_field(nx, ny, L, ic.rho_amplitude, ic.spectrum_slope, rng, false);
    } else if (ic.name == "single_mode") {
        if (ic.mode_m == 0 && ic.mode_n == 0)
            throw ConfigError("single_mode: (mode_m, mode_n) must not be (0, 0)");
        if (!in_dealias_band(ic.mode_m, ic.mode_n, nx, ny))
            throw ConfigError("single_mode: requested mode lies outside the 2/3 band");
        s.omega = detail::cosine_mode(nx, ny, L, ic.mode_m, ic.mode_n, ic.amplitude);
        s.w = detail::cosine_mode(nx, ny, L, ic.mode_m, ic.mode_n, ic.w_amplitude);
        s.rho.mode(0) = detail::cosine_mode(nx, ny, L, ic.mode_m, ic.mode_n, ic.rho0_amplitude);
        if (ic.rho_amplitude != 0.0) {
            if (ic.rho_k_index < 1 || ic.rho_k_index > grid.kz_max)
                throw ConfigError("single_mode: rho_k_index outside 1..kz_max");
            s.rho.mode(ic.rho_k_index).at_mode(ic.mode_m, ic.mode_n) = ic.rho_amplitude;
        }
    } else if (ic.name == "random_spectrum") {
        SeededRng rng(seed);
        const double wamp = ic.w_amplitude_set ? ic.w_amplitude : 1.0;
        const double r0amp = ic.rho0_amplitude_set ? ic.rho0_amplitude : 1.0;
        const double ramp = ic.rho_amplitude_set ? ic.rho_amplitude : 1.0;
        s.omega = detail::random_spectrum_field(nx, ny, L, ic.amplitude, ic.spectrum_slope, rng, true);
        s.w = detail::random_spectrum_field(nx, ny, L, wamp, ic.spectrum_slope, rng, true);
        s.rho.mode(0) = detail::random_spectrum_field(nx, ny, L, r0amp, ic.spectrum_slope, rng, true);
        for (int k = 1; k <= grid.kz_max; ++k)
            s.rho.mode(k) = detail::random_spectrum_field(nx, ny, L, ramp, ic.spectrum_slope, rng, false);
    } else if (ic.name == "oscillator_only") {
        // u_h = 0; constant w / rho_0 when (mode_m, mode_n) = (0,0), else a
        // single cosine mode.
        const double wamp = ic.w_amplitude_set ? ic.w_amplitude : 1.0;
        if (ic.mode_m == 0 && ic.mode_n == 0) {
            s.w.at_mode(0, 0) = wamp;
            s.rho.mode(0).at_mode(0, 0) = ic.rho0_amplitude;
        } else {
            s.w = detail::cosine_mode(nx, ny, L, ic.mode_m, ic.mode_n, wamp);
            s.rho.mode(0) = detail::cosine_mode(nx, ny, L, ic.mode_m, ic.mode_n, ic.rho0_amplitude);
        }
    } else if (ic.name == "from_checkpoint") {
        if (ic.checkpoint_path.empty())
            throw ConfigError("from_checkpoint requires ic.checkpoint");
        auto [loaded, header_params] = read_checkpoint(ic.checkpoint_path);
        if (loaded.omega.nx() != nx || loaded.omega.ny() != ny || loaded.kz_max() != grid.kz_max ||
            loaded.omega.L() != L)
            throw ConfigError("checkpoint grid does not match the configured grid");
        loaded.t = 0.0; // restarts begin a fresh clock
        s = std::move(loaded);
    } else {
        throw ConfigError("unknown initial-condition generator '" + ic.name + "'");
    }

    s.omega.coeffs()[0] = cplx{0.0, 0.0};
    return s;
}

} // namespace slowdyn
