#pragma once

/// On-disk formats.
///
/// Checkpoint (binary, little-endian regardless of host):
///   bytes 0..3    magic "SLWD"
///   u32           format version (1)
///   u32 nx, u32 ny, u32 kz_max, u32 viscous(0/1)
///   f64 L, f64 Fr, f64 Re, f64 Pr, f64 t
///   u32           field count = 3 + kz_max
///   u32[count]    coefficients per field (nx*ny each)
///   payload       per field, coefficient arrays as (re, im) f64 pairs in
///                 storage (wrapped row-major) order; field order is
///                 omega, w, rho_0, rho_1, ..., rho_kz_max.
/// read(write(state)) is bitwise identical.
///
/// Diagnostics CSV: one header row naming every DiagnosticsRecord field plus
/// one margin_<bound> column per checked bound, then one row per record with
/// 17 significant digits.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "slowdyn/diagnostics.hpp"
#include "slowdyn/errors.hpp"
#include "slowdyn/model.hpp"

namespace slowdyn {

inline constexpr char checkpoint_magic[4] = {'S', 'L', 'W', 'D'};
inline constexpr std::uint32_t checkpoint_version = 1;

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& buf, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& what) : data_(data), what_(what) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    }
    void raw(char* out, size_t n) {
        need(n);
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    size_t remaining() const { return data_.size() - pos_; }

private:
    void need(size_t n) {
        if (pos_ + n > data_.size()) throw IoError(what_ + ": truncated payload");
    }
    const std::string& data_;
    std::string what_;
    size_t pos_ = 0;
};

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Serialize a state (plus the model constants it was produced under) to the
/// checkpoint byte layout documented above.
inline void write_checkpoint(const ModelState& state, const PhysicalParams& params,
                             const std::string& path) {
    std::string buf;
    buf.append(checkpoint_magic, 4);
    detail::put_u32(buf, checkpoint_version);
    detail::put_u32(buf, static_cast<std::uint32_t>(state.omega.nx()));
    detail::put_u32(buf, static_cast<std::uint32_t>(state.omega.ny()));
    detail::put_u32(buf, static_cast<std::uint32_t>(state.kz_max()));
    detail::put_u32(buf, params.viscous ? 1u : 0u);
    detail::put_f64(buf, params.L);
    detail::put_f64(buf, params.Fr);
    detail::put_f64(buf, params.Re);
    detail::put_f64(buf, params.Pr);
    detail::put_f64(buf, state.t);
    const std::uint32_t nfields = 3 + static_cast<std::uint32_t>(state.kz_max());
    detail::put_u32(buf, nfields);
    const std::uint32_t count = static_cast<std::uint32_t>(state.omega.size());
    for (std::uint32_t f = 0; f < nfields; ++f) detail::put_u32(buf, count);

    auto put_field = [&buf](const SpectralField2D& f) {
        for (const cplx& z : f.coeffs()) {
            detail::put_f64(buf, z.real());
            detail::put_f64(buf, z.imag());
        }
    };
    put_field(state.omega);
    put_field(state.w);
    for (int k = 0; k <= state.kz_max(); ++k) put_field(state.rho.mode(k));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failure on '" + path + "'");
}

/// Parse a checkpoint file; header corruption, truncation, and trailing bytes
/// are reported distinctly.
inline std::pair<ModelState, PhysicalParams> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    detail::ByteReader r(data, path);

    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, checkpoint_magic, 4) != 0)
        throw IoError(path + ": corrupt header (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != checkpoint_version)
        throw IoError(path + ": corrupt header (unsupported version " + std::to_string(version) + ")");
    const std::uint32_t nx = r.u32();
    const std::uint32_t ny = r.u32();
    const std::uint32_t kz_max = r.u32();
    const std::uint32_t viscous = r.u32();
    PhysicalParams params;
    params.L = r.f64();
    params.Fr = r.f64();
    params.Re = r.f64();
    params.Pr = r.f64();
    params.viscous = viscous != 0;
    const double t = r.f64();
    if (nx == 0 || ny == 0 || nx % 2 != 0 || ny % 2 != 0 || !(params.L > 0.0))
        throw IoError(path + ": corrupt header (bad dimensions)");
    const std::uint32_t nfields = r.u32();
    if (nfields != 3 + kz_max) throw IoError(path + ": corrupt header (bad field count)");
    const std::uint32_t expected = nx * ny;
    for (std::uint32_t f = 0; f < nfields; ++f)
        if (r.u32() != expected) throw IoError(path + ": corrupt header (bad coefficient count)");

    ModelState s;
    s.t = t;
    s.omega = SpectralField2D(static_cast<int>(nx), static_cast<int>(ny), params.L);
    s.w = s.omega;
    s.rho = VerticalModeStack(static_cast<int>(kz_max), static_cast<int>(nx), static_cast<int>(ny), params.L);
    auto get_field = [&r](SpectralField2D& f) {
        for (cplx& z : f.coeffs()) {
            const double re = r.f64();
            const double im = r.f64();
            z = cplx{re, im};
        }
    };
    get_field(s.omega);
    get_field(s.w);
    for (std::uint32_t k = 0; k <= kz_max; ++k) get_field(s.rho.mode(static_cast<int>(k)));
    if (r.remaining() != 0) throw IoError(path + ": payload size mismatch (trailing bytes)");
    return {std::move(s), params};
}

/// Diagnostics table: record fields plus per-bound margins, full double
/// precision. The bound report must cover the same record times.
inline void write_diagnostics_csv(std::span<const DiagnosticsRecord> records,
                                  const BoundReport& report, const std::string& path) {
    if (report.per_time.size() != records.size())
        throw PreconditionError("write_diagnostics_csv: report/record length mismatch");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    std::string header;
    for (const std::string& n : DiagnosticsRecord::field_names()) {
        if (!header.empty()) header += ',';
        header += n;
    }
    for (const std::string& n : report.bound_names) header += ",margin_" + n;
    out << header << '\n';

    for (size_t i = 0; i < records.size(); ++i) {
        std::string row;
        for (double v : records[i].field_values()) {
            if (!row.empty()) row += ',';
            row += detail::format_g17(v);
        }
        for (const BoundEntry& e : report.per_time[i]) row += ',' + detail::format_g17(e.margin);
        out << row << '\n';
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

/// Twin separation curve: t, D(t).
inline void write_twin_csv(std::span<const TwinCurvePoint> curve, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "t,D\n";
    for (const TwinCurvePoint& p : curve)
        out << detail::format_g17(p.t) << ',' << detail::format_g17(p.distance) << '\n';
    if (!out) throw IoError("write failure on '" + path + "'");
}

} // namespace slowdyn
