#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "pjdet/constellation.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/rng.hpp"

namespace pjdet {

/// Complex uplink model rx = channel * tx + noise with Nr receive antennas
/// and Nt single-antenna users.
struct ComplexSystemModel {
    Eigen::MatrixXcd channel;  // Nr x Nt, i.i.d. CN(0,1) entries
    Eigen::VectorXcd tx;       // Nt, unit average symbol energy
    Eigen::VectorXcd rx;       // Nr
    double noise_var = 0.0;    // variance per complex dimension

    int nr() const { return static_cast<int>(channel.rows()); }
    int nt() const { return static_cast<int>(channel.cols()); }
};

/// Real-valued equivalent of the complex model: stacked re/im parts with the
/// block channel [[Re, -Im], [Im, Re]]. Noise variance is per real dimension
/// (half the complex value).
struct RealSystemModel {
    Eigen::MatrixXd channel;  // 2Nr x 2Nt
    Eigen::VectorXd rx;       // 2Nr
    double sigma2 = 0.0;      // per real dimension
    int nr = 0;               // complex receive count
    int nt = 0;               // complex user count

    int rows() const { return 2 * nr; }
    int cols() const { return 2 * nt; }
};

/// Draws an Nr x Nt flat-fading channel with i.i.d. CN(0,1) entries.
/// Deterministic for a fixed seed (column-major fill order).
inline Eigen::MatrixXcd generate_channel(int nr, int nt, std::uint64_t seed) {
    if (nr < 1 || nt < 1)
        throw DimensionError("channel dimensions must be positive, got " + std::to_string(nr) + "x" +
                             std::to_string(nt));
    if (nt > nr)
        std::cerr << "pjdet: warning: more users (" << nt << ") than receive antennas (" << nr << ")\n";
    GaussianSampler gauss(seed);
    const double scale = std::sqrt(0.5);
    Eigen::MatrixXcd h(nr, nt);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nr; ++i) {
            const double re = gauss() * scale;
            const double im = gauss() * scale;
            h(i, j) = std::complex<double>(re, im);
        }
    return h;
}

/// Gray-maps a bit vector onto complex symbols. Each symbol consumes
/// bits_per_symbol() bits: the first half selects the real part, the second
/// half the imaginary part.
inline Eigen::VectorXcd modulate(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    const int per_symbol = c.bits_per_symbol();
    if (bits.size() % static_cast<std::size_t>(per_symbol) != 0)
        throw FramingError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                           std::to_string(per_symbol));
    const auto n = static_cast<Eigen::Index>(bits.size() / static_cast<std::size_t>(per_symbol));
    Eigen::VectorXcd symbols(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::uint8_t* base = bits.data() + static_cast<std::size_t>(k) * per_symbol;
        symbols[k] = std::complex<double>(c.map_bits(base), c.map_bits(base + c.bits_per_dim()));
    }
    return symbols;
}

/// Recovers bits from a real-stacked symbol vector (length 2Nt). Entries are
/// quantized to the alphabet before Gray unmapping, so soft inputs are valid.
inline std::vector<std::uint8_t> demodulate(const Eigen::VectorXd& stacked, const Constellation& c) {
    if (stacked.size() % 2 != 0) throw DimensionError("real-stacked vector must have even length");
    const Eigen::Index nt = stacked.size() / 2;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(nt) * c.bits_per_symbol());
    for (Eigen::Index k = 0; k < nt; ++k) {
        std::uint8_t* base = bits.data() + static_cast<std::size_t>(k) * c.bits_per_symbol();
        c.unmap_level(stacked[k], base);
        c.unmap_level(stacked[nt + k], base + c.bits_per_dim());
    }
    return bits;
}

/// [Re; Im] stacking of a complex vector.
inline Eigen::VectorXd real_stack(const Eigen::VectorXcd& v) {
    Eigen::VectorXd out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

/// Real block expansion [[Re, -Im], [Im, Re]] of a complex matrix.
inline Eigen::MatrixXd real_expand(const Eigen::MatrixXcd& m) {
    const Eigen::Index r = m.rows(), c = m.cols();
    Eigen::MatrixXd out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.real();
    out.topRightCorner(r, c) = -m.imag();
    out.bottomLeftCorner(r, c) = m.imag();
    out.bottomRightCorner(r, c) = m.real();
    return out;
}

/// Real-valued equivalent model; multiplying the real channel by a stacked
/// symbol vector reproduces the stacked complex product exactly.
inline RealSystemModel complex_to_real(const ComplexSystemModel& m) {
    if (m.rx.size() != m.channel.rows())
        throw DimensionError("received vector length does not match channel rows");
    RealSystemModel out;
    out.channel = real_expand(m.channel);
    out.rx = real_stack(m.rx);
    out.sigma2 = m.noise_var / 2.0;
    out.nr = m.nr();
    out.nt = m.nt();
    return out;
}

/// Noise variance per complex dimension for a given SNR. The convention is
/// SNR = Nt / sigma_v^2, i.e. total received signal power over total noise
/// power for unit-energy symbols and unit-variance channel gains.
inline double noise_variance_from_snr(double snr_db, int nt) {
    if (nt < 1) throw DimensionError("user count must be positive");
    return static_cast<double>(nt) / std::pow(10.0, snr_db / 10.0);
}

/// Adds i.i.d. zero-mean Gaussian noise of the given per-entry variance.
inline Eigen::VectorXd add_noise(const Eigen::VectorXd& clean, double variance, std::uint64_t seed) {
    if (variance < 0.0) throw ParameterError("noise variance must be nonnegative");
    GaussianSampler gauss(seed);
    const double sd = std::sqrt(variance);
    Eigen::VectorXd out(clean.size());
    for (Eigen::Index i = 0; i < clean.size(); ++i) out[i] = clean[i] + sd * gauss();
    return out;
}

/// Hard quantization of every entry to the nearest alphabet level.
inline Eigen::VectorXd quantize(const Eigen::VectorXd& soft, const Constellation& c) {
    Eigen::VectorXd out(soft.size());
    for (Eigen::Index i = 0; i < soft.size(); ++i) out[i] = c.quantize(soft[i]);
    return out;
}

}  // namespace pjdet
