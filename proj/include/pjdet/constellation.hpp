#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pjdet/errors.hpp"

namespace pjdet {

/// Square M-QAM description with unit mean symbol energy.
///
/// The per-dimension alphabet is {-(sqrt(M)-1), ..., -1, +1, ..., +(sqrt(M)-1)} / gamma
/// with gamma^2 = 2(M-1)/3, which makes E|x|^2 = 1 for uniformly drawn
/// symbols. Bits map to levels through a reflected Gray code per real
/// dimension; the all-zero bit pattern maps to the most positive level, so
/// QPSK sends bit 0 as +1/sqrt(2) and bit 1 as -1/sqrt(2).
class Constellation {
public:
    static Constellation square_qam(int m) {
        if (m < 4) throw ParameterError("constellation size must be at least 4, got " + std::to_string(m));
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
        if (side * side != m) throw ParameterError("constellation size must be a perfect square, got " + std::to_string(m));
        if ((side & (side - 1)) != 0)
            throw ParameterError("per-dimension level count must be a power of two, got " + std::to_string(side));
        return Constellation(m, side);
    }

    int size() const { return m_; }
    int levels_per_dim() const { return side_; }
    int bits_per_dim() const { return bits_per_dim_; }
    int bits_per_symbol() const { return 2 * bits_per_dim_; }
    double gamma() const { return gamma_; }
    /// Largest alphabet level; the box relaxation constrains each real
    /// dimension to [-box_bound, box_bound].
    double box_bound() const { return levels_.back(); }
    const std::vector<double>& levels() const { return levels_; }

    /// Index of the alphabet level nearest to v; exact midpoint ties resolve
    /// to the level closer to +box_bound.
    int quantize_index(double v) const {
        auto it = std::upper_bound(midpoints_.begin(), midpoints_.end(), v);
        return static_cast<int>(it - midpoints_.begin());
    }

    double quantize(double v) const { return levels_[static_cast<std::size_t>(quantize_index(v))]; }

    /// Gray-maps bits_per_dim() bits (MSB first) to one alphabet level.
    double map_bits(const std::uint8_t* bits) const {
        unsigned gray = 0;
        for (int b = 0; b < bits_per_dim_; ++b) gray = (gray << 1) | (bits[b] & 1u);
        unsigned idx = gray;
        for (unsigned shift = gray >> 1; shift != 0; shift >>= 1) idx ^= shift;
        return levels_[static_cast<std::size_t>(side_ - 1 - static_cast<int>(idx))];
    }

    /// Inverse of map_bits on exact alphabet levels; arbitrary reals are
    /// quantized first.
    void unmap_level(double level, std::uint8_t* bits_out) const {
        const unsigned idx = static_cast<unsigned>(side_ - 1 - quantize_index(level));
        const unsigned gray = idx ^ (idx >> 1);
        for (int b = 0; b < bits_per_dim_; ++b)
            bits_out[b] = static_cast<std::uint8_t>((gray >> (bits_per_dim_ - 1 - b)) & 1u);
    }

private:
    Constellation(int m, int side) : m_(m), side_(side) {
        bits_per_dim_ = 0;
        for (int v = side; v > 1; v >>= 1) ++bits_per_dim_;
        gamma_ = std::sqrt(2.0 * (m - 1) / 3.0);
        levels_.reserve(static_cast<std::size_t>(side));
        for (int j = 0; j < side; ++j) levels_.push_back((2 * j - (side - 1)) / gamma_);
        midpoints_.reserve(static_cast<std::size_t>(side - 1));
        for (int j = 0; j + 1 < side; ++j) midpoints_.push_back(0.5 * (levels_[j] + levels_[j + 1]));
    }

    int m_;
    int side_;
    int bits_per_dim_;
    double gamma_;
    std::vector<double> levels_;
    std::vector<double> midpoints_;
};

}  // namespace pjdet
