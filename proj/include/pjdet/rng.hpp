#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pjdet {

/// One step of the splitmix64 generator; also usable as a mixing function.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from (master, a, b). Used to give every
/// Monte Carlo trial its own channel/bits/noise streams so results do not
/// depend on scheduling or on which detectors share the run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    s ^= splitmix64(a) + 0x9e3779b97f4a7c15ULL;
    std::uint64_t t = splitmix64(s);
    t ^= splitmix64(b) + 0xbf58476d1ce4e5b9ULL;
    return splitmix64(t);
}

/// Deterministic standard-normal sampler (mt19937_64 + Box-Muller).
///
/// std::normal_distribution is implementation-defined, which would make
/// fixed-seed outputs compiler-dependent; this sampler pins the exact
/// sequence for a given seed.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite; u2 in [0,1).
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pjdet
