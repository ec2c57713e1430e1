#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pjdet/constellation.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/mmse.hpp"
#include "pjdet/model.hpp"
#include "pjdet/pjadmm.hpp"
#include "pjdet/rng.hpp"

namespace pjdet {

enum class DetectorKind { pjadmm, mmse, both };

inline const char* detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::pjadmm: return "pjadmm";
        case DetectorKind::mmse: return "mmse";
        default: return "both";
    }
}

/// Monte Carlo experiment description. Every trial derives its channel, bit,
/// and noise streams from (seed, trial index) alone, so detectors, iteration
/// budgets, and SNR points all see identical instances and runs are
/// reproducible at any worker count.
struct SimConfig {
    int nr = 128;
    int nt = 16;
    int constellation_size = 4;
    std::vector<double> snr_db = {12.0};
    DetectorKind detector = DetectorKind::both;
    PjadmmConfig solver;
    bool solver_is_tuned = false;  // true: ignore `solver`, use tuned_solver()
    int trials = 1000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = library default

    void validate() const {
        if (nr < 1 || nt < 1) throw DimensionError("antenna counts must be positive");
        if (trials < 1) throw ParameterError("trials must be at least 1");
        if (solver.max_iters < 1) throw ParameterError("max_iters must be at least 1");
        if (!solver_is_tuned) solver.validate();
    }
};

/// One BER measurement point.
struct BerRow {
    double snr_db = 0.0;
    int nt = 0;
    int nr = 0;
    std::string detector;
    int t_iters = 0;
    long long trials = 0;
    long long bits = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    double ci_half_width = 0.0;
};

struct BerReport {
    std::vector<BerRow> rows;
};

/// One processing-cost row; `time_units` counts real multiplications with
/// parallel blocks counted once.
struct TimeUnitRow {
    int nt = 0;
    int nr = 0;
    int t_iters = 0;
    std::string detector;
    long long time_units = 0;
};

struct TimeUnitReport {
    std::vector<TimeUnitRow> rows;
};

/// Parallel processing cost of a T-iteration detection run on an Nr x Nt
/// system: 4 Nr once, plus 14 Nr + 2 Nt per iteration.
inline long long time_units(long long nr, long long nt, long long t_iters) {
    if (nr < 0 || nt < 0 || t_iters < 0) throw ParameterError("time_units arguments must be nonnegative");
    return 4 * nr + t_iters * (14 * nr + 2 * nt);
}

/// Wilson score interval (95%) for k errors in n bits: returns {center, half width}.
struct WilsonInterval {
    double center = 0.0;
    double half_width = 0.0;
    double low() const { return center - half_width; }
    double high() const { return center + half_width; }
};

inline WilsonInterval wilson_interval(long long errors, long long bits) {
    if (bits <= 0) throw ParameterError("Wilson interval needs a positive bit count");
    constexpr double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(bits);
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    WilsonInterval w;
    w.center = (p + z2n / 2.0) / (1.0 + z2n);
    w.half_width = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
    return w;
}

/// Calibrated solver parameters for a detection run with 2*nt blocks and the
/// given iteration budget. The Fig.-2 style operating points (128 BS
/// antennas, Nt in {16, 32, 64}) carry measured presets; anything else falls
/// back to the stable general rule. See README for the calibration notes.
inline PjadmmConfig tuned_solver(int nr, int nt, int t_iters) {
    const int blocks = 2 * nt;
    PjadmmConfig cfg = PjadmmConfig::defaults_for(blocks, t_iters);
    if (nr == 128 && nt == 16) {
        cfg.rho = 0.2 / 32.0;
        cfg.tau = 0.5 * cfg.rho * 31.0;
        cfg.clamp = ClampMode::none;
    } else if (nr == 128 && nt == 32) {
        cfg.rho = 0.25 / 64.0;
        cfg.tau = 0.4 * cfg.rho * 63.0;
        cfg.clamp = ClampMode::box;
    } else if (nr == 128 && nt == 64) {
        cfg.rho = 0.3 / 128.0;
        cfg.tau = 0.25 * cfg.rho * 127.0;
        cfg.clamp = ClampMode::none;
    } else if (nr == 128 && nt == 128) {
        cfg.rho = 0.3 / 256.0;
        cfg.tau = 0.25 * cfg.rho * 255.0;
        cfg.clamp = ClampMode::none;
    }
    cfg.max_iters = t_iters;
    return cfg;
}

/// Paper-styled iteration budgets at Nr = 128 (measured for Nt = 16 and 64,
/// cost-table-consistent for Nt = 32 and 128).
inline int reference_iterations(int nt) {
    switch (nt) {
        case 16: return 12;
        case 32: return 18;
        case 64: return 40;
        case 128: return 50;
        default: return 0;
    }
}

namespace detail {

struct TrialCounts {
    long long bits = 0;
    long long errors_pjadmm = 0;
    long long errors_mmse = 0;
};

/// One transmission: fresh channel, bits, and noise, all derived from
/// (seed, trial). Returns bit-error counts for the requested detectors.
inline TrialCounts run_trial(const SimConfig& cfg, const Constellation& c, double snr_db,
                             const PjadmmConfig& solver, std::uint64_t trial) {
    const double noise_var = noise_variance_from_snr(snr_db, cfg.nt);

    ComplexSystemModel complex_model;
    complex_model.channel = generate_channel(cfg.nr, cfg.nt, derive_seed(cfg.seed, trial, 0));
    complex_model.noise_var = noise_var;

    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cfg.nt) * c.bits_per_symbol());
    {
        std::mt19937_64 engine(derive_seed(cfg.seed, trial, 1));
        for (auto& b : bits) b = static_cast<std::uint8_t>(engine() & 1u);
    }
    complex_model.tx = modulate(bits, c);
    complex_model.rx = complex_model.channel * complex_model.tx;  // noise added in real domain

    RealSystemModel real_model = complex_to_real(complex_model);
    real_model.rx = add_noise(real_model.rx, real_model.sigma2, derive_seed(cfg.seed, trial, 2));

    TrialCounts counts;
    counts.bits = static_cast<long long>(bits.size());
    const auto count_errors = [&](const Eigen::VectorXd& hard) {
        const std::vector<std::uint8_t> decoded = demodulate(hard, c);
        long long errors = 0;
        for (std::size_t b = 0; b < bits.size(); ++b) errors += (decoded[b] != bits[b]) ? 1 : 0;
        return errors;
    };
    if (cfg.detector != DetectorKind::mmse)
        counts.errors_pjadmm = count_errors(detect(real_model, c, solver).hard);
    if (cfg.detector != DetectorKind::pjadmm)
        counts.errors_mmse = count_errors(mmse_detect(real_model, c).hard);
    return counts;
}

inline void append_rows(BerReport& report, const SimConfig& cfg, double snr_db, int t_iters,
                        const std::vector<TrialCounts>& outcomes) {
    long long bits = 0, err_pj = 0, err_mm = 0;
    for (const auto& o : outcomes) {  // fixed trial order; independent of scheduling
        bits += o.bits;
        err_pj += o.errors_pjadmm;
        err_mm += o.errors_mmse;
    }
    const auto make_row = [&](const char* name, int iters, long long errors) {
        BerRow row;
        row.snr_db = snr_db;
        row.nt = cfg.nt;
        row.nr = cfg.nr;
        row.detector = name;
        row.t_iters = iters;
        row.trials = cfg.trials;
        row.bits = bits;
        row.bit_errors = errors;
        row.ber = bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
        row.ci_half_width = wilson_interval(errors, bits).half_width;
        report.rows.push_back(row);
    };
    if (cfg.detector != DetectorKind::mmse) make_row("pjadmm", t_iters, err_pj);
    if (cfg.detector != DetectorKind::pjadmm) make_row("mmse", 0, err_mm);
}

inline std::vector<TrialCounts> run_point(const SimConfig& cfg, const Constellation& c, double snr_db,
                                          const PjadmmConfig& solver) {
    std::vector<TrialCounts> outcomes(static_cast<std::size_t>(cfg.trials));
#ifdef _OPENMP
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int trial = 0; trial < cfg.trials; ++trial)
        outcomes[static_cast<std::size_t>(trial)] =
            run_trial(cfg, c, snr_db, solver, static_cast<std::uint64_t>(trial));
    return outcomes;
}

}  // namespace detail

/// BER over cfg.trials independent transmissions for every SNR point.
/// Failed trials propagate as exceptions; nothing is skipped.
inline BerReport run_ber(const SimConfig& cfg) {
    cfg.validate();
    const Constellation c = Constellation::square_qam(cfg.constellation_size);
    BerReport report;
    PjadmmConfig solver = cfg.solver;
    if (cfg.solver_is_tuned) {
        solver = tuned_solver(cfg.nr, cfg.nt, cfg.solver.max_iters);
        solver.tol = cfg.solver.tol;
    }
    for (double snr : cfg.snr_db) {
        const auto outcomes = detail::run_point(cfg, c, snr, solver);
        detail::append_rows(report, cfg, snr, solver.max_iters, outcomes);
    }
    return report;
}

/// BER as a function of the iteration budget at a fixed SNR, on paired
/// instances. Includes one MMSE reference row when the config asks for both
/// detectors.
inline BerReport sweep_iterations(const SimConfig& base, const std::vector<int>& t_values) {
    base.validate();
    if (base.snr_db.size() != 1) throw ParameterError("iteration sweep expects exactly one SNR point");
    const Constellation c = Constellation::square_qam(base.constellation_size);
    const double snr = base.snr_db.front();
    BerReport report;
    SimConfig cfg = base;
    for (int t : t_values) {
        if (t < 1) throw ParameterError("iteration budgets must be at least 1");
        cfg.detector = DetectorKind::pjadmm;
        PjadmmConfig solver = base.solver_is_tuned ? tuned_solver(base.nr, base.nt, t) : base.solver;
        if (base.solver_is_tuned) solver.tol = base.solver.tol;
        solver.max_iters = t;
        const auto outcomes = detail::run_point(cfg, c, snr, solver);
        detail::append_rows(report, cfg, snr, t, outcomes);
    }
    if (base.detector == DetectorKind::both || base.detector == DetectorKind::mmse) {
        cfg.detector = DetectorKind::mmse;
        const auto outcomes = detail::run_point(cfg, c, snr, base.solver_is_tuned
                                                                ? tuned_solver(base.nr, base.nt, 1)
                                                                : base.solver);
        detail::append_rows(report, cfg, snr, 0, outcomes);
    }
    return report;
}

/// BER versus SNR with paired seeds across points and detectors.
inline BerReport sweep_snr(const SimConfig& base, const std::vector<double>& snr_list) {
    SimConfig cfg = base;
    cfg.snr_db = snr_list;
    if (snr_list.empty()) return BerReport{};
    return run_ber(cfg);
}

/// Processing-cost table at Nr = 128: computed rows for this detector with
/// the reference iteration budgets, next to the cited per-vector costs of
/// exact MMSE and the sequential AltMin detector.
inline TimeUnitReport table1_report() {
    TimeUnitReport report;
    const int nts[] = {16, 32, 64, 128};
    const long long mmse_units[] = {57000, 311000, 2195000, 16970000};
    const long long altmin_units[] = {200000, 409000, 1409000, 2818000};
    for (int i = 0; i < 4; ++i) {
        const int nt = nts[i];
        const int t = reference_iterations(nt);
        report.rows.push_back({nt, 128, t, "pjadmm", time_units(128, nt, t)});
    }
    for (int i = 0; i < 4; ++i) report.rows.push_back({nts[i], 128, 0, "mmse", mmse_units[i]});
    for (int i = 0; i < 4; ++i) report.rows.push_back({nts[i], 128, 0, "altmin", altmin_units[i]});
    return report;
}

}  // namespace pjdet
