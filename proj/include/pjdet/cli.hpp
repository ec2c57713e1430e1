#pragma once

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pjdet/bench.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/mmse.hpp"
#include "pjdet/model.hpp"
#include "pjdet/pjadmm.hpp"
#include "pjdet/report_io.hpp"

namespace pjdet::cli {

/// Parses "start:step:stop" (inclusive), a comma list, or a single value.
inline std::vector<double> parse_value_list(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    const auto parse_one = [&](const std::string& token) {
        try {
            std::size_t consumed = 0;
            const double v = std::stod(token, &consumed);
            if (consumed != token.size()) throw std::invalid_argument(token);
            return v;
        } catch (const std::exception&) {
            throw ParameterError(flag + ": cannot parse '" + token + "' as a number");
        }
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3) throw ParameterError(flag + ": range must be start:step:stop");
        const double start = parse_one(parts[0]);
        const double step = parse_one(parts[1]);
        const double stop = parse_one(parts[2]);
        if (step <= 0.0) throw ParameterError(flag + ": range step must be positive");
        if (stop < start) throw ParameterError(flag + ": range stop is below start");
        for (double v = start; v <= stop + 1e-9 * step; v += step) values.push_back(v);
        return values;
    }
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(parse_one(token));
    }
    if (values.empty()) throw ParameterError(flag + ": empty value list");
    return values;
}

inline std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    for (double v : parse_value_list(text, flag)) {
        const int i = static_cast<int>(std::lround(v));
        if (std::abs(v - i) > 1e-9) throw ParameterError(flag + ": expected integer values");
        out.push_back(i);
    }
    return out;
}

/// Plain-text instance: "Nr Nt" header, Nr channel rows of 2*Nt floats
/// (re/im interleaved), one line of 2*Nr floats (re/im interleaved rx).
inline ComplexSystemModel read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FramingError("cannot open instance file '" + path + "'");
    int nr = 0, nt = 0;
    if (!(in >> nr >> nt)) throw FramingError("instance header must be 'Nr Nt'");
    if (nr < 1 || nt < 1) throw DimensionError("instance dimensions must be positive");
    ComplexSystemModel m;
    m.channel.resize(nr, nt);
    for (int r = 0; r < nr; ++r)
        for (int t = 0; t < nt; ++t) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im))
                throw FramingError("instance channel row " + std::to_string(r) + " is incomplete");
            m.channel(r, t) = {re, im};
        }
    m.rx.resize(nr);
    for (int r = 0; r < nr; ++r) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw FramingError("instance received vector is incomplete");
        m.rx[r] = {re, im};
    }
    return m;
}

namespace detail {

struct CommonOptions {
    int nr = 128;
    int nt = 16;
    int m = 4;
    int trials = 1000;
    int iters = 0;  // 0 = tuned default for the configuration
    double rho = 0.0;
    double tau = -1.0;
    double delta = 0.0;
    std::string clamp = "auto";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string format = "csv";
    std::string out;
};

inline void add_solver_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--rho", opt.rho, "Coupling penalty weight (0 = calibrated default)");
    cmd->add_option("--tau", opt.tau, "Proximal weight (negative = calibrated default)");
    cmd->add_option("--delta", opt.delta, "Stop when the objective changes by less than this");
    cmd->add_option("--clamp", opt.clamp, "Per-sweep box projection of symbol estimates")
        ->check(CLI::IsMember({"auto", "none", "box"}));
}

inline void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_solver) {
    cmd->add_option("--nr", opt.nr, "Base-station antenna count")->check(CLI::PositiveNumber);
    cmd->add_option("--nt", opt.nt, "Single-antenna user count")->check(CLI::PositiveNumber);
    cmd->add_option("--m", opt.m, "QAM constellation size (square, per-dimension power of two)");
    cmd->add_option("--trials", opt.trials, "Symbol-vector transmissions per point");
    cmd->add_option("--seed", opt.seed, "Master seed; every trial derives its own streams")
        ->envname("PJDET_SEED");
    cmd->add_option("--threads", opt.threads, "Worker cap for trial parallelism (0 = hardware)");
    cmd->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--out", opt.out, "Report path (stdout when omitted)");
    if (with_solver) add_solver_flags(cmd, opt);
}

/// Solver config from flags: explicit values override the calibrated preset.
inline void apply_solver_flags(const CommonOptions& opt, int t_iters, SimConfig& cfg) {
    cfg.solver = tuned_solver(opt.nr, opt.nt, t_iters);
    cfg.solver_is_tuned = false;
    if (opt.rho > 0.0) cfg.solver.rho = opt.rho;
    if (opt.tau >= 0.0) cfg.solver.tau = opt.tau;
    if (opt.clamp != "auto") cfg.solver.clamp = (opt.clamp == "box") ? ClampMode::box : ClampMode::none;
    cfg.solver.tol = opt.delta;
}

inline int write_report(const CommonOptions& opt, const BerReport* ber, const TimeUnitReport* tu) {
    const auto emit = [&](std::ostream& os) {
        if (ber != nullptr) {
            if (opt.format == "json")
                write_ber_json(os, *ber);
            else
                write_ber_csv(os, *ber);
        } else {
            if (opt.format == "json")
                write_time_units_json(os, *tu);
            else
                write_time_units_csv(os, *tu);
        }
    };
    if (opt.out.empty()) {
        emit(std::cout);
        return std::cout.good() ? 0 : 1;
    }
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
        std::cerr << "pjdet: cannot open output file '" << opt.out << "'\n";
        return 1;
    }
    emit(file);
    file.flush();
    if (!file.good()) {
        std::cerr << "pjdet: failed while writing '" << opt.out << "'\n";
        return 1;
    }
    return 0;
}

}  // namespace detail

/// Entry point behind the `pjdet` binary; also callable from tests.
/// Returns the process exit status: 0 only when a complete report was
/// written.
inline int run_cli(std::vector<std::string> args) {
    CLI::App app{"Massive MIMO uplink detection experiments"};
    app.require_subcommand(1);

    detail::CommonOptions ber_opt, iter_opt, tu_opt, det_opt;
    std::string ber_snr = "12", iter_snr = "12", iter_list, tu_iters, det_detector = "pjadmm";
    std::string ber_detector = "both";
    bool tu_table1 = false;
    std::string det_instance;
    double det_sigma_v2 = -1.0;
    double det_snr_db = 12.0;

    CLI::App* ber = app.add_subcommand(
        "ber-sweep", "Monte Carlo BER versus SNR (convention: SNR = Nt / sigma_v^2)");
    detail::add_common_flags(ber, ber_opt, true);
    ber->add_option("--snr", ber_snr, "SNR points in dB: start:step:stop, comma list, or one value");
    ber->add_option("--detector", ber_detector, "Detector(s) to run")
        ->check(CLI::IsMember({"pjadmm", "mmse", "both"}));
    ber->add_option("--iters", ber_opt.iters, "Solver iteration budget (0 = reference budget)");

    CLI::App* iter = app.add_subcommand("iter-sweep", "BER versus iteration budget at one SNR");
    detail::add_common_flags(iter, iter_opt, true);
    iter->add_option("--snr", iter_snr, "SNR point in dB");
    iter->add_option("--iters", iter_list, "Budgets: start:step:stop, comma list, or one value")
        ->required();

    CLI::App* tu = app.add_subcommand("time-units", "Processing-cost model (real multiplications)");
    detail::add_common_flags(tu, tu_opt, false);
    tu->add_option("--iters", tu_iters, "Iteration budgets (defaults to the reference budget)");
    tu->add_flag("--table1", tu_table1, "Emit the full Nr=128 cost table with cited baselines");

    CLI::App* det = app.add_subcommand("detect", "Detect one received vector from an instance file");
    det->add_option("--in", det_instance, "Instance file: 'Nr Nt', Nr channel rows, rx line")->required();
    det->add_option("--detector", det_detector, "Detector")->check(CLI::IsMember({"pjadmm", "mmse"}));
    det->add_option("--snr-db", det_snr_db, "SNR in dB used to derive the noise variance");
    det->add_option("--sigma-v2", det_sigma_v2, "Noise variance per complex dimension (overrides --snr-db)");
    det->add_option("--m", det_opt.m, "QAM constellation size");
    det->add_option("--iters", det_opt.iters, "Solver iteration budget (0 = reference budget)");
    detail::add_solver_flags(det, det_opt);
    det->add_option("-o,--out", det_opt.out, "Output path (stdout when omitted)");

    try {
        std::vector<const char*> argv;
        argv.push_back("pjdet");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());

        if (ber->parsed()) {
            SimConfig cfg;
            cfg.nr = ber_opt.nr;
            cfg.nt = ber_opt.nt;
            cfg.constellation_size = ber_opt.m;
            cfg.snr_db = parse_value_list(ber_snr, "--snr");
            cfg.detector = ber_detector == "pjadmm" ? DetectorKind::pjadmm
                           : ber_detector == "mmse" ? DetectorKind::mmse
                                                    : DetectorKind::both;
            cfg.trials = ber_opt.trials;
            cfg.seed = ber_opt.seed;
            cfg.threads = ber_opt.threads;
            const int t_iters = ber_opt.iters > 0 ? ber_opt.iters : reference_iterations(cfg.nt);
            if (t_iters < 1)
                throw ParameterError("--iters: no reference budget for nt=" + std::to_string(cfg.nt) +
                                     "; pass --iters explicitly");
            detail::apply_solver_flags(ber_opt, t_iters, cfg);
            cfg.validate();
            const BerReport report = run_ber(cfg);
            return detail::write_report(ber_opt, &report, nullptr);
        }
        if (iter->parsed()) {
            SimConfig cfg;
            cfg.nr = iter_opt.nr;
            cfg.nt = iter_opt.nt;
            cfg.constellation_size = iter_opt.m;
            cfg.snr_db = parse_value_list(iter_snr, "--snr");
            cfg.detector = DetectorKind::both;
            cfg.trials = iter_opt.trials;
            cfg.seed = iter_opt.seed;
            cfg.threads = iter_opt.threads;
            const std::vector<int> t_values = parse_int_list(iter_list, "--iters");
            const bool custom = iter_opt.rho > 0.0 || iter_opt.tau >= 0.0 || iter_opt.clamp != "auto";
            if (custom) {
                detail::apply_solver_flags(iter_opt, t_values.front(), cfg);
            } else {
                cfg.solver_is_tuned = true;
                cfg.solver.tol = iter_opt.delta;
            }
            cfg.validate();
            const BerReport report = sweep_iterations(cfg, t_values);
            return detail::write_report(iter_opt, &report, nullptr);
        }
        if (tu->parsed()) {
            TimeUnitReport report;
            if (tu_table1) {
                report = table1_report();
            } else {
                std::vector<int> budgets;
                if (!tu_iters.empty()) {
                    budgets = parse_int_list(tu_iters, "--iters");
                } else {
                    const int t = reference_iterations(tu_opt.nt);
                    if (t < 1)
                        throw ParameterError("--iters: no reference budget for nt=" +
                                             std::to_string(tu_opt.nt) + "; pass --iters explicitly");
                    budgets.push_back(t);
                }
                for (int t : budgets)
                    report.rows.push_back(
                        {tu_opt.nt, tu_opt.nr, t, "pjadmm", time_units(tu_opt.nr, tu_opt.nt, t)});
            }
            return detail::write_report(tu_opt, nullptr, &report);
        }
        if (det->parsed()) {
            ComplexSystemModel instance = read_instance(det_instance);
            const Constellation c = Constellation::square_qam(det_opt.m);
            instance.noise_var = det_sigma_v2 >= 0.0
                                     ? det_sigma_v2
                                     : noise_variance_from_snr(det_snr_db, instance.nt());
            const RealSystemModel real_model = complex_to_real(instance);
            DetectionResult result;
            if (det_detector == "mmse") {
                result = mmse_detect(real_model, c);
            } else {
                const int t_iters =
                    det_opt.iters > 0 ? det_opt.iters : std::max(1, reference_iterations(instance.nt()));
                SimConfig scratch;
                scratch.nr = instance.nr();
                scratch.nt = instance.nt();
                detail::CommonOptions opt = det_opt;
                opt.nr = instance.nr();
                opt.nt = instance.nt();
                detail::apply_solver_flags(opt, t_iters, scratch);
                result = detect(real_model, c, scratch.solver);
            }
            std::ostringstream body;
            body << "soft";
            for (Eigen::Index i = 0; i < result.soft.size(); ++i) body << ' ' << format_double(result.soft[i]);
            body << "\nhard";
            for (Eigen::Index i = 0; i < result.hard.size(); ++i) body << ' ' << format_double(result.hard[i]);
            body << '\n';
            if (det_opt.out.empty()) {
                std::cout << body.str();
                return std::cout.good() ? 0 : 1;
            }
            std::ofstream file(det_opt.out, std::ios::binary);
            file << body.str();
            file.flush();
            if (!file.good()) {
                std::cerr << "pjdet: failed while writing '" << det_opt.out << "'\n";
                return 1;
            }
            return 0;
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "pjdet: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace pjdet::cli
