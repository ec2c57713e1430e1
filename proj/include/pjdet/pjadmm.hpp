#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pjdet/constellation.hpp"
#include "pjdet/decomp.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/model.hpp"

namespace pjdet {

/// Whether block updates project the symbol estimate onto the box
/// [-l, l] each sweep. The solver's fixed point is interior for the
/// instances of interest, so `none` is the analytic default; `box` bounds
/// transient overshoot and is useful at low SNR.
enum class ClampMode { none, box };

/// Solver parameters.
///
/// rho weighs the coupling-constraint penalty, tau the proximal terms that
/// keep each parallel block update near its previous value. Stability of the
/// parallel sweep requires tau on the order of rho * (blocks - 1); with that
/// ratio fixed, smaller rho converges faster until dual progress stalls.
/// defaults_for() encodes the calibrated compromise.
struct PjadmmConfig {
    double rho = 0.0125;
    double tau = 0.09375;
    double tol = 0.0;     // stop when |V_t - V_{t-1}| < tol
    int max_iters = 200;  // hard iteration budget
    ClampMode clamp = ClampMode::none;

    void validate() const {
        if (!(rho > 0.0)) throw ParameterError("rho must be positive");
        if (!(tau >= 0.0)) throw ParameterError("tau must be nonnegative");
        if (!(tol >= 0.0)) throw ParameterError("tol must be nonnegative");
        if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
    }

    /// Stable general-purpose parameters for a problem with `two_nt` blocks:
    /// rho = 0.2 / blocks and tau at half the classic sufficient bound
    /// rho * (blocks - 1).
    static PjadmmConfig defaults_for(int two_nt, int max_iters = 200) {
        if (two_nt < 1) throw DimensionError("block count must be positive");
        PjadmmConfig cfg;
        cfg.rho = 0.2 / static_cast<double>(two_nt);
        cfg.tau = 0.5 * cfg.rho * static_cast<double>(two_nt - 1);
        cfg.max_iters = max_iters;
        return cfg;
    }
};

/// Output of a detection run.
struct DetectionResult {
    Eigen::VectorXd soft;  // 2Nt estimates before quantization
    Eigen::VectorXd hard;  // nearest alphabet levels
    int iterations_used = 0;
    bool converged = false;  // tolerance fired within the budget
    std::vector<double> trace;
    std::optional<KktResidual> final_kkt;
};

namespace detail {

// Right-hand contribution seen by block i at receive dimension k, with all
// values taken from the previous sweep's snapshot:
//   c_k = dual_k + rho * (rx_k - sum_{j != i} contrib_j(k)) + tau * contrib_i(k).
// Every code path evaluates it through this helper with an identical
// operation order, so parallel sweeps, sequential sweeps, and the public
// per-block functions agree bit for bit.
inline double block_rhs(double dual, double rho, double tau, double rx, double row_sum, double own) {
    const double others = row_sum - own;
    return dual + rho * (rx - others) + tau * own;
}

inline double x_update_core(Eigen::Index i, const DetectorState& snap, const RealSystemModel& m,
                            const PjadmmConfig& cfg, const Eigen::VectorXd& row_sums, double box_bound) {
    const auto h = m.channel.col(i);
    const double shrink = 2.0 / (2.0 + cfg.rho + cfg.tau);
    const double col_energy = h.squaredNorm();
    const double denom = 2.0 * col_energy * (1.0 - shrink) + cfg.tau;
    if (!(denom > 0.0))
        throw DegenerateColumnError("channel column " + std::to_string(i) +
                                    " is zero and tau is zero; block subproblem is degenerate");
    double corr = 0.0;
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        corr += h[k] * block_rhs(snap.duals[k], cfg.rho, cfg.tau, m.rx[k], row_sums[k], snap.contrib(k, i));
    double xi = (shrink * corr + cfg.tau * snap.x[i]) / denom;
    if (cfg.clamp == ClampMode::box) xi = std::clamp(xi, -box_bound, box_bound);
    return xi;
}

inline void y_update_core(Eigen::Index i, double x_new, const DetectorState& snap, const RealSystemModel& m,
                          const PjadmmConfig& cfg, const Eigen::VectorXd& row_sums, double* out) {
    const auto h = m.channel.col(i);
    const double inv = 1.0 / (2.0 + cfg.rho + cfg.tau);
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double rhs = block_rhs(snap.duals[k], cfg.rho, cfg.tau, m.rx[k], row_sums[k], snap.contrib(k, i));
        out[k] = inv * (2.0 * h[k] * x_new + rhs);
    }
}

}  // namespace detail

/// Symbol update for block i: the x component of the joint minimizer of the
/// block's proximal subproblem, all inputs read from the previous sweep.
/// With S = ||h_i||^2, a = 2/(2+rho+tau) and c_k as in detail::block_rhs,
///
///   x_i = (a * sum_k h_i(k) c_k + tau * x_i_old) / (2 S (1 - a) + tau).
///
/// In box mode the result is projected onto [-box_bound, box_bound].
inline double update_x_block(Eigen::Index i, const DetectorState& snap, const RealSystemModel& m,
                             const PjadmmConfig& cfg,
                             double box_bound = std::numeric_limits<double>::infinity()) {
    detail::check_state_dims(snap, m);
    cfg.validate();
    const Eigen::VectorXd row_sums = detail::contribution_row_sums(snap.contrib);
    return detail::x_update_core(i, snap, m, cfg, row_sums, box_bound);
}

/// Contribution update for block i given this sweep's x_i:
///   contrib_i(k) = (2 h_i(k) x_i + c_k) / (2 + rho + tau).
inline Eigen::VectorXd update_y_block(Eigen::Index i, double x_new, const DetectorState& snap,
                                      const RealSystemModel& m, const PjadmmConfig& cfg) {
    detail::check_state_dims(snap, m);
    cfg.validate();
    const Eigen::VectorXd row_sums = detail::contribution_row_sums(snap.contrib);
    Eigen::VectorXd out(m.rows());
    detail::y_update_core(i, x_new, snap, m, cfg, row_sums, out.data());
    return out;
}

/// Dual ascent on the coupling constraint using the freshly updated
/// contribution columns: dual_k += rho * (rx_k - sum_i contrib_i(k)).
inline Eigen::VectorXd update_duals(const DetectorState& with_new_contrib, const RealSystemModel& m,
                                    const PjadmmConfig& cfg) {
    detail::check_state_dims(with_new_contrib, m);
    cfg.validate();
    const Eigen::VectorXd row_sums = detail::contribution_row_sums(with_new_contrib.contrib);
    return with_new_contrib.duals + cfg.rho * (m.rx - row_sums);
}

namespace detail {

// One sweep without trace bookkeeping; returns the new objective value.
inline double iterate_into(const DetectorState& snap, const RealSystemModel& m, const PjadmmConfig& cfg,
                           double box_bound, DetectorState& next) {
    const Eigen::VectorXd row_sums = contribution_row_sums(snap.contrib);
    next.x.resize(m.cols());
    next.contrib.resize(m.rows(), m.cols());

    // Every block reads only the snapshot (plus its own new x), so the loop
    // is order-independent and safe to run on any number of workers.
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        const double xi = x_update_core(i, snap, m, cfg, row_sums, box_bound);
        next.x[i] = xi;
        y_update_core(i, xi, snap, m, cfg, row_sums, next.contrib.col(i).data());
    }

    const Eigen::VectorXd new_sums = contribution_row_sums(next.contrib);
    next.duals = snap.duals + cfg.rho * (m.rx - new_sums);

    double objective = 0.0;
    for (Eigen::Index i = 0; i < m.cols(); ++i)
        objective += (next.contrib.col(i) - m.channel.col(i) * next.x[i]).squaredNorm();

    next.iter = snap.iter + 1;
    return objective;
}

}  // namespace detail

/// One full sweep: all symbol blocks from the snapshot, all contribution
/// blocks from their own new x_i, then the dual update and the objective
/// trace entry. The result is bit-identical to a sequential loop over the
/// public per-block functions.
inline DetectorState iterate(const DetectorState& snap, const RealSystemModel& m, const PjadmmConfig& cfg,
                             double box_bound = std::numeric_limits<double>::infinity()) {
    detail::check_state_dims(snap, m);
    cfg.validate();
    DetectorState next;
    const double objective = detail::iterate_into(snap, m, cfg, box_bound, next);
    next.objective_trace = snap.objective_trace;
    next.objective_trace.push_back(objective);
    return next;
}

/// Runs the solver from the all-zero state until the objective settles
/// (|V_t - V_{t-1}| < tol) or the iteration budget is spent, then hard
/// quantizes. The budget counts as spent at iter == max_iters, so max_iters
/// is the exact sweep count of a tolerance-free run.
inline DetectionResult detect(const RealSystemModel& m, const Constellation& c, const PjadmmConfig& cfg) {
    cfg.validate();
    const double box_bound = c.box_bound();
    DetectorState state = init_state(m);
    DetectorState scratch = state;
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.max_iters));
    bool converged = false;
    double previous = 0.0;  // objective of the all-zero state
    for (int t = 0; t < cfg.max_iters; ++t) {
        const double current = detail::iterate_into(state, m, cfg, box_bound, scratch);
        std::swap(state, scratch);
        trace.push_back(current);
        if (std::abs(current - previous) < cfg.tol) {
            converged = true;
            break;
        }
        previous = current;
    }
    DetectionResult result;
    result.soft = state.x;
    result.hard = quantize(state.x, c);
    result.iterations_used = state.iter;
    result.converged = converged;
    result.final_kkt = kkt_residual(state, m, c);
    result.trace = std::move(trace);
    return result;
}

}  // namespace pjdet
