#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pjdet/constellation.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/model.hpp"

namespace pjdet {

/// Iterate of the decomposed detection problem. Column i of `contrib` is the
/// running estimate of symbol i's contribution to the received vector; the
/// coupling constraint is that the columns sum to the received vector.
struct DetectorState {
    Eigen::VectorXd x;        // 2Nt symbol estimates
    Eigen::MatrixXd contrib;  // 2Nr x 2Nt contribution columns
    Eigen::VectorXd duals;    // 2Nr multipliers of the coupling constraint
    int iter = 0;
    std::vector<double> objective_trace;  // objective value after each sweep
};

namespace detail {

inline void check_state_dims(const DetectorState& s, const RealSystemModel& m) {
    if (s.x.size() != m.cols() || s.contrib.rows() != m.rows() || s.contrib.cols() != m.cols() ||
        s.duals.size() != m.rows())
        throw DimensionError("detector state does not match model dimensions");
}

/// Row sums of the contribution matrix, evaluated in a fixed column order so
/// every caller sees bit-identical values.
inline Eigen::VectorXd contribution_row_sums(const Eigen::MatrixXd& contrib) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(contrib.rows());
    for (Eigen::Index j = 0; j < contrib.cols(); ++j) sums += contrib.col(j);
    return sums;
}

}  // namespace detail

/// All-zero iterate (the solver's starting point).
inline DetectorState init_state(const RealSystemModel& m) {
    if (m.nr < 1 || m.nt < 1 || m.channel.rows() != m.rows() || m.channel.cols() != m.cols() ||
        m.rx.size() != m.rows())
        throw DimensionError("inconsistent real model dimensions");
    DetectorState s;
    s.x = Eigen::VectorXd::Zero(m.cols());
    s.contrib = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    s.duals = Eigen::VectorXd::Zero(m.rows());
    return s;
}

/// Decomposed objective: sum over blocks of || contrib_i - h_i x_i ||^2.
inline double objective_value(const DetectorState& s, const RealSystemModel& m) {
    detail::check_state_dims(s, m);
    double total = 0.0;
    for (Eigen::Index i = 0; i < m.cols(); ++i)
        total += (s.contrib.col(i) - m.channel.col(i) * s.x[i]).squaredNorm();
    return total;
}

/// Coupling-constraint violation || rx - sum_i contrib_i ||_2.
inline double primal_residual(const DetectorState& s, const RealSystemModel& m) {
    detail::check_state_dims(s, m);
    return (m.rx - detail::contribution_row_sums(s.contrib)).norm();
}

/// First-order optimality residuals of the relaxed problem, evaluated in the
/// interior regime (box multipliers zero). Per-entry conditions are reported
/// in max norm.
struct KktResidual {
    double stationarity_y = 0.0;   // contrib_i(k) = h_i(k) x_i + dual(k)/2
    double dual_consistency = 0.0; // dual(k) = (rx - Hx)(k) / Nt
    double stationarity_x = 0.0;   // 2 x_i ||h_i||^2 = 2 h_i . contrib_i
    double box_violation = 0.0;    // max(0, |x_i| - l)
    Eigen::VectorXd mu_upper;      // multipliers of x_i <= l (zero here)
    Eigen::VectorXd mu_lower;      // multipliers of -l <= x_i (zero here)
};

inline KktResidual kkt_residual(const DetectorState& s, const RealSystemModel& m, const Constellation& c) {
    detail::check_state_dims(s, m);
    KktResidual r;
    r.mu_upper = Eigen::VectorXd::Zero(m.cols());
    r.mu_lower = Eigen::VectorXd::Zero(m.cols());

    const Eigen::VectorXd matched = m.channel * s.x;
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double lhs = s.duals[k] - (m.rx[k] - matched[k]) / static_cast<double>(m.nt);
        r.dual_consistency = std::max(r.dual_consistency, std::abs(lhs));
    }
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        const auto h = m.channel.col(i);
        const auto yi = s.contrib.col(i);
        r.stationarity_y =
            std::max(r.stationarity_y, (yi - h * s.x[i] - s.duals / 2.0).cwiseAbs().maxCoeff());
        r.stationarity_x =
            std::max(r.stationarity_x, std::abs(2.0 * s.x[i] * h.squaredNorm() - 2.0 * h.dot(yi)));
        r.box_violation = std::max(r.box_violation, std::max(0.0, std::abs(s.x[i]) - c.box_bound()));
    }
    return r;
}

}  // namespace pjdet
