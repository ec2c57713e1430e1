#pragma once

#include <Eigen/Dense>

#include "pjdet/decomp.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/model.hpp"
#include "pjdet/pjadmm.hpp"

namespace pjdet {

/// Joint minimizer of one block's proximal subproblem in (x_i, contrib_i).
struct BlockSolution {
    double x = 0.0;
    Eigen::VectorXd contrib;
};

/// Value of block i's proximal subproblem at (x, contrib), assembled term by
/// term from its definition:
///
///   ||contrib - h x||^2 - dual . contrib
///   + (rho/2) sum_k (rx_k - contrib_k - others_k)^2
///   + (tau/2) (x - x_old)^2 + (tau/2) ||contrib - contrib_old||^2
///
/// where `others` are the snapshot contributions of every other block.
inline double subproblem_objective(Eigen::Index i, const DetectorState& snap, const RealSystemModel& m,
                                   const PjadmmConfig& cfg, double x, const Eigen::VectorXd& contrib) {
    detail::check_state_dims(snap, m);
    const auto h = m.channel.col(i);
    const Eigen::VectorXd others = detail::contribution_row_sums(snap.contrib) - snap.contrib.col(i);
    double value = (contrib - h * x).squaredNorm();
    value -= snap.duals.dot(contrib);
    value += 0.5 * cfg.rho * (m.rx - contrib - others).squaredNorm();
    value += 0.5 * cfg.tau * (x - snap.x[i]) * (x - snap.x[i]);
    value += 0.5 * cfg.tau * (contrib - snap.contrib.col(i)).squaredNorm();
    return value;
}

/// Validation path for the closed-form block updates: assembles the
/// subproblem's full (2Nr+1)-dimensional stationarity system and solves it
/// with a dense factorization. Intended for tests; the production updates
/// never form or solve a linear system.
inline BlockSolution subproblem_oracle(Eigen::Index i, const DetectorState& snap, const RealSystemModel& m,
                                       const PjadmmConfig& cfg) {
    detail::check_state_dims(snap, m);
    cfg.validate();
    const auto h = m.channel.col(i);
    const Eigen::Index n = m.rows();
    const Eigen::VectorXd others = detail::contribution_row_sums(snap.contrib) - snap.contrib.col(i);

    // Gradient of each objective term, row by row: unknowns z = [contrib; x].
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        lhs(k, k) = 2.0 + cfg.rho + cfg.tau;
        lhs(k, n) = -2.0 * h[k];
        lhs(n, k) = -2.0 * h[k];
        rhs[k] = snap.duals[k] + cfg.rho * (m.rx[k] - others[k]) + cfg.tau * snap.contrib(k, i);
    }
    lhs(n, n) = 2.0 * h.squaredNorm() + cfg.tau;
    rhs[n] = cfg.tau * snap.x[i];

    const Eigen::LDLT<Eigen::MatrixXd> factor(lhs);
    if (factor.info() != Eigen::Success)
        throw DegenerateColumnError("block subproblem stationarity system is not positive definite");
    const Eigen::VectorXd z = factor.solve(rhs);

    BlockSolution out;
    out.contrib = z.head(n);
    out.x = z[n];
    return out;
}

}  // namespace pjdet
