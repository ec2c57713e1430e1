#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "pjdet/constellation.hpp"
#include "pjdet/errors.hpp"
#include "pjdet/model.hpp"
#include "pjdet/pjadmm.hpp"

namespace pjdet {

/// Normal-equations workspace for the linear MMSE detector. The regularized
/// Gram matrix is solved through a Cholesky factorization; no inverse is
/// formed.
struct MmseWorkspace {
    Eigen::MatrixXd gram;  // H^T H + sigma2 I
    Eigen::LLT<Eigen::MatrixXd> factor;

    MmseWorkspace(const RealSystemModel& m, double sigma2) {
        if (sigma2 < 0.0) throw ParameterError("noise variance must be nonnegative");
        gram = m.channel.transpose() * m.channel;
        gram.diagonal().array() += sigma2;
        factor.compute(gram);
        if (factor.info() != Eigen::Success)
            throw SingularityError("normal matrix is not positive definite (rank-deficient channel with zero regularization)");
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& matched) const { return factor.solve(matched); }
};

/// Exact linear MMSE detection: soft = (H^T H + sigma2 I)^{-1} H^T rx
/// followed by hard quantization. sigma2 is the per-real-dimension noise
/// variance, matching RealSystemModel::sigma2.
inline DetectionResult mmse_detect(const RealSystemModel& m, const Constellation& c, double sigma2) {
    MmseWorkspace workspace(m, sigma2);
    DetectionResult result;
    result.soft = workspace.solve(m.channel.transpose() * m.rx);
    result.hard = quantize(result.soft, c);
    result.iterations_used = 0;
    result.converged = true;
    return result;
}

inline DetectionResult mmse_detect(const RealSystemModel& m, const Constellation& c) {
    return mmse_detect(m, c, m.sigma2);
}

}  // namespace pjdet
