#pragma once

#include <stdexcept>

namespace pjdet {

/// Shape or size mismatch between related objects.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input stream or bit vector does not divide into whole frames/symbols.
struct FramingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numeric parameter is outside its documented range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A channel column is identically zero while the proximal weight is zero,
/// so the per-block subproblem has no unique minimizer.
struct DegenerateColumnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The normal matrix is not positive definite (rank-deficient channel with
/// zero regularization).
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pjdet
