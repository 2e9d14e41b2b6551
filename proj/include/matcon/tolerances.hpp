#pragma once

namespace matcon {

/// Every numeric threshold used by the library, in one place.
///
/// Relative thresholds are scaled by max(1, magnitude) of the quantity being
/// tested, so rescaled inputs see the same decisions.
template <typename Scalar = double>
struct Tolerances {
  /// max|W - W^T| <= symmetry * max(1, max|W|)
  Scalar symmetry = Scalar(1e-12);
  /// Eigenvalue threshold for PD/PSD/Zero classification of edge weights.
  Scalar definiteness = Scalar(1e-12);
  /// lambda counts as zero iff lambda <= null_space * max(1, lambda_max).
  Scalar null_space = Scalar(1e-9);
  /// Reconstruction / orthonormality checks of eigendecompositions.
  Scalar eigen = Scalar(1e-10);
  /// mu_{d+1} < 1 - mu counts as contracting.
  Scalar mu = Scalar(1e-9);
  /// V(t_{s+1}) <= V(t_s) + monotone * V(0)
  Scalar monotone = Scalar(1e-10);
  /// Relative drift allowed on the blockwise mean.
  Scalar mean = Scalar(1e-10);
  /// Largest accepted deviation between exact propagation and the RK4 oracle.
  Scalar oracle = Scalar(1e-6);
};

}  // namespace matcon
