#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "splitfeas/algorithms.hpp"

namespace splitfeas::linops {

/// Dense linear map A : R^n -> R^m. Entries are validated to be finite at
/// construction and immutable afterwards, so instances can be shared freely
/// across threads.
class LinearMap {
public:
  explicit LinearMap(Eigen::MatrixXd entries);

  /// Builds from a row-major flat buffer (the on-disk layout).
  static LinearMap from_row_major(Eigen::Index rows, Eigen::Index cols,
                                  const std::vector<double>& entries);

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const { return entries_; }

private:
  Eigen::MatrixXd entries_;
};

/// Eigen-extremes of the two Gram matrices of A.
struct SpectralSummary {
  double gram_lambda_max = 0.0;     // lambda_max(A^T A)
  double gram_lambda_min = 0.0;     // lambda_min(A^T A)
  double gram_condition = 0.0;      // kappa(A^T A); +inf when singular
  double rowgram_lambda_min = 0.0;  // lambda_min(A A^T)
  double operator_norm = 0.0;       // ||A|| = sqrt(lambda_max(A^T A))
};

/// y = A x.
Eigen::VectorXd apply(const LinearMap& map, const Eigen::VectorXd& x);

/// x = A^T y.
Eigen::VectorXd apply_adjoint(const LinearMap& map, const Eigen::VectorXd& y);

/// Full symmetric eigendecomposition of the smaller Gram matrix; the larger
/// side's spectrum is the same set padded with zeros. `tol` is the requested
/// relative accuracy; the dense solver delivers near machine precision and the
/// call fails loudly if it does not converge.
SpectralSummary spectral_summary(const LinearMap& map, double tol = 1e-10);

/// Advisory verdict against the per-algorithm requirements on A.
struct RequirementReport {
  std::string requirements;             // human-readable requirement text, "None" when unrestricted
  std::vector<std::string> violations;  // empty when satisfied
  bool satisfied = true;
};

/// Requirements column: WPADMM_SF4 needs AA^T positive definite, and in
/// Linearized mode additionally kappa(A^T A) < 2. Every other algorithm is
/// unrestricted. Positive definiteness uses the scale-invariant threshold
/// lambda_min(AA^T) > 1e-10 * lambda_max(AA^T).
RequirementReport check_table_requirements(const SpectralSummary& summary, AlgorithmId algorithm,
                                           NMode n_mode = NMode::ProxIdentity);

}  // namespace splitfeas::linops
