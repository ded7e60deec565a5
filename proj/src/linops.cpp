#include "splitfeas/linops.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "splitfeas/errors.hpp"

namespace splitfeas::linops {

namespace {

// Scale-invariant rank decision for "AA^T > 0".
constexpr double kPosDefRatio = 1e-10;

[[noreturn]] void throw_length_mismatch(const char* op, Eigen::Index expected, Eigen::Index got) {
  std::ostringstream msg;
  msg << op << ": vector length " << got << " does not match map dimension " << expected;
  throw DimensionError(msg.str());
}

}  // namespace

LinearMap::LinearMap(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw std::invalid_argument("LinearMap: rows and cols must be positive");
  }
  if (!entries_.allFinite()) {
    throw std::invalid_argument("LinearMap: entries must be finite (no NaN/Inf)");
  }
}

LinearMap LinearMap::from_row_major(Eigen::Index rows, Eigen::Index cols,
                                    const std::vector<double>& entries) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("LinearMap: rows and cols must be positive");
  }
  if (static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    std::ostringstream msg;
    msg << "LinearMap: entry count " << entries.size() << " != rows*cols = " << rows * cols;
    throw DimensionError(msg.str());
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = entries[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return LinearMap(std::move(m));
}

Eigen::VectorXd apply(const LinearMap& map, const Eigen::VectorXd& x) {
  if (x.size() != map.cols()) throw_length_mismatch("apply", map.cols(), x.size());
  return map.entries() * x;
}

Eigen::VectorXd apply_adjoint(const LinearMap& map, const Eigen::VectorXd& y) {
  if (y.size() != map.rows()) throw_length_mismatch("apply_adjoint", map.rows(), y.size());
  return map.entries().transpose() * y;
}

SpectralSummary spectral_summary(const LinearMap& map, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_summary: tol must be positive");

  const Eigen::Index m = map.rows();
  const Eigen::Index n = map.cols();
  const Eigen::MatrixXd& a = map.entries();

  // Eigendecompose the smaller Gram matrix; both Gram matrices share the
  // nonzero spectrum, the larger one padded with |m - n| zeros.
  Eigen::MatrixXd gram;
  if (n <= m) {
    gram = a.transpose() * a;
  } else {
    gram = a * a.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("spectral_summary: symmetric eigensolver failed to converge");
  }
  Eigen::VectorXd ev = eig.eigenvalues();  // ascending
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], 0.0);

  const double small_min = ev[0];
  const double small_max = ev[ev.size() - 1];

  SpectralSummary s;
  s.gram_lambda_max = small_max;
  s.gram_lambda_min = (n <= m) ? small_min : 0.0;
  s.rowgram_lambda_min = (m <= n) ? small_min : 0.0;
  if (m == n) {
    s.gram_lambda_min = small_min;
    s.rowgram_lambda_min = small_min;
  }
  s.operator_norm = std::sqrt(s.gram_lambda_max);
  s.gram_condition = s.gram_lambda_min > 0.0
                         ? s.gram_lambda_max / s.gram_lambda_min
                         : std::numeric_limits<double>::infinity();
  return s;
}

RequirementReport check_table_requirements(const SpectralSummary& summary, AlgorithmId algorithm,
                                           NMode n_mode) {
  RequirementReport report;
  if (algorithm != AlgorithmId::WPADMM_SF4) {
    report.requirements = "None";
    return report;
  }

  const bool linearized = n_mode == NMode::Linearized;
  report.requirements = linearized ? "AA^T > 0, kappa(A^T A) < 2" : "AA^T > 0";

  if (!(summary.rowgram_lambda_min > kPosDefRatio * summary.gram_lambda_max)) {
    report.violations.push_back("AA^T > 0 fails: lambda_min(AA^T) = " +
                                std::to_string(summary.rowgram_lambda_min));
  }
  if (linearized && !(summary.gram_condition < 2.0)) {
    report.violations.push_back("kappa(A^T A) < 2 fails: kappa = " +
                                std::to_string(summary.gram_condition));
  }
  report.satisfied = report.violations.empty();
  return report;
}

}  // namespace splitfeas::linops
