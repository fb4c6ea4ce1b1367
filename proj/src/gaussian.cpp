#include "idrl/gaussian.hpp"

#include <cmath>

#include "idrl/error.hpp"

namespace idrl {

namespace {
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;
}  // namespace

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& a, double scale) {
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  const int n = static_cast<int>(sym.rows());
  for (double j = kJitterStart; j <= kJitterMax * (1.0 + 1e-12); j *= 2.0) {
    JitteredCholesky out;
    out.jitter = j * scale;
    out.llt.compute(sym + out.jitter * Eigen::MatrixXd::Identity(n, n));
    if (out.llt.info() == Eigen::Success) return out;
  }
  fail(ErrorKind::numerical_failure, "covariance factorization failed after maximum jitter");
}

GaussianSampler::GaussianSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov, double scale)
    : mean_(std::move(mean)) {
  const int n = static_cast<int>(mean_.size());
  if (cov.rows() != n || cov.cols() != n) fail(ErrorKind::invalid_input, "covariance shape mismatch");
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sym);
  const double tol = 1e-9 * scale;
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() >= -tol).all()) {
    // pivots at jitter level are numerical residue of exactly known directions
    const Eigen::VectorXd d = ldlt.vectorD().unaryExpr([tol](double x) { return x > tol ? std::sqrt(x) : 0.0; });
    Eigen::MatrixXd l = ldlt.matrixL();
    // sym = Pᵀ L D Lᵀ P
    factor_ = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
    return;
  }
  const JitteredCholesky chol = jittered_cholesky(sym, scale);
  factor_ = chol.llt.matrixL();
}

Eigen::VectorXd GaussianSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (int i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  return mean_ + factor_ * z;
}

double gaussian_log_density_unnormalized(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& cov, double scale) {
  const JitteredCholesky chol = jittered_cholesky(cov, scale);
  const Eigen::VectorXd diff = x - mean;
  const Eigen::VectorXd w = chol.llt.matrixL().solve(diff);
  return -0.5 * w.squaredNorm();
}

}  // namespace idrl
