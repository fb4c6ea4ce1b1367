#pragma once

#include <Eigen/Dense>

#include "idrl/rng.hpp"

namespace idrl {

/// Cholesky factor of a symmetric PSD matrix plus the jitter that was needed.
/// Jitter starts at 1e-10·scale on the diagonal and doubles up to 1e-6·scale.
struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& a, double scale);

/// Draws from N(mean, cov). Factorizes once with pivoted LDLᵀ so exactly
/// singular covariances (known states) produce exactly the mean there. Pivots
/// below 1e-9·scale are treated as zero. Falls
/// back to jittered Cholesky if the pivoted factor has clearly negative pivots.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov, double scale);

  Eigen::VectorXd draw(Rng& rng) const;
  int dimension() const { return static_cast<int>(mean_.size()); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;  // cov = factor * factorᵀ
};

/// -½ (x−μ)ᵀ (Σ + jitter·I)⁻¹ (x−μ), without the normalizing constant.
double gaussian_log_density_unnormalized(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& cov, double scale);

}  // namespace idrl
