#include "idrl/kernel.hpp"

#include <cmath>
#include <string>

#include "idrl/error.hpp"

namespace idrl {

void validate_kernel(const KernelSpec& kernel) {
  if (!(kernel.variance > 0.0)) fail(ErrorKind::invalid_configuration, "kernel variance must be positive", "kernel.variance");
  switch (kernel.kind) {
    case KernelKind::se_graph:
      if (!(kernel.lengthscale > 0.0))
        fail(ErrorKind::invalid_configuration, "kernel lengthscale must be positive", "kernel.lengthscale");
      break;
    case KernelKind::linear_features:
      if (!kernel.feature_map)
        fail(ErrorKind::invalid_configuration, "linear_features kernel requires a feature map", "kernel.feature_map");
      if (!(kernel.feature_map->precision > 0.0))
        fail(ErrorKind::invalid_configuration, "feature prior precision must be positive", "kernel.feature_map");
      if (kernel.feature_map->phi.cols() < 1 || !kernel.feature_map->phi.allFinite())
        fail(ErrorKind::invalid_configuration, "feature map must be finite with d >= 1", "kernel.feature_map");
      break;
    case KernelKind::object_type:
      break;
  }
}

double kernel_eval(const KernelSpec& kernel, int s, int s2, const StateGeometry& geometry) {
  switch (kernel.kind) {
    case KernelKind::se_graph: {
      if (geometry.hop_distance.rows() <= std::max(s, s2))
        fail(ErrorKind::invalid_configuration, "se_graph kernel requires hop distances for every state");
      const double d = geometry.hop_distance(s, s2);
      return kernel.variance * std::exp(-d * d / (2.0 * kernel.lengthscale * kernel.lengthscale));
    }
    case KernelKind::object_type: {
      if (static_cast<int>(geometry.object_type.size()) <= std::max(s, s2))
        fail(ErrorKind::invalid_configuration, "object_type kernel requires object types for every state");
      const int a = geometry.object_type[s];
      return (a >= 0 && a == geometry.object_type[s2]) ? kernel.variance : 0.0;
    }
    case KernelKind::linear_features: {
      if (!kernel.feature_map)
        fail(ErrorKind::invalid_configuration, "linear_features kernel requires a feature map", "kernel.feature_map");
      const auto& fm = *kernel.feature_map;
      return fm.phi.row(s).dot(fm.phi.row(s2)) / fm.precision;
    }
  }
  return 0.0;
}

Eigen::MatrixXd prior_covariance(const KernelSpec& kernel, const StateGeometry& geometry) {
  validate_kernel(kernel);
  const int n = geometry.num_states;
  if (kernel.kind == KernelKind::linear_features) {
    const auto& fm = *kernel.feature_map;
    if (fm.phi.rows() != n) fail(ErrorKind::invalid_configuration, "feature map has wrong number of rows");
    return fm.phi * fm.phi.transpose() / fm.precision;
  }
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) k(i, j) = k(j, i) = kernel_eval(kernel, i, j, geometry);
  if (kernel.kind == KernelKind::se_graph && n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    if (es.info() != Eigen::Success) fail(ErrorKind::numerical_failure, "kernel eigendecomposition failed");
    if (es.eigenvalues().minCoeff() < -1e-9 * kernel.variance) {
      const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
      k = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
      k = 0.5 * (k + k.transpose()).eval();
    }
  }
  return k;
}

}  // namespace idrl
