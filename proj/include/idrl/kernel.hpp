#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace idrl {

/// Linear reward features φ(s) stacked row-wise, with prior precision α of the
/// weight vector (θ ~ N(0, α⁻¹ I)).
struct LinearFeatureMap {
  Eigen::MatrixXd phi;
  double precision = 1.0;
};

enum class KernelKind { se_graph, object_type, linear_features };

struct KernelSpec {
  KernelKind kind = KernelKind::se_graph;
  double variance = 1.0;     ///< σ²; also the jitter scale for Gram factorizations
  double lengthscale = 1.0;  ///< se_graph only
  std::shared_ptr<const LinearFeatureMap> feature_map;  ///< linear_features only
};

/// What a kernel needs to know about the state space.
struct StateGeometry {
  int num_states = 0;
  Eigen::MatrixXd hop_distance;  ///< graph hop counts; empty when not a graph env
  std::vector<int> object_type;  ///< -1 for floor; empty when not a grid env
};

void validate_kernel(const KernelSpec& kernel);

/// se_graph: σ² exp(−d²/(2l²)) on hop distance; object_type: σ² if both states
/// hold the same object type (floor never matches); linear_features:
/// ⟨φ(s), φ(s')⟩ / α.
double kernel_eval(const KernelSpec& kernel, int s, int s2, const StateGeometry& geometry);

/// Gram matrix over all states. SE on graph hop distance is not positive
/// semidefinite on every graph; an indefinite se_graph Gram is replaced by its
/// nearest PSD matrix (negative eigenvalues clipped to zero).
Eigen::MatrixXd prior_covariance(const KernelSpec& kernel, const StateGeometry& geometry);

}  // namespace idrl
