#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "idrl/gaussian.hpp"
#include "idrl/kernel.hpp"
#include "idrl/mdp.hpp"
#include "idrl/query.hpp"

namespace idrl {

struct Observation {
  LinearRewardQuery query;
  double response = 0.0;
};

struct ReturnBelief {
  double mean = 0.0;
  double variance = 0.0;
};

/// A linear functional v of the reward together with Σv, so that many
/// candidate queries can be scored against it cheaply.
struct FunctionalProbe {
  Vector v;
  Vector sigma_v;
  ReturnBelief belief;
};

/// Exact GP posterior over the reward of every state, with a zero-mean prior
/// and observations y = cᵀr + ε, ε ~ N(0, σ_n²).
///
/// The posterior over all states is materialized on construction. Values are
/// immutable; `condition` returns a new model sharing the prior.
class GpRewardModel {
 public:
  GpRewardModel(std::shared_ptr<const Matrix> prior_cov, double noise_std, double jitter_scale,
                std::vector<Observation> dataset = {});

  static GpRewardModel from_kernel(const KernelSpec& kernel, const StateGeometry& geometry, double noise_std);

  /// Throws degenerate-query when σ_n = 0 and the query carries no information
  /// beyond what is already known.
  GpRewardModel condition(const LinearRewardQuery& query, double y) const;
  bool is_degenerate(const LinearRewardQuery& query) const;

  int num_states() const { return static_cast<int>(mean_.size()); }
  double noise_std() const { return noise_std_; }
  double noise_variance() const { return noise_std_ * noise_std_; }
  double jitter_scale() const { return jitter_scale_; }
  const std::vector<Observation>& dataset() const { return dataset_; }
  const Matrix& prior_covariance() const { return *prior_; }

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  std::pair<Vector, Matrix> predict(std::span<const int> states) const;

  ReturnBelief functional_belief(const Vector& v) const;
  ReturnBelief return_diff_belief(const VisitationVector& nu1, const VisitationVector& nu2) const;
  FunctionalProbe probe(const Vector& v) const;

  /// Var[⟨v, r̂⟩ | D ∪ {(q, ŷ)}]; independent of ŷ.
  double variance_after_query(const Vector& v, const LinearRewardQuery& query) const;
  double variance_after_query(const FunctionalProbe& probe, const LinearRewardQuery& query) const;
  /// nullopt instead of throwing on degenerate queries.
  std::optional<double> try_variance_after_query(const FunctionalProbe& probe, const LinearRewardQuery& query) const;

  /// cᵀμ and cᵀΣc (latent, without noise).
  double response_mean(const LinearRewardQuery& query) const;
  double latent_variance(const LinearRewardQuery& query) const;
  /// Var[ŷ | D, q] = cᵀΣc + σ_n².
  double response_variance(const LinearRewardQuery& query) const;
  /// Posterior mean after observing (q, y), by a rank-one update.
  Vector mean_after(const LinearRewardQuery& query, double y) const;

  GaussianSampler sampler() const;
  Vector sample_reward(Rng& rng) const;

 private:
  Vector sigma_times(const LinearRewardQuery& query) const;
  double prior_latent_variance(const LinearRewardQuery& query) const;

  std::shared_ptr<const Matrix> prior_;
  double noise_std_;
  double jitter_scale_;
  std::vector<Observation> dataset_;
  Vector mean_;
  Matrix cov_;
};

/// Differential entropy of a Gaussian with the given variance; −∞ at 0.
double gaussian_entropy(double variance);
/// Entropy before − entropy after; +∞ when the target becomes known.
double information_gain(double variance_before, double variance_after);

struct TlbCheck {
  double gp_variance;
  double tlb_variance;
};

/// Posterior variance of ⟨Δν, r⟩ after the dataset plus `query`, computed two
/// ways: through a GP with the linear feature kernel (weight prior
/// N(0, σ_n²/α · I)), and as σ_n² · Δν_φᵀ (αI + A)⁻¹ Δν_φ with
/// A = Σ_i φ(q_i) φ(q_i)ᵀ, φ(q) = Φᵀc and Δν_φ = Φᵀ Δν.
TlbCheck tlb_variance_check(const LinearFeatureMap& fmap, std::span<const LinearRewardQuery> dataset,
                            const Vector& delta_nu, const LinearRewardQuery& query, double noise_std);

}  // namespace idrl
