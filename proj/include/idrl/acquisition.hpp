#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "idrl/gp_model.hpp"
#include "idrl/mdp.hpp"
#include "idrl/query.hpp"

namespace idrl {

enum class Acquisition { idrl, uniform, igr, eir, epd, mr };

std::string_view to_string(Acquisition a);
Acquisition acquisition_from_string(std::string_view name);

struct SelectionResult {
  int chosen_query_id = 0;
  std::optional<std::pair<int, int>> policy_pair;
  std::optional<std::vector<double>> scores;
};

/// Lowest index whose score is within 1e-12·max(1, |best|) of the maximum.
int argmax_lowest(std::span<const double> scores);

struct PairScore {
  int first;
  int second;
  double variance;  ///< Var[Ĝ(π_first) − Ĝ(π_second) | D]
};

/// All unordered pairs i < j in lexicographic order.
std::vector<PairScore> idrl_pair_scores(const GpRewardModel& model, const std::vector<VisitationVector>& visitations);
std::pair<int, int> idrl_select_pair(const GpRewardModel& model, const std::vector<VisitationVector>& visitations);

/// Scores are −Var[⟨Δν, r̂⟩ | D ∪ {q}]; degenerate queries leave the variance
/// unchanged.
SelectionResult idrl_select_query(const GpRewardModel& model, const Vector& delta_nu, const QueryCatalog& catalog);
SelectionResult idrl_select(const GpRewardModel& model, const std::vector<VisitationVector>& visitations,
                            const QueryCatalog& catalog);

SelectionResult uniform_select(const QueryCatalog& catalog, Rng& rng);

/// Scores are Var[ŷ | D, q].
SelectionResult igr_select(const GpRewardModel& model, const QueryCatalog& catalog);

struct EirParams {
  double xi = 0.001;
  double y_max = 0.0;
};

/// E[max(ŷ − y_max − ξ, 0)] for ŷ ~ N(mean, variance); 0 when variance is 0.
double expected_improvement(double mean, double variance, double y_max, double xi);
SelectionResult eir_select(const GpRewardModel& model, const QueryCatalog& catalog, const EirParams& params);

enum class EpdOptimism { variance, std };

struct EpdParams {
  EpdOptimism optimism = EpdOptimism::variance;
  SolveOptions solver;
};

/// Optimistic response ỹ = E[ŷ] + Var[ŷ] (or + Std[ŷ]).
double epd_optimistic_response(const GpRewardModel& model, const LinearRewardQuery& query, EpdOptimism optimism);

/// Scores are the number of states in which the policy solved on the
/// optimistically updated mean differs from `current`.
SelectionResult epd_select(const GpRewardModel& model, const TabularMdp& mdp, const QueryCatalog& catalog,
                           const EpdParams& params, const Policy& current, const Vector* warm_start = nullptr);

enum class MrProbability { gp, bernoulli };

struct MrParams {
  std::vector<Vector> candidate_rewards;
  std::vector<VisitationVector> visitations;  ///< of the policy solved for each reward
  Vector posterior_probs;
};

/// Softmax over candidates of the GP posterior log-density of each reward.
Vector mr_gp_probabilities(const GpRewardModel& model, const std::vector<Vector>& rewards);
/// Product over observed queries of p or 1 − p, depending on whether the
/// reward agrees with the sign of the response; normalized.
Vector mr_bernoulli_probabilities(const std::vector<Observation>& data, const std::vector<Vector>& rewards, double p);

/// R(R_i, R_j) = G_{R_j}(π_j) − G_{R_j}(π_i).
double mr_regret(const MrParams& params, int i, int j);
double mr_pair_utility(const MrParams& params, int i, int j);

/// Catalog entries must carry rollout owners; an entry scores the best
/// utility among its owner pairs, 0 if none is a pair of distinct candidates.
SelectionResult mr_select(const MrParams& params, const QueryCatalog& catalog);

}  // namespace idrl
