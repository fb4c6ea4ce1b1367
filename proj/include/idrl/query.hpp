#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idrl/mdp.hpp"
#include "idrl/rng.hpp"

namespace idrl {

enum class QueryKind { state_reward, trajectory_return, state_comparison, trajectory_comparison };

/// Hyphenated CLI spelling, e.g. "state-reward".
std::string_view to_string(QueryKind kind);
/// Accepts hyphens or underscores.
QueryKind query_kind_from_string(std::string_view name);
bool is_comparison(QueryKind kind);
bool is_trajectory(QueryKind kind);

/// y = Σ_j weights[j] · R(states[j]) + ε.
///
/// States are kept sorted and unique; weights on repeated states are summed
/// at construction, so two queries over the same functional compare equal.
struct LinearRewardQuery {
  std::vector<int> states;
  std::vector<double> weights;
  QueryKind kind = QueryKind::state_reward;

  Vector dense(int num_states) const;
  double expectation(const Vector& reward) const;
  bool is_degenerate() const;
  /// Ignores `kind`.
  bool operator==(const LinearRewardQuery& other) const;
};

/// Builds a normalized query from raw (state, weight) entries.
LinearRewardQuery make_query(std::vector<std::pair<int, double>> entries, QueryKind kind);
LinearRewardQuery make_state_reward(int s);
LinearRewardQuery make_trajectory_return(std::span<const int> states);
/// +1 on every visit in `a`, −1 on every visit in `b`.
LinearRewardQuery make_comparison(std::span<const int> a, std::span<const int> b);

struct QueryResponse {
  double value = 0.0;
  int query_id = -1;
  std::optional<double> latency_ms;
};

struct QueryCatalog {
  std::vector<LinearRewardQuery> queries;
  std::string provenance;
  /// Trajectory catalogs only: for each query, the (first, second) rollout
  /// owners that produced it. Owner −1 marks a random-policy rollout.
  std::vector<std::vector<std::pair<int, int>>> sources;

  std::size_t size() const { return queries.size(); }
  bool empty() const { return queries.empty(); }
};

/// ⟨C, R(S)⟩ + noise_std · z with z ~ N(0, 1); z is drawn even when
/// noise_std = 0 so the random stream does not depend on the noise level.
QueryResponse simulate_response(const TabularMdp& mdp, const LinearRewardQuery& query, double noise_std, Rng& rng,
                                int query_id = -1);

/// Enumerated catalogs over `states` (all states when empty): one query per
/// state, or one per unordered pair.
QueryCatalog enumerate_candidates(const TabularMdp& mdp, QueryKind kind, std::span<const int> states = {});

struct Rollout {
  int owner = -1;  ///< candidate-policy index, −1 for a random policy
  std::vector<int> states;
};

/// trajectory_return: one query per distinct rollout. trajectory_comparison:
/// one query per unordered pair of rollouts, skipping degenerate and
/// duplicate functionals (their owners are merged into `sources`).
QueryCatalog trajectory_catalog(const std::vector<Rollout>& rollouts, QueryKind kind);

}  // namespace idrl
