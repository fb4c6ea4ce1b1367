#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "idrl/rng.hpp"

namespace idrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Transition {
  int next;
  double prob;
};

enum class ReturnMode { discounted, finite_horizon };

/// Finite MDP with state-based rewards. Transitions are stored sparsely per
/// (state, action). Immutable after construction.
///
/// When `horizon` is set, returns and visitations are computed in
/// finite-horizon mode (undiscounted, T steps counting the initial state);
/// otherwise the discount governs.
class TabularMdp {
 public:
  TabularMdp(int num_states, int num_actions, std::vector<std::vector<std::vector<Transition>>> transitions,
             Vector true_reward, Vector initial_dist, double discount, std::optional<int> horizon = std::nullopt);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  std::span<const Transition> successors(int s, int a) const { return transitions_[s][a]; }
  double transition_prob(int s, int a, int next) const;

  const Vector& true_reward() const { return true_reward_; }
  const Vector& initial_dist() const { return initial_dist_; }
  double discount() const { return discount_; }
  std::optional<int> horizon() const { return horizon_; }
  ReturnMode mode() const { return horizon_ ? ReturnMode::finite_horizon : ReturnMode::discounted; }

  /// Copy with the evaluation mode switched.
  TabularMdp with_horizon(std::optional<int> horizon) const;

 private:
  int num_states_;
  int num_actions_;
  std::vector<std::vector<std::vector<Transition>>> transitions_;
  Vector true_reward_;
  Vector initial_dist_;
  double discount_;
  std::optional<int> horizon_;
};

/// Deterministic stationary policy.
struct Policy {
  std::vector<int> action_of;

  bool operator==(const Policy&) const = default;
};

/// Expected (discounted) state visit counts under a policy.
struct VisitationVector {
  Vector nu;
};

void validate_policy(const TabularMdp& mdp, const Policy& policy);

struct SolveOptions {
  double tol = 1e-10;
  int max_iterations = 10'000'000;
};

struct SolveResult {
  Policy policy;
  Vector values;
  double residual = 0.0;
  int iterations = 0;
};

/// Optimal policy for `reward`.
///
/// Discounted mode runs value iteration on V(s) = r(s) + γ max_a Σ T(s,a,s') V(s')
/// until the Bellman residual is at most `tol`, then acts greedily on
/// Q(s,a) = Σ T(s,a,s') V(s'); ties go to the lowest action index.
///
/// Finite-horizon mode runs backward induction and returns the stationary
/// policy that follows the optimal plan: each state takes the action planned
/// for the earliest time step at which the plan reaches it (states never
/// reached take the first-step action). This is exact whenever the plan never
/// revisits a state with a different optimal action, which holds for the
/// deterministic single-start layouts used with this mode.
SolveResult solve_values(const TabularMdp& mdp, const Vector& reward, const SolveOptions& options = {},
                         const Vector* warm_start = nullptr);

Policy solve(const TabularMdp& mdp, const Vector& reward, double tol = 1e-10);

/// max_s |(T V)(s) - V(s)| for the discounted Bellman optimality operator.
double bellman_residual(const TabularMdp& mdp, const Vector& reward, const Vector& values);

/// Q(s, ·) under `values`: Σ_{s'} T(s,a,s') V(s').
double action_value(const TabularMdp& mdp, const Vector& values, int s, int a);

/// P_π[s][s'] = T[s][π(s)][s'].
Matrix policy_transition_matrix(const TabularMdp& mdp, const Policy& policy);

/// Discounted: ν = (I − γ P_πᵀ)⁻¹ ρ0. Finite horizon T: ν = Σ_{t<T} (P_πᵀ)ᵗ ρ0.
VisitationVector visitation(const TabularMdp& mdp, const Policy& policy);

double policy_return(const TabularMdp& mdp, const Policy& policy, const Vector& reward);

/// G(π*) − G(π) under the true reward.
double regret(const TabularMdp& mdp, const Policy& policy, double tol = 1e-10);

/// Same as `regret`, with a precomputed optimal return.
double regret_against(const TabularMdp& mdp, const Policy& policy, double optimal_return);

struct MonteCarloVisitation {
  Vector mean;
  Vector standard_error;
};

/// Rollout-based estimate of ν with per-state standard errors. Discounted
/// episodes are truncated after `max_steps` steps.
MonteCarloVisitation monte_carlo_visitation(const TabularMdp& mdp, const Policy& policy, int episodes, Rng& rng,
                                            int max_steps);

int sample_state(std::span<const Transition> dist, Rng& rng);
int sample_initial_state(const TabularMdp& mdp, Rng& rng);

/// States visited by one rollout of `length` steps, starting from ρ0.
std::vector<int> rollout(const TabularMdp& mdp, const Policy& policy, int length, Rng& rng);

/// Number of states in which the two policies choose different actions.
int policy_distance(const Policy& a, const Policy& b);

}  // namespace idrl
