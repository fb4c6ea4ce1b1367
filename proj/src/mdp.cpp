#include "idrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idrl/error.hpp"

namespace idrl {

namespace {

constexpr double kStochasticTol = 1e-12;

int greedy_action(const TabularMdp& mdp, const Vector& values, int s, double* best_value) {
  int best = 0;
  double best_q = action_value(mdp, values, s, 0);
  for (int a = 1; a < mdp.num_actions(); ++a) {
    const double q = action_value(mdp, values, s, a);
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  if (best_value) *best_value = best_q;
  return best;
}

void check_reward(const TabularMdp& mdp, const Vector& reward) {
  if (reward.size() != mdp.num_states())
    fail(ErrorKind::invalid_input, "reward has " + std::to_string(reward.size()) + " entries, expected " +
                                       std::to_string(mdp.num_states()));
  if (!reward.allFinite()) fail(ErrorKind::invalid_input, "reward contains non-finite entries");
}

SolveResult solve_finite_horizon(const TabularMdp& mdp, const Vector& reward, int horizon) {
  const int n = mdp.num_states();
  std::vector<std::vector<int>> plan(horizon, std::vector<int>(n, 0));
  Vector next_values = Vector::Zero(n);
  Vector values(n);
  for (int t = horizon - 1; t >= 0; --t) {
    for (int s = 0; s < n; ++s) {
      double q = 0.0;
      plan[t][s] = greedy_action(mdp, next_values, s, &q);
      values[s] = reward[s] + q;
    }
    next_values = values;
  }

  Policy policy{std::vector<int>(n, -1)};
  Vector dist = mdp.initial_dist();
  for (int t = 0; t < horizon; ++t) {
    Vector next = Vector::Zero(n);
    for (int s = 0; s < n; ++s) {
      if (dist[s] <= 0.0) continue;
      if (policy.action_of[s] < 0) policy.action_of[s] = plan[t][s];
      for (const auto& tr : mdp.successors(s, plan[t][s])) next[tr.next] += dist[s] * tr.prob;
    }
    dist = next;
  }
  for (int s = 0; s < n; ++s)
    if (policy.action_of[s] < 0) policy.action_of[s] = plan[0][s];

  return SolveResult{std::move(policy), next_values, 0.0, horizon};
}

}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, std::vector<std::vector<std::vector<Transition>>> transitions,
                       Vector true_reward, Vector initial_dist, double discount, std::optional<int> horizon)
    : num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      true_reward_(std::move(true_reward)),
      initial_dist_(std::move(initial_dist)),
      discount_(discount),
      horizon_(horizon) {
  if (num_states_ <= 0 || num_actions_ <= 0) fail(ErrorKind::invalid_parameters, "MDP needs states and actions");
  if (static_cast<int>(transitions_.size()) != num_states_)
    fail(ErrorKind::invalid_parameters, "transition table has wrong number of states");
  for (int s = 0; s < num_states_; ++s) {
    if (static_cast<int>(transitions_[s].size()) != num_actions_)
      fail(ErrorKind::invalid_parameters, "transition table has wrong number of actions at state " + std::to_string(s));
    for (int a = 0; a < num_actions_; ++a) {
      double total = 0.0;
      for (const auto& tr : transitions_[s][a]) {
        if (tr.next < 0 || tr.next >= num_states_ || tr.prob < 0.0)
          fail(ErrorKind::invalid_parameters, "invalid transition entry");
        total += tr.prob;
      }
      if (std::abs(total - 1.0) > kStochasticTol)
        fail(ErrorKind::invalid_parameters,
             "transition row (" + std::to_string(s) + "," + std::to_string(a) + ") does not sum to 1");
    }
  }
  if (true_reward_.size() != num_states_) fail(ErrorKind::invalid_parameters, "reward size mismatch");
  if (initial_dist_.size() != num_states_ || (initial_dist_.array() < 0.0).any() ||
      std::abs(initial_dist_.sum() - 1.0) > kStochasticTol)
    fail(ErrorKind::invalid_parameters, "initial distribution must be a probability vector");
  if (!(discount_ >= 0.0 && discount_ < 1.0)) fail(ErrorKind::invalid_parameters, "discount must lie in [0, 1)");
  if (horizon_ && *horizon_ <= 0) fail(ErrorKind::invalid_parameters, "horizon must be positive");
}

double TabularMdp::transition_prob(int s, int a, int next) const {
  double p = 0.0;
  for (const auto& tr : transitions_[s][a])
    if (tr.next == next) p += tr.prob;
  return p;
}

TabularMdp TabularMdp::with_horizon(std::optional<int> horizon) const {
  TabularMdp copy = *this;
  if (horizon && *horizon <= 0) fail(ErrorKind::invalid_parameters, "horizon must be positive");
  copy.horizon_ = horizon;
  return copy;
}

void validate_policy(const TabularMdp& mdp, const Policy& policy) {
  if (static_cast<int>(policy.action_of.size()) != mdp.num_states())
    fail(ErrorKind::invalid_input, "policy size does not match the number of states");
  for (int a : policy.action_of)
    if (a < 0 || a >= mdp.num_actions()) fail(ErrorKind::invalid_input, "policy action out of range");
}

double action_value(const TabularMdp& mdp, const Vector& values, int s, int a) {
  double q = 0.0;
  for (const auto& tr : mdp.successors(s, a)) q += tr.prob * values[tr.next];
  return q;
}

double bellman_residual(const TabularMdp& mdp, const Vector& reward, const Vector& values) {
  double residual = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    double q = 0.0;
    greedy_action(mdp, values, s, &q);
    residual = std::max(residual, std::abs(reward[s] + mdp.discount() * q - values[s]));
  }
  return residual;
}

SolveResult solve_values(const TabularMdp& mdp, const Vector& reward, const SolveOptions& options,
                         const Vector* warm_start) {
  check_reward(mdp, reward);
  if (!(options.tol > 0.0)) fail(ErrorKind::invalid_input, "solver tolerance must be positive");
  if (mdp.mode() == ReturnMode::finite_horizon) return solve_finite_horizon(mdp, reward, *mdp.horizon());

  const int n = mdp.num_states();
  const double gamma = mdp.discount();
  Vector values = (warm_start && warm_start->size() == n) ? *warm_start : Vector(reward);
  Vector next(n);
  double residual = 0.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double q = 0.0;
      greedy_action(mdp, values, s, &q);
      next[s] = reward[s] + gamma * q;
      residual = std::max(residual, std::abs(next[s] - values[s]));
    }
    values.swap(next);
    if (residual <= options.tol) break;
  }
  if (residual > options.tol) fail(ErrorKind::numerical_failure, "value iteration did not converge");

  Policy policy{std::vector<int>(n)};
  for (int s = 0; s < n; ++s) policy.action_of[s] = greedy_action(mdp, values, s, nullptr);
  const double final_residual = bellman_residual(mdp, reward, values);
  return SolveResult{std::move(policy), std::move(values), final_residual, it + 1};
}

Policy solve(const TabularMdp& mdp, const Vector& reward, double tol) {
  SolveOptions options;
  options.tol = tol;
  return solve_values(mdp, reward, options).policy;
}

Matrix policy_transition_matrix(const TabularMdp& mdp, const Policy& policy) {
  validate_policy(mdp, policy);
  const int n = mdp.num_states();
  Matrix p = Matrix::Zero(n, n);
  for (int s = 0; s < n; ++s)
    for (const auto& tr : mdp.successors(s, policy.action_of[s])) p(s, tr.next) += tr.prob;
  return p;
}

VisitationVector visitation(const TabularMdp& mdp, const Policy& policy) {
  const Matrix p = policy_transition_matrix(mdp, policy);
  const int n = mdp.num_states();
  if (mdp.mode() == ReturnMode::finite_horizon) {
    Vector dist = mdp.initial_dist();
    Vector nu = Vector::Zero(n);
    for (int t = 0; t < *mdp.horizon(); ++t) {
      nu += dist;
      dist = p.transpose() * dist;
    }
    return {nu};
  }
  const Matrix system = Matrix::Identity(n, n) - mdp.discount() * p.transpose();
  return {system.partialPivLu().solve(mdp.initial_dist())};
}

double policy_return(const TabularMdp& mdp, const Policy& policy, const Vector& reward) {
  check_reward(mdp, reward);
  return visitation(mdp, policy).nu.dot(reward);
}

double regret_against(const TabularMdp& mdp, const Policy& policy, double optimal_return) {
  return optimal_return - policy_return(mdp, policy, mdp.true_reward());
}

double regret(const TabularMdp& mdp, const Policy& policy, double tol) {
  const Policy best = solve(mdp, mdp.true_reward(), tol);
  return regret_against(mdp, policy, policy_return(mdp, best, mdp.true_reward()));
}

int sample_state(std::span<const Transition> dist, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (const auto& tr : dist) {
    acc += tr.prob;
    if (u < acc) return tr.next;
  }
  return dist.back().next;
}

int sample_initial_state(const TabularMdp& mdp, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const Vector& rho = mdp.initial_dist();
  int last = 0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (rho[s] <= 0.0) continue;
    last = s;
    acc += rho[s];
    if (u < acc) return s;
  }
  return last;
}

MonteCarloVisitation monte_carlo_visitation(const TabularMdp& mdp, const Policy& policy, int episodes, Rng& rng,
                                            int max_steps) {
  validate_policy(mdp, policy);
  const int n = mdp.num_states();
  const bool finite = mdp.mode() == ReturnMode::finite_horizon;
  const int steps = finite ? *mdp.horizon() : max_steps;
  const double gamma = finite ? 1.0 : mdp.discount();

  Vector sum = Vector::Zero(n);
  Vector sum_sq = Vector::Zero(n);
  Vector episode = Vector::Zero(n);
  std::vector<int> touched;
  for (int e = 0; e < episodes; ++e) {
    int s = sample_initial_state(mdp, rng);
    double weight = 1.0;
    for (int t = 0; t < steps; ++t) {
      if (episode[s] == 0.0) touched.push_back(s);
      episode[s] += weight;
      weight *= gamma;
      s = sample_state(mdp.successors(s, policy.action_of[s]), rng);
    }
    for (int v : touched) {
      sum[v] += episode[v];
      sum_sq[v] += episode[v] * episode[v];
      episode[v] = 0.0;
    }
    touched.clear();
  }
  const double count = static_cast<double>(episodes);
  MonteCarloVisitation out{sum / count, Vector::Zero(n)};
  if (episodes > 1) {
    for (int s = 0; s < n; ++s) {
      const double var = std::max(0.0, (sum_sq[s] - count * out.mean[s] * out.mean[s]) / (count - 1.0));
      out.standard_error[s] = std::sqrt(var / count);
    }
  }
  return out;
}

std::vector<int> rollout(const TabularMdp& mdp, const Policy& policy, int length, Rng& rng) {
  validate_policy(mdp, policy);
  std::vector<int> states;
  states.reserve(length);
  int s = sample_initial_state(mdp, rng);
  for (int t = 0; t < length; ++t) {
    states.push_back(s);
    s = sample_state(mdp.successors(s, policy.action_of[s]), rng);
  }
  return states;
}

int policy_distance(const Policy& a, const Policy& b) {
  if (a.action_of.size() != b.action_of.size()) fail(ErrorKind::invalid_input, "policies have different sizes");
  int d = 0;
  for (std::size_t s = 0; s < a.action_of.size(); ++s) d += a.action_of[s] != b.action_of[s];
  return d;
}

}  // namespace idrl
