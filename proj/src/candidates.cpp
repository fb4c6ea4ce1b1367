#include "idrl/candidates.hpp"

#include "idrl/error.hpp"

namespace idrl {

CandidateSet thompson_sample(const GpRewardModel& model, const TabularMdp& mdp, int n, Rng& rng, int iteration,
                             const CandidateSet* previous, const SolveOptions& solver) {
  if (n < 1) fail(ErrorKind::invalid_parameters, "need at least one candidate policy", "candidate_policies");
  if (model.num_states() != mdp.num_states()) fail(ErrorKind::invalid_input, "model and MDP sizes differ");
  const GaussianSampler sampler = model.sampler();
  CandidateSet set;
  set.born_at_iteration = iteration;
  for (int i = 0; i < n; ++i) {
    Vector reward = sampler.draw(rng);
    const Vector* warm = (previous && i < static_cast<int>(previous->values.size())) ? &previous->values[i] : nullptr;
    SolveResult solved = solve_values(mdp, reward, solver, warm);
    set.visitations.push_back(visitation(mdp, solved.policy));
    set.policies.push_back(std::move(solved.policy));
    set.values.push_back(std::move(solved.values));
    set.sampled_rewards.push_back(std::move(reward));
  }
  return set;
}

CandidateSet fixed_candidates(const GpRewardModel& model, const TabularMdp& mdp, const std::vector<Policy>& policies,
                              int iteration) {
  if (policies.empty()) fail(ErrorKind::insufficient_candidates, "fixed candidate set is empty");
  CandidateSet set;
  set.born_at_iteration = iteration;
  for (const auto& p : policies) {
    validate_policy(mdp, p);
    set.policies.push_back(p);
    set.visitations.push_back(visitation(mdp, p));
    set.sampled_rewards.push_back(model.mean());
    set.values.push_back(Vector::Zero(mdp.num_states()));
  }
  return set;
}

bool refresh_due(const RefreshSchedule& schedule, int iteration) {
  if (schedule.every_k < 1) fail(ErrorKind::invalid_parameters, "every_k must be at least 1", "candidate_update_every");
  return iteration % schedule.every_k == 0;
}

CandidateSet maybe_refresh(const CandidateSet& set, const RefreshSchedule& schedule, int iteration,
                           const GpRewardModel& model, const TabularMdp& mdp, int n, Rng& rng,
                           const SolveOptions& solver) {
  if (!refresh_due(schedule, iteration) && set.size() > 0) return set;
  return thompson_sample(model, mdp, n, rng, iteration, set.size() > 0 ? &set : nullptr, solver);
}

}  // namespace idrl
