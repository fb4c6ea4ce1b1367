#pragma once

#include <vector>

#include "idrl/gp_model.hpp"
#include "idrl/mdp.hpp"
#include "idrl/rng.hpp"

namespace idrl {

/// Plausibly optimal policies, each stored with the reward it was solved for.
struct CandidateSet {
  std::vector<Policy> policies;
  std::vector<VisitationVector> visitations;
  std::vector<Vector> sampled_rewards;
  std::vector<Vector> values;  ///< solver value functions, reused as warm starts
  int born_at_iteration = 0;

  std::size_t size() const { return policies.size(); }
};

/// n rounds of: draw a reward from the posterior, solve, store the policy and
/// its exact visitation. With `previous`, candidate i warm-starts the solver
/// from previous->values[i].
CandidateSet thompson_sample(const GpRewardModel& model, const TabularMdp& mdp, int n, Rng& rng, int iteration,
                             const CandidateSet* previous = nullptr, const SolveOptions& solver = {});

/// Fixed policies (no sampled rewards beyond the posterior mean).
CandidateSet fixed_candidates(const GpRewardModel& model, const TabularMdp& mdp, const std::vector<Policy>& policies,
                              int iteration);

struct RefreshSchedule {
  int every_k = 1;
};

bool refresh_due(const RefreshSchedule& schedule, int iteration);

/// Resamples when `iteration` is a multiple of every_k; otherwise returns the
/// set unchanged.
CandidateSet maybe_refresh(const CandidateSet& set, const RefreshSchedule& schedule, int iteration,
                           const GpRewardModel& model, const TabularMdp& mdp, int n, Rng& rng,
                           const SolveOptions& solver = {});

}  // namespace idrl
