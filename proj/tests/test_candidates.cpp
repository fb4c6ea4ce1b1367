#include <doctest.h>

#include <memory>

#include "fixtures.hpp"
#include "idrl/candidates.hpp"
#include "idrl/environments.hpp"

using namespace idrl;

namespace {

// Two absorbing states chosen by the first step from a start state.
TabularMdp two_branch() {
  std::vector<std::vector<std::vector<Transition>>> t(3, std::vector<std::vector<Transition>>(2));
  t[0][0] = {{1, 1.0}};
  t[0][1] = {{2, 1.0}};
  for (int s : {1, 2})
    for (int a = 0; a < 2; ++a) t[s][a] = {{s, 1.0}};
  Vector rho = Vector::Zero(3);
  rho[0] = 1.0;
  return TabularMdp(3, 2, std::move(t), Vector::Zero(3), rho, 0.9);
}

}  // namespace

TEST_CASE("symmetric posterior picks each branch half the time") {
  const TabularMdp mdp = two_branch();
  Matrix k = Matrix::Identity(3, 3);
  k(0, 0) = 1e-3;
  const GpRewardModel m(std::make_shared<const Matrix>(k), 0.1, 1.0);
  Rng rng(1);
  int left = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) left += thompson_sample(m, mdp, 1, rng, 0).policies[0].action_of[0] == 0;
  CHECK(std::abs(left / double(draws) - 0.5) <= 0.01);
}

TEST_CASE("candidates are optimal for their sampled rewards") {
  const Environment env = build_environment(default_env_spec(EnvKind::chain));
  const GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.1);
  Rng rng(2);
  const CandidateSet set = thompson_sample(m, env.mdp, 5, rng, 3);
  REQUIRE(set.size() == 5);
  CHECK(set.visitations.size() == 5);
  CHECK(set.sampled_rewards.size() == 5);
  CHECK(set.born_at_iteration == 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(bellman_residual(env.mdp, set.sampled_rewards[i], set.values[i]) <= 1e-9);
    const Policy greedy = solve(env.mdp, set.sampled_rewards[i]);
    CHECK(policy_return(env.mdp, greedy, set.sampled_rewards[i]) ==
          doctest::Approx(policy_return(env.mdp, set.policies[i], set.sampled_rewards[i])).epsilon(1e-9));
    CHECK((visitation(env.mdp, set.policies[i]).nu - set.visitations[i].nu).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("collapsed posterior gives identical candidates") {
  const Environment env = build_environment(default_env_spec(EnvKind::chain));
  GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.0);
  for (int s = 0; s < 20; ++s) m = m.condition(make_state_reward(s), env.mdp.true_reward()[s]);
  Rng rng(3);
  const CandidateSet set = thompson_sample(m, env.mdp, 5, rng, 0);
  for (const auto& p : set.policies) CHECK(p == set.policies[0]);
}

TEST_CASE("warm start keeps results") {
  const Environment env = build_environment(default_env_spec(EnvKind::junction));
  const GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.1);
  Rng a(4), b(4), c(5);
  const CandidateSet prev = thompson_sample(m, env.mdp, 3, c, 0);
  const CandidateSet cold = thompson_sample(m, env.mdp, 3, a, 1);
  const CandidateSet warm = thompson_sample(m, env.mdp, 3, b, 1, &prev);
  for (int i = 0; i < 3; ++i) {
    CHECK(policy_return(env.mdp, warm.policies[i], warm.sampled_rewards[i]) ==
          doctest::Approx(policy_return(env.mdp, cold.policies[i], cold.sampled_rewards[i])).epsilon(1e-9));
  }
}

TEST_CASE("refresh schedule") {
  CHECK(refresh_due({1}, 0));
  CHECK(refresh_due({1}, 7));
  CHECK(refresh_due({3}, 6));
  CHECK_FALSE(refresh_due({3}, 7));
  CHECK_FALSE(refresh_due({1000000000}, 5));

  const Environment env = build_environment(default_env_spec(EnvKind::chain));
  const GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.1);
  Rng rng(6);
  const CandidateSet first = thompson_sample(m, env.mdp, 5, rng, 0);
  const CandidateSet kept = maybe_refresh(first, {1000000000}, 4, m, env.mdp, 5, rng);
  CHECK(kept.born_at_iteration == 0);
  CHECK(kept.sampled_rewards[0] == first.sampled_rewards[0]);
  const CandidateSet fresh = maybe_refresh(first, {1}, 4, m, env.mdp, 5, rng);
  CHECK(fresh.born_at_iteration == 4);
  CHECK(fresh.sampled_rewards[0] != first.sampled_rewards[0]);
}

TEST_CASE("fixed candidates") {
  const Environment env = build_environment(default_env_spec(EnvKind::four_item));
  const GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.0);
  const CandidateSet set = fixed_candidates(m, env.mdp, env.preset_candidates, 0);
  REQUIRE(set.size() == 2);
  CHECK(set.policies[1] == env.preset_candidates[1]);
  CHECK(set.visitations[0].nu == visitation(env.mdp, env.preset_candidates[0]).nu);
}
