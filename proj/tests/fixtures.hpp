#pragma once

#include <vector>

#include "idrl/environments.hpp"
#include "idrl/mdp.hpp"
#include "idrl/query.hpp"
#include "idrl/rng.hpp"

namespace fixture {

using idrl::Matrix;
using idrl::Vector;

inline Matrix random_psd(int n, idrl::Rng& rng, int rank = -1) {
  const int r = rank > 0 ? rank : n;
  Matrix a(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = idrl::standard_normal(rng);
  return a * a.transpose() / r + (rank > 0 ? 0.0 : 0.05) * Matrix::Identity(n, n);
}

inline std::vector<int> random_states(int n, int len, idrl::Rng& rng) {
  std::vector<int> s(len);
  for (int& x : s) x = static_cast<int>(idrl::uniform_index(rng, n));
  return s;
}

/// One of the four query kinds with random states.
inline idrl::LinearRewardQuery random_query(int n, idrl::Rng& rng) {
  switch (idrl::uniform_index(rng, 4)) {
    case 0: return idrl::make_state_reward(static_cast<int>(idrl::uniform_index(rng, n)));
    case 1: return idrl::make_trajectory_return(random_states(n, 1 + static_cast<int>(idrl::uniform_index(rng, 4)), rng));
    case 2: {
      const int a = static_cast<int>(idrl::uniform_index(rng, n));
      int b = static_cast<int>(idrl::uniform_index(rng, n - 1));
      if (b >= a) ++b;
      const int sa[] = {a};
      const int sb[] = {b};
      return idrl::make_comparison(sa, sb);
    }
    default: {
      while (true) {
        auto q = idrl::make_comparison(random_states(n, 3, rng), random_states(n, 3, rng));
        if (!q.is_degenerate()) return q;
      }
    }
  }
}

/// Random MDP with stochastic transitions and uniform initial distribution.
inline idrl::TabularMdp random_mdp(int n, int actions, double gamma, idrl::Rng& rng) {
  std::vector<std::vector<std::vector<idrl::Transition>>> t(n, std::vector<std::vector<idrl::Transition>>(actions));
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < actions; ++a) {
      const int k = 1 + static_cast<int>(idrl::uniform_index(rng, 3));
      std::vector<double> w(k);
      double sum = 0.0;
      for (double& x : w) sum += (x = 0.1 + idrl::uniform01(rng));
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        const double p = i + 1 < k ? w[i] / sum : 1.0 - acc;
        acc += p;
        t[s][a].push_back({static_cast<int>(idrl::uniform_index(rng, n)), p});
      }
    }
  Vector r(n);
  for (int s = 0; s < n; ++s) r[s] = idrl::standard_normal(rng);
  return idrl::TabularMdp(n, actions, std::move(t), r, Vector::Constant(n, 1.0 / n), gamma);
}

inline idrl::Policy random_policy(const idrl::TabularMdp& mdp, idrl::Rng& rng) {
  idrl::Policy p{std::vector<int>(mdp.num_states())};
  for (int& a : p.action_of) a = static_cast<int>(idrl::uniform_index(rng, mdp.num_actions()));
  return p;
}

}  // namespace fixture
