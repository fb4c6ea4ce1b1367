#include "idrl/query.hpp"

#include <algorithm>
#include <string>

#include "idrl/error.hpp"

namespace idrl {

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::state_reward: return "state-reward";
    case QueryKind::trajectory_return: return "trajectory-return";
    case QueryKind::state_comparison: return "state-comparison";
    case QueryKind::trajectory_comparison: return "trajectory-comparison";
  }
  return "unknown";
}

QueryKind query_kind_from_string(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  for (QueryKind k : {QueryKind::state_reward, QueryKind::trajectory_return, QueryKind::state_comparison,
                      QueryKind::trajectory_comparison})
    if (s == to_string(k)) return k;
  fail(ErrorKind::invalid_configuration, "unknown query kind '" + std::string(name) + "'", "query_kind");
}

bool is_comparison(QueryKind kind) {
  return kind == QueryKind::state_comparison || kind == QueryKind::trajectory_comparison;
}

bool is_trajectory(QueryKind kind) {
  return kind == QueryKind::trajectory_return || kind == QueryKind::trajectory_comparison;
}

Vector LinearRewardQuery::dense(int num_states) const {
  Vector c = Vector::Zero(num_states);
  for (std::size_t j = 0; j < states.size(); ++j) c[states[j]] += weights[j];
  return c;
}

double LinearRewardQuery::expectation(const Vector& reward) const {
  double y = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j) y += weights[j] * reward[states[j]];
  return y;
}

bool LinearRewardQuery::is_degenerate() const {
  return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
}

bool LinearRewardQuery::operator==(const LinearRewardQuery& other) const {
  return states == other.states && weights == other.weights;
}

LinearRewardQuery make_query(std::vector<std::pair<int, double>> entries, QueryKind kind) {
  if (entries.empty()) fail(ErrorKind::invalid_input, "query needs at least one state");
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  LinearRewardQuery q;
  q.kind = kind;
  for (const auto& [s, w] : entries) {
    if (s < 0) fail(ErrorKind::invalid_input, "query state index is negative");
    if (!q.states.empty() && q.states.back() == s) {
      q.weights.back() += w;
    } else {
      q.states.push_back(s);
      q.weights.push_back(w);
    }
  }
  return q;
}

LinearRewardQuery make_state_reward(int s) { return make_query({{s, 1.0}}, QueryKind::state_reward); }

LinearRewardQuery make_trajectory_return(std::span<const int> states) {
  std::vector<std::pair<int, double>> e;
  for (int s : states) e.emplace_back(s, 1.0);
  return make_query(std::move(e), QueryKind::trajectory_return);
}

LinearRewardQuery make_comparison(std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::invalid_input, "comparison needs two nonempty sides");
  std::vector<std::pair<int, double>> e;
  for (int s : a) e.emplace_back(s, 1.0);
  for (int s : b) e.emplace_back(s, -1.0);
  const bool single = a.size() == 1 && b.size() == 1;
  return make_query(std::move(e), single ? QueryKind::state_comparison : QueryKind::trajectory_comparison);
}

QueryResponse simulate_response(const TabularMdp& mdp, const LinearRewardQuery& query, double noise_std, Rng& rng,
                                int query_id) {
  if (!(noise_std >= 0.0)) fail(ErrorKind::invalid_parameters, "noise must be nonnegative", "noise");
  for (int s : query.states)
    if (s >= mdp.num_states()) fail(ErrorKind::invalid_input, "query state out of range");
  const double z = standard_normal(rng);
  return QueryResponse{query.expectation(mdp.true_reward()) + noise_std * z, query_id, std::nullopt};
}

QueryCatalog enumerate_candidates(const TabularMdp& mdp, QueryKind kind, std::span<const int> states) {
  std::vector<int> pool(states.begin(), states.end());
  if (pool.empty()) {
    pool.resize(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) pool[s] = s;
  }
  for (int s : pool)
    if (s < 0 || s >= mdp.num_states()) fail(ErrorKind::invalid_input, "catalog state out of range");

  QueryCatalog cat;
  switch (kind) {
    case QueryKind::state_reward:
      cat.provenance = "all-states";
      for (int s : pool) cat.queries.push_back(make_state_reward(s));
      break;
    case QueryKind::state_comparison:
      cat.provenance = "all-state-pairs";
      for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
          if (pool[i] == pool[j]) continue;
          const int a[] = {pool[i]};
          const int b[] = {pool[j]};
          cat.queries.push_back(make_comparison(a, b));
        }
      break;
    default:
      fail(ErrorKind::invalid_configuration,
           std::string(to_string(kind)) + " catalogs are built from rollouts, not enumerated", "query_kind");
  }
  return cat;
}

QueryCatalog trajectory_catalog(const std::vector<Rollout>& rollouts, QueryKind kind) {
  QueryCatalog cat;
  auto add = [&](LinearRewardQuery q, std::pair<int, int> source) {
    if (q.is_degenerate()) return;
    for (std::size_t i = 0; i < cat.queries.size(); ++i) {
      if (cat.queries[i] == q) {
        cat.sources[i].push_back(source);
        return;
      }
    }
    cat.queries.push_back(std::move(q));
    cat.sources.push_back({source});
  };
  switch (kind) {
    case QueryKind::trajectory_return:
      cat.provenance = "rollout-returns";
      for (const auto& r : rollouts) add(make_trajectory_return(r.states), {r.owner, r.owner});
      break;
    case QueryKind::trajectory_comparison:
      cat.provenance = "rollout-pairs";
      for (std::size_t i = 0; i < rollouts.size(); ++i)
        for (std::size_t j = i + 1; j < rollouts.size(); ++j) {
          LinearRewardQuery q = make_comparison(rollouts[i].states, rollouts[j].states);
          q.kind = QueryKind::trajectory_comparison;
          add(std::move(q), {rollouts[i].owner, rollouts[j].owner});
        }
      break;
    default:
      fail(ErrorKind::invalid_configuration, "trajectory catalogs need a trajectory query kind", "query_kind");
  }
  return cat;
}

}  // namespace idrl
