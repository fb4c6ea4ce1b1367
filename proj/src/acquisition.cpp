#include "idrl/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "idrl/error.hpp"

namespace idrl {

namespace {

void require_catalog(const QueryCatalog& catalog) {
  if (catalog.empty()) fail(ErrorKind::invalid_input, "query catalog is empty");
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

std::string_view to_string(Acquisition a) {
  switch (a) {
    case Acquisition::idrl: return "idrl";
    case Acquisition::uniform: return "uniform";
    case Acquisition::igr: return "igr";
    case Acquisition::eir: return "eir";
    case Acquisition::epd: return "epd";
    case Acquisition::mr: return "mr";
  }
  return "unknown";
}

Acquisition acquisition_from_string(std::string_view name) {
  for (Acquisition a : {Acquisition::idrl, Acquisition::uniform, Acquisition::igr, Acquisition::eir,
                        Acquisition::epd, Acquisition::mr})
    if (name == to_string(a)) return a;
  fail(ErrorKind::invalid_configuration, "unknown acquisition '" + std::string(name) + "'", "acquisition");
}

int argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) fail(ErrorKind::invalid_input, "no scores to maximize");
  double best = -std::numeric_limits<double>::infinity();
  for (double s : scores) best = std::max(best, s);
  if (std::isinf(best)) {
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] == best) return static_cast<int>(i);
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= best - tol) return static_cast<int>(i);
  return 0;
}

std::vector<PairScore> idrl_pair_scores(const GpRewardModel& model, const std::vector<VisitationVector>& visitations) {
  const int n = static_cast<int>(visitations.size());
  if (n < 2) fail(ErrorKind::insufficient_candidates, "need at least two candidate policies");
  std::vector<PairScore> out;
  out.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.push_back({i, j, model.return_diff_belief(visitations[i], visitations[j]).variance});
  return out;
}

std::pair<int, int> idrl_select_pair(const GpRewardModel& model, const std::vector<VisitationVector>& visitations) {
  const auto pairs = idrl_pair_scores(model, visitations);
  std::vector<double> v;
  for (const auto& p : pairs) v.push_back(p.variance);
  const auto& best = pairs[argmax_lowest(v)];
  return {best.first, best.second};
}

SelectionResult idrl_select_query(const GpRewardModel& model, const Vector& delta_nu, const QueryCatalog& catalog) {
  require_catalog(catalog);
  const FunctionalProbe probe = model.probe(delta_nu);
  std::vector<double> scores(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto after = model.try_variance_after_query(probe, catalog.queries[i]);
    scores[i] = -(after ? *after : probe.belief.variance);
  }
  SelectionResult r;
  r.chosen_query_id = argmax_lowest(scores);
  r.scores = std::move(scores);
  return r;
}

SelectionResult idrl_select(const GpRewardModel& model, const std::vector<VisitationVector>& visitations,
                            const QueryCatalog& catalog) {
  const auto [i, j] = idrl_select_pair(model, visitations);
  SelectionResult r = idrl_select_query(model, visitations[i].nu - visitations[j].nu, catalog);
  r.policy_pair = std::make_pair(i, j);
  return r;
}

SelectionResult uniform_select(const QueryCatalog& catalog, Rng& rng) {
  require_catalog(catalog);
  SelectionResult r;
  r.chosen_query_id = static_cast<int>(uniform_index(rng, catalog.size()));
  return r;
}

SelectionResult igr_select(const GpRewardModel& model, const QueryCatalog& catalog) {
  require_catalog(catalog);
  std::vector<double> scores(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) scores[i] = model.response_variance(catalog.queries[i]);
  SelectionResult r;
  r.chosen_query_id = argmax_lowest(scores);
  r.scores = std::move(scores);
  return r;
}

double expected_improvement(double mean, double variance, double y_max, double xi) {
  if (!(variance > 0.0)) return 0.0;
  const double sd = std::sqrt(variance);
  const double l = mean - y_max - xi;
  const double m = l / sd;
  return l * normal_cdf(m) + sd * normal_pdf(m);
}

SelectionResult eir_select(const GpRewardModel& model, const QueryCatalog& catalog, const EirParams& params) {
  require_catalog(catalog);
  if (!(params.xi >= 0.0)) fail(ErrorKind::invalid_parameters, "EI xi must be nonnegative", "eir_xi");
  for (const auto& q : catalog.queries)
    if (is_comparison(q.kind))
      fail(ErrorKind::unsupported_query_kind, "expected improvement needs numerical responses, not comparisons",
           "query_kind");
  std::vector<double> scores(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& q = catalog.queries[i];
    scores[i] = expected_improvement(model.response_mean(q), model.response_variance(q), params.y_max, params.xi);
  }
  SelectionResult r;
  r.chosen_query_id = argmax_lowest(scores);
  r.scores = std::move(scores);
  return r;
}

double epd_optimistic_response(const GpRewardModel& model, const LinearRewardQuery& query, EpdOptimism optimism) {
  const double var = model.response_variance(query);
  return model.response_mean(query) + (optimism == EpdOptimism::variance ? var : std::sqrt(var));
}

SelectionResult epd_select(const GpRewardModel& model, const TabularMdp& mdp, const QueryCatalog& catalog,
                           const EpdParams& params, const Policy& current, const Vector* warm_start) {
  require_catalog(catalog);
  validate_policy(mdp, current);
  std::vector<double> scores(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& q = catalog.queries[i];
    const Vector mean = model.mean_after(q, epd_optimistic_response(model, q, params.optimism));
    const Policy changed = solve_values(mdp, mean, params.solver, warm_start).policy;
    scores[i] = policy_distance(changed, current);
  }
  SelectionResult r;
  r.chosen_query_id = argmax_lowest(scores);
  r.scores = std::move(scores);
  return r;
}

Vector mr_gp_probabilities(const GpRewardModel& model, const std::vector<Vector>& rewards) {
  if (rewards.empty()) fail(ErrorKind::insufficient_candidates, "no candidate rewards");
  Vector logp(static_cast<int>(rewards.size()));
  for (std::size_t i = 0; i < rewards.size(); ++i)
    logp[i] = gaussian_log_density_unnormalized(rewards[i], model.mean(), model.covariance(), model.jitter_scale());
  const double top = logp.maxCoeff();
  Vector p = (logp.array() - top).exp();
  return p / p.sum();
}

Vector mr_bernoulli_probabilities(const std::vector<Observation>& data, const std::vector<Vector>& rewards, double p) {
  if (rewards.empty()) fail(ErrorKind::insufficient_candidates, "no candidate rewards");
  if (!(p > 0.5 && p <= 1.0)) fail(ErrorKind::invalid_parameters, "Bernoulli p must lie in (0.5, 1]", "mr_bernoulli_p");
  Vector logp = Vector::Zero(static_cast<int>(rewards.size()));
  const double hit = std::log(p);
  const double miss = p < 1.0 ? std::log(1.0 - p) : -1e300;
  for (std::size_t i = 0; i < rewards.size(); ++i)
    for (const auto& obs : data) {
      const double predicted = obs.query.expectation(rewards[i]);
      logp[i] += ((predicted >= 0.0) == (obs.response >= 0.0)) ? hit : miss;
    }
  const double top = logp.maxCoeff();
  Vector w = (logp.array() - top).exp();
  return w / w.sum();
}

double mr_regret(const MrParams& params, int i, int j) {
  const Vector& rj = params.candidate_rewards[j];
  return (params.visitations[j].nu - params.visitations[i].nu).dot(rj);
}

double mr_pair_utility(const MrParams& params, int i, int j) {
  if (i == j) return 0.0;
  return params.posterior_probs[i] * params.posterior_probs[j] * (mr_regret(params, i, j) + mr_regret(params, j, i));
}

SelectionResult mr_select(const MrParams& params, const QueryCatalog& catalog) {
  const int n = static_cast<int>(params.candidate_rewards.size());
  if (n < 2) fail(ErrorKind::insufficient_candidates, "MR needs at least two candidate rewards");
  if (static_cast<int>(params.visitations.size()) != n || params.posterior_probs.size() != n)
    fail(ErrorKind::invalid_input, "MR parameters have inconsistent sizes");
  require_catalog(catalog);
  if (catalog.sources.size() != catalog.size())
    fail(ErrorKind::unsupported_query_kind, "MR needs comparisons between candidate-policy trajectories", "query_kind");
  for (const auto& q : catalog.queries)
    if (q.kind != QueryKind::trajectory_comparison)
      fail(ErrorKind::unsupported_query_kind, "MR needs trajectory comparisons", "query_kind");

  std::vector<double> scores(catalog.size(), 0.0);
  std::optional<std::pair<int, int>> best_pair;
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    bool any = false;
    for (auto [a, b] : catalog.sources[k]) {
      if (a < 0 || b < 0 || a >= n || b >= n || a == b) continue;
      const double u = mr_pair_utility(params, a, b);
      scores[k] = any ? std::max(scores[k], u) : u;
      any = true;
    }
  }
  SelectionResult r;
  r.chosen_query_id = argmax_lowest(scores);
  for (auto [a, b] : catalog.sources[r.chosen_query_id]) {
    if (a < 0 || b < 0 || a == b) continue;
    if (!best_pair || mr_pair_utility(params, a, b) > mr_pair_utility(params, best_pair->first, best_pair->second))
      best_pair = std::make_pair(std::min(a, b), std::max(a, b));
  }
  r.policy_pair = best_pair;
  r.scores = std::move(scores);
  return r;
}

}  // namespace idrl
