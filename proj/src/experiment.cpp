#include "idrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "idrl/error.hpp"

namespace idrl {

namespace {

SolveOptions solver_options(const ExperimentConfig& config) {
  SolveOptions o;
  o.tol = config.solver_tol;
  return o;
}

Policy random_policy(const TabularMdp& mdp, Rng& rng) {
  Policy p{std::vector<int>(mdp.num_states())};
  for (int& a : p.action_of) a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(mdp.num_actions())));
  return p;
}

MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  validate_env_spec(config.env);
  if (config.num_queries < 1) fail(ErrorKind::invalid_configuration, "num_queries must be at least 1", "num_queries");
  if (config.seeds.empty()) fail(ErrorKind::invalid_configuration, "at least one seed is required", "seeds");
  if (!(config.noise_std >= 0.0) || !std::isfinite(config.noise_std))
    fail(ErrorKind::invalid_configuration, "noise must be finite and nonnegative", "noise");
  if (config.candidate_policies < 1)
    fail(ErrorKind::invalid_configuration, "candidate_policies must be at least 1", "candidate_policies");
  if (config.candidate_update_every < 1)
    fail(ErrorKind::invalid_configuration, "candidate_update_every must be at least 1", "candidate_update_every");
  if (!(config.eir_xi >= 0.0)) fail(ErrorKind::invalid_configuration, "eir_xi must be nonnegative", "eir_xi");
  if (!(config.mr_bernoulli_p > 0.5 && config.mr_bernoulli_p <= 1.0))
    fail(ErrorKind::invalid_configuration, "mr_bernoulli_p must lie in (0.5, 1]", "mr_bernoulli_p");
  if (config.rollout_length < 1)
    fail(ErrorKind::invalid_configuration, "rollout_length must be at least 1", "rollout_length");
  if (!(config.answer_delta > 0.0))
    fail(ErrorKind::invalid_configuration, "answer_delta must be positive", "answer_delta");
  if (!(config.solver_tol > 0.0)) fail(ErrorKind::invalid_configuration, "solver_tol must be positive", "solver_tol");
  const bool preset = config.env.kind == EnvKind::four_item;
  if ((config.acquisition == Acquisition::idrl || config.acquisition == Acquisition::mr) && !preset &&
      config.candidate_policies < 2)
    fail(ErrorKind::insufficient_candidates, "this acquisition needs at least two candidate policies",
         "candidate_policies");
  if (config.acquisition == Acquisition::eir && is_comparison(config.query_kind))
    fail(ErrorKind::unsupported_query_kind, "eir cannot be used with comparison queries", "query_kind");
  if (config.acquisition == Acquisition::mr && config.query_kind != QueryKind::trajectory_comparison)
    fail(ErrorKind::unsupported_query_kind, "mr needs trajectory-comparison queries", "query_kind");
}

double cosine_similarity(const Vector& a, const Vector& b, bool* defined) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    if (defined) *defined = false;
    return 0.0;
  }
  if (defined) *defined = true;
  return a.dot(b) / (na * nb);
}

Metrics compute_metrics(const Environment& env, const Vector& posterior_mean, const Policy& policy,
                        double optimal_return) {
  const Vector& truth = env.mdp.true_reward();
  Metrics m;
  m.regret = regret_against(env.mdp, policy, optimal_return);
  m.mse = (posterior_mean - truth).squaredNorm() / static_cast<double>(truth.size());
  if (env.grid) {
    const auto& g = *env.grid;
    const int types = static_cast<int>(g.type_reward.size());
    std::vector<double> learned, actual;
    for (int t = 0; t < types; ++t) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t s = 0; s < g.object_type.size(); ++s)
        if (g.object_type[s] == t) {
          sum += posterior_mean[static_cast<int>(s)];
          ++count;
        }
      if (count == 0) continue;
      learned.push_back(sum / count);
      actual.push_back(g.type_reward[t]);
    }
    const Vector a = Eigen::Map<const Vector>(learned.data(), static_cast<int>(learned.size()));
    const Vector b = Eigen::Map<const Vector>(actual.data(), static_cast<int>(actual.size()));
    m.cosine = cosine_similarity(a, b, &m.cosine_defined);
  } else {
    m.cosine = cosine_similarity(posterior_mean, truth, &m.cosine_defined);
  }
  return m;
}

std::uint64_t env_seed_for(const ExperimentConfig& config, std::uint64_t seed) {
  return stream_seed(config.env.rng_seed, seed, 0, "env");
}

namespace {

Environment make_env(const ExperimentConfig& config, std::uint64_t seed) {
  validate_config(config);
  EnvSpec spec = config.env;
  spec.rng_seed = env_seed_for(config, seed);
  return build_environment(spec);
}

}  // namespace

ActiveLearner::ActiveLearner(ExperimentConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      env_(make_env(config_, seed)),
      model_(GpRewardModel::from_kernel(env_.kernel, env_.geometry, config_.noise_std)) {
  const SolveOptions solver = solver_options(config_);
  const Policy best = solve_values(env_.mdp, env_.mdp.true_reward(), solver).policy;
  optimal_return_ = policy_return(env_.mdp, best, env_.mdp.true_reward());
  SolveResult initial = solve_values(env_.mdp, model_.mean(), solver);
  policy_ = std::move(initial.policy);
  values_ = std::move(initial.values);
  metrics_ = compute_metrics(env_, model_.mean(), policy_, optimal_return_);
  if (!is_trajectory(config_.query_kind))
    catalog_ = enumerate_candidates(env_.mdp, config_.query_kind, env_.query_states);
}

bool ActiveLearner::needs_candidates() const {
  return config_.acquisition == Acquisition::idrl || config_.acquisition == Acquisition::mr ||
         is_trajectory(config_.query_kind);
}

void ActiveLearner::refresh_candidates(int t) {
  if (!env_.preset_candidates.empty()) {
    if (!candidates_) candidates_ = fixed_candidates(model_, env_.mdp, env_.preset_candidates, t);
    return;
  }
  if (candidates_ && !refresh_due(RefreshSchedule{config_.candidate_update_every}, t)) return;
  Rng rng(stream_seed(config_.master_seed, seed_, static_cast<std::uint64_t>(t), "candidates"));
  candidates_ = thompson_sample(model_, env_.mdp, config_.candidate_policies, rng, t,
                                candidates_ ? &*candidates_ : nullptr, solver_options(config_));
}

void ActiveLearner::build_trajectory_catalog(int t) {
  Rng rng(stream_seed(config_.master_seed, seed_, static_cast<std::uint64_t>(t), "rollouts"));
  const int length = env_.mdp.horizon().value_or(config_.rollout_length);
  std::vector<Rollout> rollouts;
  for (std::size_t i = 0; i < candidates_->size(); ++i)
    rollouts.push_back({static_cast<int>(i), rollout(env_.mdp, candidates_->policies[i], length, rng)});
  constexpr int kMaxRandomRollouts = 20;
  for (int k = 0; k < kMaxRandomRollouts; ++k) {
    const Policy p = random_policy(env_.mdp, rng);
    rollouts.push_back({-1, rollout(env_.mdp, p, length, rng)});
    catalog_ = trajectory_catalog(rollouts, config_.query_kind);
    if (!catalog_.empty()) return;
  }
  fail(ErrorKind::insufficient_candidates, "rollouts produced no informative trajectory query");
}

SelectionResult ActiveLearner::select(int t) {
  Rng rng(stream_seed(config_.master_seed, seed_, static_cast<std::uint64_t>(t), "select"));
  switch (config_.acquisition) {
    case Acquisition::idrl:
      return idrl_select(model_, candidates_->visitations, catalog_);
    case Acquisition::uniform:
      return uniform_select(catalog_, rng);
    case Acquisition::igr:
      return igr_select(model_, catalog_);
    case Acquisition::eir: {
      EirParams p;
      p.xi = config_.eir_xi;
      if (!history_.empty()) {
        p.y_max = history_.front().response;
        for (const auto& r : history_) p.y_max = std::max(p.y_max, r.response);
      } else {
        p.y_max = model_.response_mean(catalog_.queries.front());
        for (const auto& q : catalog_.queries) p.y_max = std::max(p.y_max, model_.response_mean(q));
      }
      return eir_select(model_, catalog_, p);
    }
    case Acquisition::epd: {
      EpdParams p;
      p.optimism = config_.epd_optimism;
      p.solver = solver_options(config_);
      return epd_select(model_, env_.mdp, catalog_, p, policy_, &values_);
    }
    case Acquisition::mr: {
      MrParams p;
      p.candidate_rewards = candidates_->sampled_rewards;
      p.visitations = candidates_->visitations;
      p.posterior_probs = config_.mr_probability == MrProbability::gp
                              ? mr_gp_probabilities(model_, p.candidate_rewards)
                              : mr_bernoulli_probabilities(model_.dataset(), p.candidate_rewards, config_.mr_bernoulli_p);
      return mr_select(p, catalog_);
    }
  }
  fail(ErrorKind::invalid_configuration, "unknown acquisition", "acquisition");
}

const Proposal& ActiveLearner::propose() {
  if (pending_) return *pending_;
  if (finished()) fail(ErrorKind::conflict, "query budget exhausted");
  const int t = iterations_done();
  if (needs_candidates()) refresh_candidates(t);
  if (is_trajectory(config_.query_kind)) build_trajectory_catalog(t);
  SelectionResult sel = select(t);
  const int id = sel.chosen_query_id;
  pending_ = Proposal{t + 1, id, catalog_.queries[id], std::move(sel)};
  return *pending_;
}

const ExperimentRecord& ActiveLearner::observe(double y, double wall_time_ms) {
  if (!pending_) fail(ErrorKind::conflict, "no query is pending");
  if (!std::isfinite(y)) fail(ErrorKind::invalid_input, "response must be finite", "answer");
  try {
    model_ = model_.condition(pending_->query, y);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_query) throw;
  }
  SolveResult solved = solve_values(env_.mdp, model_.mean(), solver_options(config_), &values_);
  policy_ = std::move(solved.policy);
  values_ = std::move(solved.values);
  metrics_ = compute_metrics(env_, model_.mean(), policy_, optimal_return_);

  ExperimentRecord r;
  r.seed = seed_;
  r.iteration = pending_->iteration;
  r.acquisition = std::string(to_string(config_.acquisition));
  r.env = std::string(to_string(config_.env.kind));
  r.query_id = pending_->query_id;
  r.response = y;
  r.regret = metrics_.regret;
  r.mse = metrics_.mse;
  r.cosine = metrics_.cosine;
  r.wall_time_ms = wall_time_ms;
  history_.push_back(std::move(r));
  pending_.reset();
  return history_.back();
}

std::vector<ExperimentRecord> run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  ActiveLearner learner(config, seed);
  using clock = std::chrono::steady_clock;
  while (!learner.finished()) {
    const auto start = clock::now();
    const int t = learner.iterations_done();
    const Proposal& p = learner.propose();
    Rng rng(stream_seed(config.master_seed, seed, static_cast<std::uint64_t>(t), "oracle"));
    const QueryResponse y = simulate_response(learner.env().mdp, p.query, config.noise_std, rng, p.query_id);
    double ms = 0.0;
    if (config.record_timing) ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    learner.observe(y.value, ms);
  }
  return learner.history();
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const std::size_t n = config.seeds.size();
  std::size_t workers = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::vector<ExperimentRecord>> per_seed(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        per_seed[i] = run_seed(config, config.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ExperimentRecord> out;
  for (auto& rs : per_seed) out.insert(out.end(), rs.begin(), rs.end());
  return out;
}

std::vector<ExperimentRecord> run_idrl(const ExperimentConfig& config) {
  if (config.acquisition != Acquisition::idrl)
    fail(ErrorKind::invalid_configuration, "run_idrl needs acquisition idrl", "acquisition");
  return run_experiment(config);
}

std::vector<ExperimentRecord> run_baseline(const ExperimentConfig& config) {
  if (config.acquisition == Acquisition::idrl)
    fail(ErrorKind::invalid_configuration, "run_baseline needs a baseline acquisition", "acquisition");
  return run_experiment(config);
}

std::vector<SummaryRow> aggregate(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, std::string, int>;
  struct Bucket {
    std::vector<double> regret, mse, cosine;
  };
  std::map<Key, Bucket> groups;
  for (const auto& r : records) {
    auto& b = groups[Key{r.acquisition, r.env, r.iteration}];
    b.regret.push_back(r.regret);
    b.mse.push_back(r.mse);
    b.cosine.push_back(r.cosine);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, b] : groups) {
    SummaryRow row;
    row.acquisition = std::get<0>(key);
    row.env = std::get<1>(key);
    row.iteration = std::get<2>(key);
    row.count = static_cast<int>(b.regret.size());
    row.regret = summarize(b.regret);
    row.mse = summarize(b.mse);
    row.cosine = summarize(b.cosine);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace idrl
