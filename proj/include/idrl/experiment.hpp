#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idrl/acquisition.hpp"
#include "idrl/candidates.hpp"
#include "idrl/environments.hpp"
#include "idrl/gp_model.hpp"
#include "idrl/query.hpp"

namespace idrl {

struct ExperimentConfig {
  EnvSpec env = default_env_spec(EnvKind::gridworld);
  QueryKind query_kind = QueryKind::state_reward;
  Acquisition acquisition = Acquisition::idrl;
  int num_queries = 10;
  std::vector<std::uint64_t> seeds{0};
  double noise_std = 0.1;
  int candidate_policies = 5;
  int candidate_update_every = 1;
  double eir_xi = 0.001;
  EpdOptimism epd_optimism = EpdOptimism::variance;
  MrProbability mr_probability = MrProbability::gp;
  double mr_bernoulli_p = 0.9;
  int rollout_length = 10;
  std::uint64_t master_seed = 0;
  double answer_delta = 1.0;  ///< magnitude of binary answers (service only)
  double solver_tol = 1e-10;
  bool record_timing = false;  ///< off keeps wall_time_ms = 0 so output is reproducible
  int threads = 0;             ///< 0 = hardware concurrency
  std::string output;
};

void validate_config(const ExperimentConfig& config);

struct ExperimentRecord {
  std::uint64_t seed = 0;
  int iteration = 0;
  std::string acquisition;
  std::string env;
  int query_id = 0;
  double response = 0.0;
  double regret = 0.0;
  double mse = 0.0;
  double cosine = 0.0;
  double wall_time_ms = 0.0;

  bool operator==(const ExperimentRecord&) const = default;
};

struct Metrics {
  double regret = 0.0;
  double mse = 0.0;
  double cosine = 0.0;
  bool cosine_defined = true;  ///< false when either vector has zero norm
};

/// Cosine is taken over per-object-type rewards on grid environments (mean
/// over the cells of each type) and over all states elsewhere.
Metrics compute_metrics(const Environment& env, const Vector& posterior_mean, const Policy& policy,
                        double optimal_return);

double cosine_similarity(const Vector& a, const Vector& b, bool* defined = nullptr);

/// Seed used to build the environment of one run.
std::uint64_t env_seed_for(const ExperimentConfig& config, std::uint64_t seed);

struct Proposal {
  int iteration = 0;  ///< 1-based
  int query_id = 0;
  LinearRewardQuery query;
  SelectionResult selection;
};

/// One active-learning run as a step machine: `propose` picks the next query
/// (repeated calls return the pending one), `observe` consumes its answer.
/// The benchmark loop and the interactive service both drive this class.
class ActiveLearner {
 public:
  ActiveLearner(ExperimentConfig config, std::uint64_t seed);

  const ExperimentConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const Environment& env() const { return env_; }
  const GpRewardModel& model() const { return model_; }
  const QueryCatalog& catalog() const { return catalog_; }
  const std::optional<CandidateSet>& candidates() const { return candidates_; }
  const Policy& current_policy() const { return policy_; }
  const Metrics& current_metrics() const { return metrics_; }
  double optimal_return() const { return optimal_return_; }
  const std::vector<ExperimentRecord>& history() const { return history_; }
  const std::optional<Proposal>& pending() const { return pending_; }

  int iterations_done() const { return static_cast<int>(history_.size()); }
  bool finished() const { return iterations_done() >= config_.num_queries; }

  const Proposal& propose();
  /// Conditions on y (skipping degenerate noiseless repeats) and appends a record.
  const ExperimentRecord& observe(double y, double wall_time_ms = 0.0);

 private:
  bool needs_candidates() const;
  void refresh_candidates(int t);
  void build_trajectory_catalog(int t);
  SelectionResult select(int t);

  ExperimentConfig config_;
  std::uint64_t seed_;
  Environment env_;
  GpRewardModel model_;
  QueryCatalog catalog_;
  std::optional<CandidateSet> candidates_;
  Policy policy_;
  Vector values_;
  Metrics metrics_;
  double optimal_return_ = 0.0;
  std::vector<ExperimentRecord> history_;
  std::optional<Proposal> pending_;
};

/// One seed with the simulated expert.
std::vector<ExperimentRecord> run_seed(const ExperimentConfig& config, std::uint64_t seed);
/// All seeds (concurrently), records in seed-major order.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);
std::vector<ExperimentRecord> run_idrl(const ExperimentConfig& config);
std::vector<ExperimentRecord> run_baseline(const ExperimentConfig& config);

struct MetricSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct SummaryRow {
  std::string acquisition;
  std::string env;
  int iteration = 0;
  int count = 0;
  MetricSummary regret;
  MetricSummary mse;
  MetricSummary cosine;
};

/// Mean and standard error (sample std / √n) per (acquisition, env, iteration).
std::vector<SummaryRow> aggregate(const std::vector<ExperimentRecord>& records);

}  // namespace idrl
