#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "idrl/environments.hpp"
#include "idrl/error.hpp"
#include "idrl/experiment.hpp"
#include "oracles.hpp"

using namespace idrl;

namespace {

ExperimentConfig chain_config(Acquisition a, int queries, std::vector<std::uint64_t> seeds) {
  ExperimentConfig c;
  c.env = default_env_spec(EnvKind::chain);
  c.acquisition = a;
  c.num_queries = queries;
  c.seeds = std::move(seeds);
  c.threads = 1;
  return c;
}

ExperimentConfig four_item_config(Acquisition a) {
  ExperimentConfig c;
  c.env = default_env_spec(EnvKind::four_item);
  c.acquisition = a;
  c.num_queries = 2;
  c.noise_std = 0.0;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("record counts and iteration order") {
  const ExperimentConfig c = chain_config(Acquisition::uniform, 7, {3, 1, 2});
  const auto records = run_baseline(c);
  REQUIRE(records.size() == 21);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].iteration == static_cast<int>(i % 7) + 1);
    CHECK(records[i].seed == c.seeds[i / 7]);
    CHECK(records[i].regret >= -1e-9);
    CHECK(records[i].acquisition == "uniform");
    CHECK(records[i].env == "chain");
    CHECK(records[i].wall_time_ms == 0.0);
  }
}

TEST_CASE("runs are deterministic and independent of threading") {
  for (Acquisition a : {Acquisition::idrl, Acquisition::uniform, Acquisition::igr, Acquisition::eir}) {
    ExperimentConfig c = chain_config(a, 5, {0, 1, 2});
    const auto first = run_experiment(c);
    const auto again = run_experiment(c);
    c.threads = 3;
    const auto threaded = run_experiment(c);
    CHECK(first == again);
    CHECK(first == threaded);
  }
}

TEST_CASE("seeds see different environments") {
  const ExperimentConfig c = chain_config(Acquisition::uniform, 1, {0, 1});
  CHECK(env_seed_for(c, 0) != env_seed_for(c, 1));
  const ActiveLearner a(c, 0), b(c, 1);
  CHECK(a.env().mdp.true_reward() != b.env().mdp.true_reward());
}

TEST_CASE("four-item scenario is solved by IDRL in two queries") {
  const auto records = run_idrl(four_item_config(Acquisition::idrl));
  REQUIRE(records.size() == 2);
  const Environment env = build_environment(default_env_spec(EnvKind::four_item));
  std::set<int> asked;
  for (const auto& r : records) asked.insert(env.query_states[r.query_id]);
  CHECK(asked == std::set<int>{four_item::kApple, four_item::kCorn});
  CHECK(std::abs(records.back().regret) <= 1e-9);
}

TEST_CASE("IGR on four-item starts indifferent") {
  ActiveLearner learner(four_item_config(Acquisition::igr), 0);
  const Proposal& p = learner.propose();
  REQUIRE(p.selection.scores);
  for (double s : *p.selection.scores) CHECK(s == (*p.selection.scores)[0]);
  CHECK(p.query_id == 0);
}

TEST_CASE("proposals are idempotent until answered") {
  ActiveLearner learner(chain_config(Acquisition::idrl, 2, {0}), 0);
  const int first = learner.propose().query_id;
  CHECK(learner.propose().query_id == first);
  CHECK(learner.iterations_done() == 0);
  learner.observe(0.3);
  CHECK(learner.iterations_done() == 1);
  learner.propose();
  learner.observe(0.1);
  CHECK(learner.finished());
  try {
    learner.propose();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::conflict);
  }
  CHECK_THROWS_AS(learner.observe(1.0), Error);
}

TEST_CASE("non-finite answers are rejected") {
  ActiveLearner learner(chain_config(Acquisition::uniform, 2, {0}), 0);
  learner.propose();
  try {
    learner.observe(std::nan(""));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
  CHECK(learner.pending());
}

TEST_CASE("noiseless repeats are recorded without conditioning") {
  ExperimentConfig c = chain_config(Acquisition::uniform, 40, {0});
  c.noise_std = 0.0;
  const auto records = run_baseline(c);
  CHECK(records.size() == 40);
}

TEST_CASE("every acquisition and query kind runs") {
  struct Case {
    Acquisition a;
    QueryKind k;
  };
  const Case cases[] = {{Acquisition::idrl, QueryKind::state_comparison},
                        {Acquisition::idrl, QueryKind::trajectory_return},
                        {Acquisition::idrl, QueryKind::trajectory_comparison},
                        {Acquisition::igr, QueryKind::trajectory_comparison},
                        {Acquisition::eir, QueryKind::trajectory_return},
                        {Acquisition::epd, QueryKind::state_reward},
                        {Acquisition::mr, QueryKind::trajectory_comparison}};
  for (const auto& cs : cases) {
    ExperimentConfig c = chain_config(cs.a, 3, {0});
    c.query_kind = cs.k;
    CHECK(run_experiment(c).size() == 3);
  }
  ExperimentConfig g;
  g.env = default_env_spec(EnvKind::gridworld);
  g.env.parameters.size = 5;
  g.env.parameters.n_object_types = 3;
  g.num_queries = 3;
  g.acquisition = Acquisition::mr;
  g.query_kind = QueryKind::trajectory_comparison;
  g.mr_probability = MrProbability::bernoulli;
  CHECK(run_experiment(g).size() == 3);
}

TEST_CASE("invalid configurations") {
  ExperimentConfig c = chain_config(Acquisition::eir, 3, {0});
  c.query_kind = QueryKind::state_comparison;
  try {
    validate_config(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_query_kind);
    CHECK(e.field() == "query_kind");
  }
  c = chain_config(Acquisition::idrl, 0, {0});
  try {
    validate_config(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.field() == "num_queries");
  }
  c = chain_config(Acquisition::idrl, 3, {});
  CHECK_THROWS_AS(validate_config(c), Error);
  c = chain_config(Acquisition::idrl, 3, {0});
  c.candidate_policies = 1;
  try {
    validate_config(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_candidates);
  }
  c = chain_config(Acquisition::mr, 3, {0});
  CHECK_THROWS_AS(validate_config(c), Error);
  CHECK_THROWS_AS(run_idrl(chain_config(Acquisition::uniform, 1, {0})), Error);
  CHECK_THROWS_AS(run_baseline(chain_config(Acquisition::idrl, 1, {0})), Error);
}

TEST_CASE("metrics") {
  const Environment chain = build_environment(default_env_spec(EnvKind::chain));
  const Vector& r = chain.mdp.true_reward();
  const Policy best = solve(chain.mdp, r);
  const double opt = policy_return(chain.mdp, best, r);
  const Metrics perfect = compute_metrics(chain, r, best, opt);
  CHECK(perfect.mse == 0.0);
  CHECK(perfect.cosine == doctest::Approx(1.0));
  CHECK(std::abs(perfect.regret) <= 1e-12);

  Vector orth = Vector::Zero(r.size());
  orth[0] = r[1];
  orth[1] = -r[0];
  CHECK(std::abs(compute_metrics(chain, orth, best, opt).cosine) <= 1e-12);

  const Metrics zero = compute_metrics(chain, Vector::Zero(r.size()), best, opt);
  CHECK_FALSE(zero.cosine_defined);
  CHECK(zero.cosine == 0.0);

  Rng rng(3);
  Vector guess(r.size());
  for (int s = 0; s < r.size(); ++s) guess[s] = standard_normal(rng);
  const Policy p = solve(chain.mdp, guess);
  const Metrics m = compute_metrics(chain, guess, p, opt);
  double mse = 0.0;
  for (int s = 0; s < r.size(); ++s) mse += (guess[s] - r[s]) * (guess[s] - r[s]);
  CHECK(m.mse == doctest::Approx(mse / r.size()));
  CHECK(m.cosine == doctest::Approx(guess.dot(r) / std::sqrt(guess.squaredNorm() * r.squaredNorm())));
  CHECK(m.regret == doctest::Approx(opt - oracle::policy_return(chain.mdp, p.action_of, r)));
}

TEST_CASE("gridworld cosine uses object types") {
  const Environment g = build_environment(default_env_spec(EnvKind::gridworld));
  const Vector& r = g.mdp.true_reward();
  Vector scaled = 3.0 * r;
  const Policy p = solve(g.mdp, r);
  CHECK(compute_metrics(g, scaled, p, policy_return(g.mdp, p, r)).cosine == doctest::Approx(1.0));
  Vector a(10), b(10);
  for (int t = 0; t < 10; ++t) {
    a[t] = t + 1.0;
    b[t] = g.grid->type_reward[t];
  }
  Vector mean = Vector::Zero(r.size());
  for (int s = 0; s < r.size(); ++s)
    if (g.grid->object_type[s] >= 0) mean[s] = a[g.grid->object_type[s]];
  CHECK(compute_metrics(g, mean, p, 0.0).cosine == doctest::Approx(a.dot(b) / (a.norm() * b.norm())));
}

TEST_CASE("aggregate against a streaming computation") {
  const ExperimentConfig c = chain_config(Acquisition::uniform, 4, {0, 1, 2, 3, 4, 5});
  const auto records = run_experiment(c);
  const auto rows = aggregate(records);
  REQUIRE(rows.size() == 4);
  std::map<int, oracle::Welford> regret, mse, cosine;
  for (const auto& r : records) {
    regret[r.iteration].add(r.regret);
    mse[r.iteration].add(r.mse);
    cosine[r.iteration].add(r.cosine);
  }
  for (const auto& row : rows) {
    CHECK(row.count == 6);
    CHECK(row.regret.mean == doctest::Approx(regret[row.iteration].mean).epsilon(1e-12));
    CHECK(row.regret.standard_error == doctest::Approx(regret[row.iteration].standard_error()).epsilon(1e-9));
    CHECK(row.mse.standard_error == doctest::Approx(mse[row.iteration].standard_error()).epsilon(1e-9));
    CHECK(row.cosine.mean == doctest::Approx(cosine[row.iteration].mean).epsilon(1e-12));
  }
}

TEST_CASE("aggregate edge cases") {
  std::vector<ExperimentRecord> one(1);
  one[0].regret = 2.5;
  one[0].iteration = 1;
  const auto a = aggregate(one);
  REQUIRE(a.size() == 1);
  CHECK(a[0].regret.mean == 2.5);
  CHECK(a[0].regret.standard_error == 0.0);
  std::vector<ExperimentRecord> constant(30);
  for (std::size_t i = 0; i < 30; ++i) {
    constant[i].seed = i;
    constant[i].iteration = 1;
    constant[i].mse = 0.25;
  }
  const auto b = aggregate(constant);
  CHECK(b[0].mse.mean == 0.25);
  CHECK(b[0].mse.standard_error == 0.0);
}
