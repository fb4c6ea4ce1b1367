#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "fixtures.hpp"
#include "idrl/environments.hpp"
#include "idrl/error.hpp"
#include "idrl/gp_model.hpp"
#include "oracles.hpp"

using namespace idrl;

namespace {

StateGeometry line_geometry(int n) {
  StateGeometry g;
  g.num_states = n;
  g.hop_distance = chain_hop_distance(n);
  return g;
}

KernelSpec se(double sigma, double l) {
  KernelSpec k;
  k.kind = KernelKind::se_graph;
  k.variance = sigma * sigma;
  k.lengthscale = l;
  return k;
}

Matrix dense_c(const std::vector<LinearRewardQuery>& qs, int n) {
  Matrix c(n, static_cast<int>(qs.size()));
  for (std::size_t i = 0; i < qs.size(); ++i) c.col(static_cast<int>(i)) = qs[i].dense(n);
  return c;
}

GpRewardModel fit(std::shared_ptr<const Matrix> k, double noise, const std::vector<LinearRewardQuery>& qs,
                  const Vector& y) {
  GpRewardModel m(std::move(k), noise, 1.0);
  for (std::size_t i = 0; i < qs.size(); ++i) m = m.condition(qs[i], y[static_cast<int>(i)]);
  return m;
}

double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("SE kernel values") {
  const StateGeometry g = line_geometry(5);
  CHECK(kernel_eval(se(2, 3), 0, 0, g) == 4.0);
  const long double ref = 4.0L * std::exp(-0.5L);
  CHECK(std::abs(kernel_eval(se(2, 3), 0, 3, g) - static_cast<double>(ref)) <= 1e-15);
  CHECK(kernel_eval(se(2, 3), 0, 3, g) == doctest::Approx(2.4261).epsilon(1e-4));
}

TEST_CASE("object kernel values") {
  KernelSpec k;
  k.kind = KernelKind::object_type;
  StateGeometry g;
  g.num_states = 4;
  g.object_type = {2, 2, -1, 1};
  CHECK(kernel_eval(k, 0, 1, g) == 1.0);
  CHECK(kernel_eval(k, 0, 2, g) == 0.0);
  CHECK(kernel_eval(k, 2, 2, g) == 0.0);
  CHECK(kernel_eval(k, 0, 3, g) == 0.0);
}

TEST_CASE("linear feature kernel requires a map") {
  KernelSpec k;
  k.kind = KernelKind::linear_features;
  try {
    kernel_eval(k, 0, 0, line_geometry(2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_configuration);
  }
}

TEST_CASE("junction prior is positive semidefinite") {
  const Environment env = build_environment(default_env_spec(EnvKind::junction));
  const Matrix k = prior_covariance(env.kernel, env.geometry);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  const Environment chain = build_environment(default_env_spec(EnvKind::chain));
  const Matrix kc = prior_covariance(chain.kernel, chain.geometry);
  CHECK(kc(0, 3) == kernel_eval(chain.kernel, 0, 3, chain.geometry));
}

TEST_CASE("empty dataset gives the prior") {
  auto k = std::make_shared<const Matrix>(prior_covariance(se(2, 3), line_geometry(6)));
  const GpRewardModel m(k, 0.1, 4.0);
  CHECK(m.mean().isZero());
  CHECK(m.covariance() == *k);
  const std::vector<int> states = {4, 1};
  const auto [mu, cov] = m.predict(states);
  CHECK(mu.isZero());
  CHECK(cov(0, 1) == (*k)(4, 1));
}

TEST_CASE("noiseless interpolation of a single state") {
  auto k = std::make_shared<const Matrix>(Matrix::Identity(3, 3));
  const GpRewardModel m = GpRewardModel(k, 0.0, 1.0).condition(make_state_reward(1), 2.0);
  CHECK(std::abs(m.mean()[1] - 2.0) <= 1e-9);
  CHECK(std::abs(m.covariance()(1, 1)) <= 1e-9);
  CHECK(m.covariance()(0, 0) == 1.0);
}

TEST_CASE("object types are independent") {
  const Environment env = build_environment(default_env_spec(EnvKind::gridworld));
  const GpRewardModel prior = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.1);
  int a = -1, b = -1;
  for (int s = 0; s < env.mdp.num_states(); ++s) {
    const int t = env.geometry.object_type[s];
    if (t < 0) continue;
    if (a < 0) a = s;
    else if (t != env.geometry.object_type[a] && b < 0) b = s;
  }
  REQUIRE(b >= 0);
  const GpRewardModel post = prior.condition(make_state_reward(a), 0.8);
  CHECK(post.mean()[b] == 0.0);
  CHECK(post.covariance()(b, b) == prior.covariance()(b, b));
  CHECK(post.mean()[a] > 0.7);
}

TEST_CASE("three-state comparison against the joint Gaussian") {
  auto k = std::make_shared<const Matrix>(prior_covariance(se(2, 3), line_geometry(3)));
  const int a[] = {0};
  const int b[] = {2};
  const LinearRewardQuery q = make_comparison(a, b);
  const GpRewardModel m = GpRewardModel(k, 0.1, 4.0).condition(q, 0.5);
  Vector y(1);
  y << 0.5;
  const oracle::Moments ref = oracle::schur_condition(*k, dense_c({q}, 3), y, 0.01);
  CHECK(max_abs(m.mean() - ref.mean) <= 1e-8);
  CHECK(max_abs(m.covariance() - ref.cov) <= 1e-8);
}

TEST_CASE("random instances against the joint Gaussian") {
  Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 12));
    const int nq = static_cast<int>(uniform_index(rng, 8));
    auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
    std::vector<LinearRewardQuery> qs;
    for (int i = 0; i < nq; ++i) qs.push_back(fixture::random_query(n, rng));
    Vector y(nq);
    for (int i = 0; i < nq; ++i) y[i] = standard_normal(rng);
    const double noise = 0.05 + uniform01(rng);
    const GpRewardModel m = fit(k, noise, qs, y);
    const oracle::Moments ref = oracle::schur_condition(*k, dense_c(qs, n), y, noise * noise);
    CHECK(max_abs(m.mean() - ref.mean) <= 1e-8);
    CHECK(max_abs(m.covariance() - ref.cov) <= 1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m.covariance() + m.covariance().transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("batch construction equals sequential conditioning") {
  Rng rng(7);
  const int n = 8;
  auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
  std::vector<Observation> data;
  for (int i = 0; i < 4; ++i) data.push_back({fixture::random_query(n, rng), standard_normal(rng)});
  const GpRewardModel batch(k, 0.2, 1.0, data);
  GpRewardModel seq(k, 0.2, 1.0);
  for (const auto& o : data) seq = seq.condition(o.query, o.response);
  CHECK(max_abs(batch.mean() - seq.mean()) <= 1e-10);
  CHECK(max_abs(batch.covariance() - seq.covariance()) <= 1e-10);
  CHECK(seq.dataset().size() == 4);
}

TEST_CASE("conditioning order does not matter") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10;
    auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
    std::vector<Observation> data;
    for (int i = 0; i < 6; ++i) data.push_back({fixture::random_query(n, rng), standard_normal(rng)});
    const GpRewardModel a(k, 0.1, 1.0, data);
    std::reverse(data.begin(), data.end());
    std::swap(data[0], data[3]);
    const GpRewardModel b(k, 0.1, 1.0, data);
    CHECK(max_abs(a.mean() - b.mean()) <= 1e-9);
    CHECK(max_abs(a.covariance() - b.covariance()) <= 1e-9);
  }
}

TEST_CASE("posterior variance never increases") {
  Rng rng(9);
  const int n = 12;
  auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
  GpRewardModel m(k, 0.1, 1.0);
  for (int i = 0; i < 10; ++i) {
    const GpRewardModel next = m.condition(fixture::random_query(n, rng), standard_normal(rng));
    for (int t = 0; t < 5; ++t) {
      Vector v(n);
      for (int s = 0; s < n; ++s) v[s] = standard_normal(rng);
      CHECK(next.functional_belief(v).variance <= m.functional_belief(v).variance + 1e-12);
    }
    m = next;
  }
}

TEST_CASE("degenerate noiseless queries") {
  auto k = std::make_shared<const Matrix>(Matrix::Identity(3, 3));
  const GpRewardModel m = GpRewardModel(k, 0.0, 1.0).condition(make_state_reward(0), 1.0);
  CHECK(m.is_degenerate(make_state_reward(0)));
  CHECK_FALSE(m.is_degenerate(make_state_reward(1)));
  try {
    m.condition(make_state_reward(0), 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_query);
  }
  const GpRewardModel noisy = GpRewardModel(k, 0.1, 1.0).condition(make_state_reward(0), 1.0);
  CHECK_NOTHROW(noisy.condition(make_state_reward(0), 1.0));
}

TEST_CASE("singular object-kernel Gram with repeated noiseless queries") {
  const Environment env = build_environment(default_env_spec(EnvKind::four_item));
  GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.0);
  m = m.condition(make_state_reward(four_item::kApple), 1.0);
  CHECK(m.is_degenerate(make_state_reward(four_item::kApple)));
  CHECK(m.mean()[four_item::kApple] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("posterior sampling moments") {
  Rng rng(10);
  const int n = 6;
  auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
  std::vector<Observation> data;
  for (int i = 0; i < 3; ++i) data.push_back({fixture::random_query(n, rng), standard_normal(rng)});
  const GpRewardModel m(k, 0.3, 1.0, data);
  const GaussianSampler sampler = m.sampler();
  Rng draw_rng(11);
  std::vector<oracle::Welford> w(n);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Vector x = sampler.draw(draw_rng);
    for (int s = 0; s < n; ++s) w[s].add(x[s]);
  }
  for (int s = 0; s < n; ++s) {
    const double sd = std::sqrt(m.covariance()(s, s));
    CHECK(std::abs(w[s].mean - m.mean()[s]) <= 3.0 * sd / std::sqrt(double(draws)));
    CHECK(w[s].m2 / (draws - 1) == doctest::Approx(m.covariance()(s, s)).epsilon(0.03));
  }
}

TEST_CASE("fully determined posterior samples the mean") {
  auto k = std::make_shared<const Matrix>(prior_covariance(se(2, 3), line_geometry(4)));
  GpRewardModel m(k, 0.0, 4.0);
  for (int s = 0; s < 4; ++s) m = m.condition(make_state_reward(s), 0.5 * s - 1.0);
  Rng rng(1);
  const Vector x = m.sample_reward(rng);
  for (int s = 0; s < 4; ++s) CHECK(x[s] == m.mean()[s]);
  for (int s = 0; s < 4; ++s) CHECK(std::abs(x[s] - (0.5 * s - 1.0)) <= 1e-8);
}

TEST_CASE("sampling is deterministic for a seed") {
  Rng rng(12);
  auto k = std::make_shared<const Matrix>(fixture::random_psd(7, rng));
  const GpRewardModel m(k, 0.1, 1.0);
  Rng a(42), b(42);
  CHECK(m.sample_reward(a) == m.sample_reward(b));
}

TEST_CASE("return difference belief") {
  const Environment env = build_environment(default_env_spec(EnvKind::four_item));
  const GpRewardModel m = GpRewardModel::from_kernel(env.kernel, env.geometry, 0.1);
  const VisitationVector n1 = visitation(env.mdp, env.preset_candidates[0]);
  const VisitationVector n2 = visitation(env.mdp, env.preset_candidates[1]);
  const ReturnBelief b = m.return_diff_belief(n1, n2);
  CHECK(b.mean == 0.0);
  CHECK(b.variance == doctest::Approx(2.0).epsilon(1e-12));
  const ReturnBelief same = m.return_diff_belief(n1, n1);
  CHECK(same.mean == 0.0);
  CHECK(same.variance == 0.0);
}

TEST_CASE("return difference belief against Monte Carlo") {
  Rng rng(13);
  const TabularMdp mdp = fixture::random_mdp(10, 3, 0.9, rng);
  auto k = std::make_shared<const Matrix>(fixture::random_psd(10, rng));
  std::vector<Observation> data;
  for (int i = 0; i < 4; ++i) data.push_back({fixture::random_query(10, rng), standard_normal(rng)});
  const GpRewardModel m(k, 0.2, 1.0, data);
  const VisitationVector n1 = visitation(mdp, fixture::random_policy(mdp, rng));
  const VisitationVector n2 = visitation(mdp, fixture::random_policy(mdp, rng));
  const ReturnBelief b = m.return_diff_belief(n1, n2);
  const Vector d = n1.nu - n2.nu;
  const GaussianSampler sampler = m.sampler();
  oracle::Welford w;
  for (int i = 0; i < 100000; ++i) w.add(d.dot(sampler.draw(rng)));
  CHECK(std::abs(w.mean - b.mean) <= 3.0 * w.standard_error());
  CHECK(w.m2 / (w.n - 1) == doctest::Approx(b.variance).epsilon(0.02));
}

TEST_CASE("variance after a query equals actually conditioning") {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 8));
    auto k = std::make_shared<const Matrix>(fixture::random_psd(n, rng));
    std::vector<Observation> data;
    for (int i = 0; i < 3; ++i) data.push_back({fixture::random_query(n, rng), standard_normal(rng)});
    const GpRewardModel m(k, 0.1, 1.0, data);
    Vector v(n);
    for (int s = 0; s < n; ++s) v[s] = standard_normal(rng);
    const LinearRewardQuery q = fixture::random_query(n, rng);
    const double predicted = m.variance_after_query(v, q);
    for (double y : {-3.0, 0.0, 11.0}) CHECK(std::abs(predicted - m.condition(q, y).functional_belief(v).variance) <= 1e-10);
    CHECK(predicted <= m.functional_belief(v).variance + 1e-12);
    CHECK(std::abs(m.variance_after_query(m.probe(v), q) - predicted) <= 1e-12);
  }
}

TEST_CASE("uninformative and fully informative queries") {
  Rng rng(15);
  auto k = std::make_shared<const Matrix>(fixture::random_psd(5, rng));
  const GpRewardModel noisy(k, 0.1, 1.0);
  Vector v = Vector::Zero(5);
  v[1] = 2.0;
  v[3] = -1.0;
  const LinearRewardQuery zero = make_query({{2, 0.0}}, QueryKind::state_reward);
  CHECK(noisy.variance_after_query(v, zero) == doctest::Approx(noisy.functional_belief(v).variance));
  const GpRewardModel exact(k, 0.0, 1.0);
  const LinearRewardQuery target = make_query({{1, 2.0}, {3, -1.0}}, QueryKind::trajectory_comparison);
  CHECK(std::abs(exact.variance_after_query(v, target)) <= 1e-10);
}

TEST_CASE("dual-path variance, prior only") {
  Rng rng(16);
  LinearFeatureMap fm;
  fm.phi = Matrix::Random(6, 3);
  fm.precision = 0.5;
  Vector dnu(6);
  for (int s = 0; s < 6; ++s) dnu[s] = standard_normal(rng);
  const LinearRewardQuery zero = make_query({{0, 0.0}}, QueryKind::state_reward);
  const TlbCheck c = tlb_variance_check(fm, {}, dnu, zero, 0.3);
  const Vector dphi = fm.phi.transpose() * dnu;
  CHECK(c.gp_variance == doctest::Approx(0.09 * dphi.squaredNorm() / 0.5).epsilon(1e-10));
  CHECK(c.tlb_variance == doctest::Approx(0.09 * dphi.squaredNorm() / 0.5).epsilon(1e-10));
}

TEST_CASE("dual-path variance agrees at tiny precision") {
  Rng rng(17);
  LinearFeatureMap fm;
  fm.phi.resize(5, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) fm.phi(i, j) = standard_normal(rng);
  fm.precision = 1e-8;
  Vector dnu(5);
  for (int s = 0; s < 5; ++s) dnu[s] = standard_normal(rng);
  std::vector<LinearRewardQuery> data = {make_state_reward(0), make_state_reward(3)};
  const LinearRewardQuery q = make_state_reward(2);
  const TlbCheck a = tlb_variance_check(fm, data, dnu, q, 0.1);
  CHECK(std::abs(a.gp_variance - a.tlb_variance) <= 1e-6 * std::abs(a.tlb_variance));
  data.push_back(make_state_reward(3));
  const TlbCheck b = tlb_variance_check(fm, data, dnu, q, 0.1);
  CHECK(std::abs(b.gp_variance - b.tlb_variance) <= 1e-6 * std::abs(b.tlb_variance));
  CHECK(b.tlb_variance < a.tlb_variance);
}

TEST_CASE("dual-path dimension mismatch") {
  LinearFeatureMap fm;
  fm.phi = Matrix::Ones(4, 2);
  try {
    tlb_variance_check(fm, {}, Vector::Ones(3), make_state_reward(0), 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
}

TEST_CASE("entropy helpers") {
  CHECK(std::isinf(gaussian_entropy(0.0)));
  CHECK(gaussian_entropy(1.0) == doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E)));
  CHECK(information_gain(2.0, 0.5) == doctest::Approx(0.5 * std::log(4.0)));
  CHECK(std::isinf(information_gain(2.0, 0.0)));
}
