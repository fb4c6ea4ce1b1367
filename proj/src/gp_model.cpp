#include "idrl/gp_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "idrl/error.hpp"

namespace idrl {

namespace {

// a noiseless query is degenerate once its latent variance has shrunk below
// this fraction of its prior variance
constexpr double kDegenerateRel = 1e-8;

Matrix query_matrix(const std::vector<Observation>& data, int n) {
  Matrix c = Matrix::Zero(n, static_cast<int>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& q = data[i].query;
    for (std::size_t j = 0; j < q.states.size(); ++j) c(q.states[j], static_cast<int>(i)) += q.weights[j];
  }
  return c;
}

Eigen::LLT<Matrix> factor_gram(const Matrix& gram, double noise_var, double scale) {
  if (noise_var > 0.0) {
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) return llt;
  }
  return jittered_cholesky(gram, scale).llt;
}

}  // namespace

GpRewardModel::GpRewardModel(std::shared_ptr<const Matrix> prior_cov, double noise_std, double jitter_scale,
                             std::vector<Observation> dataset)
    : prior_(std::move(prior_cov)), noise_std_(noise_std), jitter_scale_(jitter_scale), dataset_(std::move(dataset)) {
  if (!prior_ || prior_->rows() != prior_->cols() || prior_->rows() == 0)
    fail(ErrorKind::invalid_input, "prior covariance must be a nonempty square matrix");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_))
    fail(ErrorKind::invalid_parameters, "noise must be finite and nonnegative", "noise");
  if (!(jitter_scale_ > 0.0)) jitter_scale_ = 1.0;
  const int n = static_cast<int>(prior_->rows());
  for (const auto& obs : dataset_) {
    if (!std::isfinite(obs.response)) fail(ErrorKind::invalid_input, "response must be finite");
    for (int s : obs.query.states)
      if (s < 0 || s >= n) fail(ErrorKind::invalid_input, "query state out of range");
  }

  const Matrix& k = *prior_;
  if (dataset_.empty()) {
    mean_ = Vector::Zero(n);
    cov_ = k;
    return;
  }
  const int m = static_cast<int>(dataset_.size());
  const Matrix c = query_matrix(dataset_, n);
  const Matrix kc = k * c;
  Matrix gram = c.transpose() * kc;
  gram = 0.5 * (gram + gram.transpose());
  gram.diagonal().array() += noise_variance();
  const Eigen::LLT<Matrix> llt = factor_gram(gram, noise_variance(), jitter_scale_);

  Vector y(m);
  for (int i = 0; i < m; ++i) y[i] = dataset_[i].response;
  mean_ = kc * llt.solve(y);
  const Matrix v = llt.matrixL().solve(kc.transpose());
  cov_ = k - v.transpose() * v;
  cov_ = 0.5 * (cov_ + cov_.transpose());
}

GpRewardModel GpRewardModel::from_kernel(const KernelSpec& kernel, const StateGeometry& geometry, double noise_std) {
  auto prior = std::make_shared<const Matrix>(idrl::prior_covariance(kernel, geometry));
  const double scale = prior->rows() > 0 ? prior->diagonal().maxCoeff() : 1.0;
  return GpRewardModel(std::move(prior), noise_std, scale > 0.0 ? scale : 1.0);
}

Vector GpRewardModel::sigma_times(const LinearRewardQuery& query) const {
  Vector out = Vector::Zero(num_states());
  for (std::size_t j = 0; j < query.states.size(); ++j) out += query.weights[j] * cov_.col(query.states[j]);
  return out;
}

double GpRewardModel::latent_variance(const LinearRewardQuery& query) const {
  double v = 0.0;
  for (std::size_t i = 0; i < query.states.size(); ++i)
    for (std::size_t j = 0; j < query.states.size(); ++j)
      v += query.weights[i] * query.weights[j] * cov_(query.states[i], query.states[j]);
  return v;
}

double GpRewardModel::prior_latent_variance(const LinearRewardQuery& query) const {
  double v = 0.0;
  const Matrix& k = *prior_;
  for (std::size_t i = 0; i < query.states.size(); ++i)
    for (std::size_t j = 0; j < query.states.size(); ++j)
      v += query.weights[i] * query.weights[j] * k(query.states[i], query.states[j]);
  return v;
}

bool GpRewardModel::is_degenerate(const LinearRewardQuery& query) const {
  for (int s : query.states)
    if (s < 0 || s >= num_states()) fail(ErrorKind::invalid_input, "query state out of range");
  if (noise_variance() > 0.0) return false;
  return latent_variance(query) <= kDegenerateRel * std::max(prior_latent_variance(query), 0.0);
}

GpRewardModel GpRewardModel::condition(const LinearRewardQuery& query, double y) const {
  if (!std::isfinite(y)) fail(ErrorKind::invalid_input, "response must be finite");
  if (is_degenerate(query))
    fail(ErrorKind::degenerate_query, "noiseless query is already determined by the data");
  std::vector<Observation> data = dataset_;
  data.push_back({query, y});
  return GpRewardModel(prior_, noise_std_, jitter_scale_, std::move(data));
}

std::pair<Vector, Matrix> GpRewardModel::predict(std::span<const int> states) const {
  const int k = static_cast<int>(states.size());
  Vector m(k);
  Matrix c(k, k);
  for (int i = 0; i < k; ++i) {
    if (states[i] < 0 || states[i] >= num_states()) fail(ErrorKind::invalid_input, "state out of range");
    m[i] = mean_[states[i]];
    for (int j = 0; j < k; ++j) c(i, j) = cov_(states[i], states[j]);
  }
  return {m, c};
}

ReturnBelief GpRewardModel::functional_belief(const Vector& v) const {
  if (v.size() != num_states()) fail(ErrorKind::invalid_input, "functional has wrong dimension");
  return ReturnBelief{v.dot(mean_), std::max(0.0, v.dot(cov_ * v))};
}

ReturnBelief GpRewardModel::return_diff_belief(const VisitationVector& nu1, const VisitationVector& nu2) const {
  if (nu1.nu.size() != nu2.nu.size()) fail(ErrorKind::invalid_input, "visitations have different sizes");
  return functional_belief(nu1.nu - nu2.nu);
}

FunctionalProbe GpRewardModel::probe(const Vector& v) const {
  if (v.size() != num_states()) fail(ErrorKind::invalid_input, "functional has wrong dimension");
  FunctionalProbe p{v, cov_ * v, {}};
  p.belief = ReturnBelief{v.dot(mean_), std::max(0.0, v.dot(p.sigma_v))};
  return p;
}

std::optional<double> GpRewardModel::try_variance_after_query(const FunctionalProbe& probe,
                                                              const LinearRewardQuery& query) const {
  if (is_degenerate(query)) return std::nullopt;
  double a = 0.0;
  for (std::size_t j = 0; j < query.states.size(); ++j) a += query.weights[j] * probe.sigma_v[query.states[j]];
  const double b = latent_variance(query) + noise_variance();
  if (!(b > 0.0)) return std::nullopt;
  return std::max(0.0, probe.belief.variance - a * a / b);
}

double GpRewardModel::variance_after_query(const FunctionalProbe& probe, const LinearRewardQuery& query) const {
  auto v = try_variance_after_query(probe, query);
  if (!v) fail(ErrorKind::degenerate_query, "noiseless query is already determined by the data");
  return *v;
}

double GpRewardModel::variance_after_query(const Vector& v, const LinearRewardQuery& query) const {
  return variance_after_query(probe(v), query);
}

double GpRewardModel::response_mean(const LinearRewardQuery& query) const { return query.expectation(mean_); }

double GpRewardModel::response_variance(const LinearRewardQuery& query) const {
  return std::max(0.0, latent_variance(query)) + noise_variance();
}

Vector GpRewardModel::mean_after(const LinearRewardQuery& query, double y) const {
  if (is_degenerate(query)) return mean_;
  const double b = latent_variance(query) + noise_variance();
  return mean_ + sigma_times(query) * ((y - response_mean(query)) / b);
}

GaussianSampler GpRewardModel::sampler() const { return GaussianSampler(mean_, cov_, jitter_scale_); }

Vector GpRewardModel::sample_reward(Rng& rng) const { return sampler().draw(rng); }

double gaussian_entropy(double variance) {
  if (variance <= 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

double information_gain(double variance_before, double variance_after) {
  if (variance_before <= 0.0) return 0.0;
  if (variance_after <= 0.0) return std::numeric_limits<double>::infinity();
  return gaussian_entropy(variance_before) - gaussian_entropy(variance_after);
}

TlbCheck tlb_variance_check(const LinearFeatureMap& fmap, std::span<const LinearRewardQuery> dataset,
                            const Vector& delta_nu, const LinearRewardQuery& query, double noise_std) {
  const int n = static_cast<int>(fmap.phi.rows());
  const int d = static_cast<int>(fmap.phi.cols());
  if (delta_nu.size() != n) fail(ErrorKind::invalid_input, "delta_nu does not match the feature map");
  if (!(noise_std > 0.0)) fail(ErrorKind::invalid_parameters, "linear-bandit check needs positive noise", "noise");

  KernelSpec kernel;
  kernel.kind = KernelKind::linear_features;
  LinearFeatureMap scaled = fmap;
  scaled.precision = fmap.precision / (noise_std * noise_std);
  kernel.feature_map = std::make_shared<const LinearFeatureMap>(std::move(scaled));
  StateGeometry geo;
  geo.num_states = n;
  GpRewardModel model = GpRewardModel::from_kernel(kernel, geo, noise_std);
  std::vector<Observation> data;
  for (const auto& q : dataset) data.push_back({q, 0.0});
  model = GpRewardModel(std::make_shared<const Matrix>(model.prior_covariance()), noise_std, model.jitter_scale(),
                        std::move(data));
  const double gp = model.variance_after_query(delta_nu, query);

  Matrix a = fmap.precision * Matrix::Identity(d, d);
  auto accumulate = [&](const LinearRewardQuery& q) {
    if (q.states.empty()) return;
    for (int s : q.states)
      if (s < 0 || s >= n) fail(ErrorKind::invalid_input, "query state out of range");
    const Vector f = fmap.phi.transpose() * q.dense(n);
    a += f * f.transpose();
  };
  for (const auto& q : dataset) accumulate(q);
  accumulate(query);
  const Vector dphi = fmap.phi.transpose() * delta_nu;
  const double tlb = noise_std * noise_std * dphi.dot(a.ldlt().solve(dphi));
  return TlbCheck{gp, tlb};
}

}  // namespace idrl
