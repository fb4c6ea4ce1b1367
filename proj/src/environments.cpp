#include "idrl/environments.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "idrl/error.hpp"
#include "idrl/gaussian.hpp"

namespace idrl {

namespace {

using TransitionTable = std::vector<std::vector<std::vector<Transition>>>;

constexpr double kSeVariance = 4.0;  // σ = 2
constexpr double kSeLengthscale = 3.0;

Vector uniform_dist(int n) { return Vector::Constant(n, 1.0 / n); }

Vector point_mass(int n, int s) {
  Vector v = Vector::Zero(n);
  v[s] = 1.0;
  return v;
}

KernelSpec se_kernel() {
  KernelSpec k;
  k.kind = KernelKind::se_graph;
  k.variance = kSeVariance;
  k.lengthscale = kSeLengthscale;
  return k;
}

KernelSpec object_kernel() {
  KernelSpec k;
  k.kind = KernelKind::object_type;
  k.variance = 1.0;
  return k;
}

void set_wall(GridLayout& g, int cell, int dir) {
  static constexpr int dr[] = {-1, 0, 1, 0};
  static constexpr int dc[] = {0, 1, 0, -1};
  g.blocked[cell] |= 1u << dir;
  const int r = g.row_of(cell) + dr[dir];
  const int c = g.col_of(cell) + dc[dir];
  if (r >= 0 && r < g.rows && c >= 0 && c < g.cols) g.blocked[g.cell(r, c)] |= 1u << ((dir + 2) % 4);
}

TransitionTable grid_transitions(const GridLayout& g) {
  static constexpr int dr[] = {-1, 0, 1, 0};
  static constexpr int dc[] = {0, 1, 0, -1};
  const int n = g.rows * g.cols;
  TransitionTable t(n, std::vector<std::vector<Transition>>(5));
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 5; ++a) {
      int next = s;
      if (a < 4 && !(g.blocked[s] & (1u << a))) {
        const int r = g.row_of(s) + dr[a];
        const int c = g.col_of(s) + dc[a];
        if (r >= 0 && r < g.rows && c >= 0 && c < g.cols) next = g.cell(r, c);
      }
      t[s][a] = {Transition{next, 1.0}};
    }
  }
  return t;
}

Vector grid_reward(const GridLayout& g) {
  const int n = g.rows * g.cols;
  Vector r = Vector::Zero(n);
  for (int s = 0; s < n; ++s)
    if (g.object_type[s] >= 0) r[s] = g.type_reward[g.object_type[s]];
  return r;
}

GridLayout random_grid(int size, int n_types, int per_type, double wall_prob, std::uint64_t seed) {
  Rng rng(seed);
  GridLayout g;
  g.rows = g.cols = size;
  const int n = size * size;
  g.blocked.assign(n, 0u);
  g.object_type.assign(n, -1);
  // horizontal neighbours, then vertical neighbours
  for (int r = 0; r < size; ++r)
    for (int c = 0; c + 1 < size; ++c)
      if (uniform01(rng) < wall_prob) set_wall(g, g.cell(r, c), east);
  for (int r = 0; r + 1 < size; ++r)
    for (int c = 0; c < size; ++c)
      if (uniform01(rng) < wall_prob) set_wall(g, g.cell(r, c), south);

  std::vector<int> cells(n);
  std::iota(cells.begin(), cells.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(cells[i], cells[uniform_index(rng, static_cast<std::size_t>(i) + 1)]);
  int k = 0;
  for (int type = 0; type < n_types; ++type)
    for (int j = 0; j < per_type; ++j) g.object_type[cells[k++]] = type;

  for (int type = 0; type < n_types; ++type) {
    g.type_names.push_back("object_" + std::to_string(type));
    g.type_reward.push_back(2.0 * uniform01(rng) - 1.0);
  }
  g.start = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
  return g;
}

GridLayout four_item_grid() {
  using namespace four_item;
  GridLayout g;
  g.rows = kRows;
  g.cols = kCols;
  const int n = kRows * kCols;
  g.blocked.assign(n, 0u);
  g.object_type.assign(n, -1);
  g.type_names = {"cherry", "apple", "corn", "pear"};
  g.type_reward = {0.3, 1.0, 0.7, 0.9};
  g.object_type[kCherry] = 0;
  g.object_type[kApple] = 1;
  g.object_type[kCorn] = 2;
  g.object_type[kPear] = 3;
  // the start cell opens only towards the cherry
  set_wall(g, kStart, north);
  set_wall(g, kStart, south);
  g.start = kStart;
  return g;
}

std::vector<Policy> four_item_policies() {
  using namespace four_item;
  const int n = kRows * kCols;
  const int upper = 4;   // (1,1)
  const int lower = 10;  // (3,1)
  Policy to_apple{std::vector<int>(n, stay)};
  to_apple.action_of[kStart] = east;
  to_apple.action_of[kCherry] = north;
  to_apple.action_of[upper] = north;
  Policy to_corn{std::vector<int>(n, stay)};
  to_corn.action_of[kStart] = east;
  to_corn.action_of[kCherry] = south;
  to_corn.action_of[lower] = south;
  return {to_apple, to_corn};
}

StateGeometry grid_geometry(const GridLayout& g) {
  StateGeometry geo;
  geo.num_states = g.rows * g.cols;
  geo.object_type = g.object_type;
  return geo;
}

Eigen::MatrixXd bfs_distances(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, -1.0);
  for (int src = 0; src < n; ++src) {
    std::queue<int> q;
    q.push(src);
    d(src, src) = 0.0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (d(src, v) >= 0.0) continue;
        d(src, v) = d(src, u) + 1.0;
        q.push(v);
      }
    }
  }
  return d;
}

std::vector<std::pair<int, int>> chain_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

std::vector<std::pair<int, int>> junction_edges(int n, int m) {
  auto e = chain_edges(n);
  e.emplace_back(n - 1, n);
  e.emplace_back(n - 1, n + m);
  for (int i = 0; i + 1 < m; ++i) {
    e.emplace_back(n + i, n + i + 1);
    e.emplace_back(n + m + i, n + m + i + 1);
  }
  return e;
}

}  // namespace

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::chain: return "chain";
    case EnvKind::junction: return "junction";
    case EnvKind::gridworld: return "gridworld";
    case EnvKind::four_item: return "four_item";
  }
  return "unknown";
}

EnvKind env_kind_from_string(std::string_view name) {
  if (name == "chain") return EnvKind::chain;
  if (name == "junction") return EnvKind::junction;
  if (name == "gridworld") return EnvKind::gridworld;
  if (name == "four_item" || name == "four-item") return EnvKind::four_item;
  fail(ErrorKind::invalid_configuration, "unknown env kind '" + std::string(name) + "'", "env.kind");
}

EnvSpec default_env_spec(EnvKind kind) {
  EnvSpec spec;
  spec.kind = kind;
  switch (kind) {
    case EnvKind::chain:
      spec.parameters.n = 20;
      spec.parameters.m = 10;
      break;
    case EnvKind::junction:
      spec.parameters.n = 15;
      spec.parameters.m = 5;
      break;
    case EnvKind::gridworld:
      break;
    case EnvKind::four_item:
      spec.parameters.horizon = four_item::kHorizon;
      break;
  }
  return spec;
}

void validate_env_spec(const EnvSpec& spec) {
  const auto& p = spec.parameters;
  if (!(p.discount >= 0.0 && p.discount < 1.0))
    fail(ErrorKind::invalid_parameters, "discount must lie in [0, 1)", "env.parameters.discount");
  if (p.horizon && *p.horizon <= 0) fail(ErrorKind::invalid_parameters, "horizon must be positive", "env.parameters.horizon");
  switch (spec.kind) {
    case EnvKind::chain:
      if (p.n < 1 || p.m < 1) fail(ErrorKind::invalid_parameters, "chain needs n >= 1 and m >= 1", "env.parameters.n");
      if (p.m >= p.n) fail(ErrorKind::invalid_parameters, "chain needs m < n", "env.parameters.m");
      break;
    case EnvKind::junction:
      if (p.n < 1) fail(ErrorKind::invalid_parameters, "junction needs n >= 1", "env.parameters.n");
      if (p.m < 1) fail(ErrorKind::invalid_parameters, "junction needs m >= 1", "env.parameters.m");
      break;
    case EnvKind::gridworld:
      if (p.size < 1) fail(ErrorKind::invalid_parameters, "grid size must be positive", "env.parameters.size");
      if (p.n_object_types < 0 || p.objects_per_type < 0)
        fail(ErrorKind::invalid_parameters, "object counts must be nonnegative", "env.parameters.n_object_types");
      if (p.n_object_types * p.objects_per_type > p.size * p.size)
        fail(ErrorKind::invalid_parameters, "more objects than grid cells", "env.parameters.n_object_types");
      if (!(p.wall_prob >= 0.0 && p.wall_prob <= 1.0))
        fail(ErrorKind::invalid_parameters, "wall_prob must lie in [0, 1]", "env.parameters.wall_prob");
      break;
    case EnvKind::four_item:
      break;
  }
}

Eigen::MatrixXd chain_hop_distance(int n) { return bfs_distances(n, chain_edges(n)); }

Eigen::MatrixXd junction_hop_distance(int n, int m) { return bfs_distances(n + 2 * m, junction_edges(n, m)); }

TabularMdp build_chain(int n, int m, std::uint64_t seed, double discount) {
  if (n < 1 || m < 1 || m >= n) fail(ErrorKind::invalid_parameters, "chain needs 1 <= m < n");
  TransitionTable t(n, std::vector<std::vector<Transition>>(2));
  for (int s = 0; s < n; ++s) {
    const int right = std::min(s + 1, n - 1);
    const int left = s < m ? right : s - 1;
    t[s][0] = {Transition{left, 1.0}};
    t[s][1] = {Transition{right, 1.0}};
  }
  StateGeometry geo;
  geo.num_states = n;
  geo.hop_distance = chain_hop_distance(n);
  const Eigen::MatrixXd k = prior_covariance(se_kernel(), geo);
  Rng rng(seed);
  GaussianSampler sampler(Vector::Zero(n), k, kSeVariance);
  Vector reward = sampler.draw(rng);
  return TabularMdp(n, 2, std::move(t), std::move(reward), uniform_dist(n), discount);
}

TabularMdp build_junction(int n, int m, double discount) {
  if (n < 1 || m < 1) fail(ErrorKind::invalid_parameters, "junction needs n >= 1 and m >= 1");
  const int total = n + 2 * m;
  TransitionTable t(total, std::vector<std::vector<Transition>>(2));
  for (int s = 0; s + 1 < n; ++s) t[s][0] = t[s][1] = {Transition{s + 1, 1.0}};
  t[n - 1][0] = {Transition{n, 1.0}};
  t[n - 1][1] = {Transition{n + m, 1.0}};
  for (int path = 0; path < 2; ++path) {
    const int base = n + path * m;
    for (int i = 0; i < m; ++i) {
      const int s = base + i;
      const int back = i > 0 ? s - 1 : s;
      const int fwd = i + 1 < m ? s + 1 : s;
      std::vector<Transition> row;
      if (back == fwd) {
        row = {Transition{s, 1.0}};
      } else {
        row = {Transition{back, 0.5}, Transition{fwd, 0.5}};
      }
      t[s][0] = t[s][1] = row;
    }
  }
  Vector reward = Vector::Zero(total);
  for (int i = 1; i <= m; ++i) {
    const double x = 0.7 * static_cast<double>(i) / m - 1.0;
    reward[n + i - 1] = 1.0 - x * x;
    reward[n + m + i - 1] = 0.8;
  }
  return TabularMdp(total, 2, std::move(t), std::move(reward), uniform_dist(total), discount);
}

TabularMdp build_gridworld(int size, int n_object_types, int objects_per_type, double wall_prob, std::uint64_t seed,
                           double discount) {
  EnvSpec spec = default_env_spec(EnvKind::gridworld);
  spec.parameters.size = size;
  spec.parameters.n_object_types = n_object_types;
  spec.parameters.objects_per_type = objects_per_type;
  spec.parameters.wall_prob = wall_prob;
  spec.parameters.discount = discount;
  validate_env_spec(spec);
  const GridLayout g = random_grid(size, n_object_types, objects_per_type, wall_prob, seed);
  const int n = size * size;
  return TabularMdp(n, 5, grid_transitions(g), grid_reward(g), point_mass(n, g.start), discount);
}

Environment build_environment(const EnvSpec& spec) {
  validate_env_spec(spec);
  const auto& p = spec.parameters;
  switch (spec.kind) {
    case EnvKind::chain: {
      TabularMdp mdp = build_chain(p.n, p.m, spec.rng_seed, p.discount).with_horizon(p.horizon);
      Environment env{spec, std::move(mdp), {}, se_kernel(), std::nullopt, {}, chain_edges(p.n), {}, {}};
      env.geometry.num_states = p.n;
      env.geometry.hop_distance = chain_hop_distance(p.n);
      for (int i = 0; i < p.n; ++i) env.nodes.push_back({i, "s" + std::to_string(i + 1), i, 0});
      return env;
    }
    case EnvKind::junction: {
      TabularMdp mdp = build_junction(p.n, p.m, p.discount).with_horizon(p.horizon);
      Environment env{spec, std::move(mdp), {}, se_kernel(), std::nullopt, {}, junction_edges(p.n, p.m), {}, {}};
      env.geometry.num_states = p.n + 2 * p.m;
      env.geometry.hop_distance = junction_hop_distance(p.n, p.m);
      for (int i = 0; i < p.n; ++i) env.nodes.push_back({i, "s" + std::to_string(i + 1), i, 1});
      for (int i = 0; i < p.m; ++i) {
        env.nodes.push_back({p.n + i, "A" + std::to_string(i + 1), p.n + i, 0});
      }
      for (int i = 0; i < p.m; ++i) {
        env.nodes.push_back({p.n + p.m + i, "B" + std::to_string(i + 1), p.n + i, 2});
      }
      return env;
    }
    case EnvKind::gridworld: {
      GridLayout g = random_grid(p.size, p.n_object_types, p.objects_per_type, p.wall_prob, spec.rng_seed);
      const int n = p.size * p.size;
      TabularMdp mdp(n, 5, grid_transitions(g), grid_reward(g), point_mass(n, g.start), p.discount, p.horizon);
      StateGeometry geo = grid_geometry(g);
      return Environment{spec, std::move(mdp), std::move(geo), object_kernel(), std::move(g), {}, {}, {}, {}};
    }
    case EnvKind::four_item: {
      GridLayout g = four_item_grid();
      const int n = g.rows * g.cols;
      TabularMdp mdp(n, 5, grid_transitions(g), grid_reward(g), point_mass(n, g.start), p.discount,
                     p.horizon.value_or(four_item::kHorizon));
      StateGeometry geo = grid_geometry(g);
      using namespace four_item;
      return Environment{spec,   std::move(mdp), std::move(geo), object_kernel(), std::move(g), {}, {},
                         {kCherry, kApple, kCorn, kPear}, four_item_policies()};
    }
  }
  fail(ErrorKind::invalid_configuration, "unknown env kind", "env.kind");
}

}  // namespace idrl
