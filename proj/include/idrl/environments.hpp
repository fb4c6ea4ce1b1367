#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idrl/kernel.hpp"
#include "idrl/mdp.hpp"

namespace idrl {

/// `four_item` is the hand-built 4-step food gridworld (cherry, apple, corn,
/// pear) with its two plausibly optimal policies fixed in advance.
enum class EnvKind { chain, junction, gridworld, four_item };

std::string_view to_string(EnvKind kind);
EnvKind env_kind_from_string(std::string_view name);

struct EnvParameters {
  int n = 0;  ///< chain/junction length N
  int m = 0;  ///< chain: uncontrollable prefix M; junction: path length M
  int size = 10;
  int n_object_types = 10;
  int objects_per_type = 2;
  double wall_prob = 0.3;
  double discount = 0.99;
  std::optional<int> horizon;
};

struct EnvSpec {
  EnvKind kind = EnvKind::gridworld;
  EnvParameters parameters;
  std::uint64_t rng_seed = 0;
};

/// Parameters with the per-kind defaults filled in.
EnvSpec default_env_spec(EnvKind kind);
void validate_env_spec(const EnvSpec& spec);

enum GridAction : int { north = 0, east = 1, south = 2, west = 3, stay = 4 };

struct GridLayout {
  int rows = 0;
  int cols = 0;
  std::vector<int> object_type;   ///< per cell, -1 for floor
  std::vector<std::string> type_names;
  std::vector<double> type_reward;
  /// blocked[cell] bit d set when moving in direction d (north..west) is walled.
  std::vector<unsigned> blocked;
  int start = 0;

  int cell(int row, int col) const { return row * cols + col; }
  int row_of(int cell) const { return cell / cols; }
  int col_of(int cell) const { return cell % cols; }
};

struct ChainNode {
  int state;
  std::string label;
  int x;  ///< layout column for rendering
  int y;  ///< layout row for rendering
};

/// An MDP plus what learners and renderers need about its state space.
struct Environment {
  EnvSpec spec;
  TabularMdp mdp;
  StateGeometry geometry;
  KernelSpec kernel;
  std::optional<GridLayout> grid;
  std::vector<ChainNode> nodes;               ///< chain/junction rendering
  std::vector<std::pair<int, int>> edges;     ///< chain/junction rendering
  std::vector<int> query_states;              ///< restricts state-based query catalogs; empty = all
  std::vector<Policy> preset_candidates;      ///< fixed candidate set, when the env defines one
};

/// Chain of n states; in the first m both actions move right, afterwards
/// action 0 (a_l) moves left and action 1 (a_r) right. a_r self-loops at the
/// end. Rewards are a draw from the SE-kernel GP prior (σ = 2, l = 3).
TabularMdp build_chain(int n, int m, std::uint64_t seed, double discount = 0.99);

/// Spine of n states followed by two paths of m states each.
TabularMdp build_junction(int n, int m, double discount = 0.99);

TabularMdp build_gridworld(int size, int n_object_types, int objects_per_type, double wall_prob, std::uint64_t seed,
                           double discount = 0.99);

Environment build_environment(const EnvSpec& spec);

/// Chain hop distances (|i − j|).
Eigen::MatrixXd chain_hop_distance(int n);
/// Shortest-path hop distances on the junction graph, ignoring dynamics.
Eigen::MatrixXd junction_hop_distance(int n, int m);

namespace four_item {
/// Cell indices of the items in the 5×3 layout.
inline constexpr int kRows = 5;
inline constexpr int kCols = 3;
inline constexpr int kStart = 6;    // (2,0)
inline constexpr int kCherry = 7;   // (2,1)
inline constexpr int kApple = 1;    // (0,1)
inline constexpr int kCorn = 13;    // (4,1)
inline constexpr int kPear = 2;     // (0,2)
inline constexpr int kHorizon = 4;
}  // namespace four_item

}  // namespace idrl
