#pragma once

#include <string>

#include <json.hpp>

#include "idrl/environments.hpp"
#include "idrl/experiment.hpp"

namespace idrl {

using Json = nlohmann::json;

/// {"kind": ..., "parameters": {...}, "seed": ...}; omitted parameters take
/// the per-kind defaults. Unknown or ill-typed fields raise
/// invalid-configuration naming the field (e.g. "env.parameters.size").
Json env_spec_to_json(const EnvSpec& spec);
EnvSpec env_spec_from_json(const Json& j, const std::string& prefix = "env");

/// Keys mirror the CLI flags with underscores: env, query_kind, acquisition,
/// num_queries, seeds, noise, candidate_policies, candidate_update_every,
/// eir_xi, epd_optimism, mr_probability, mr_bernoulli_p, rollout_length,
/// master_seed, answer_delta, solver_tol, record_timing, threads, out.
Json config_to_json(const ExperimentConfig& config);
/// Fields absent from `j` keep their value from `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// "0..29", "3", "1,4,7" or combinations such as "0..4,10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace idrl
