#include "idrl/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "idrl/error.hpp"

namespace idrl {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorKind::invalid_configuration, field + ": " + what, field);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) bad(prefix, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) bad(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown field");
}

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

template <class T>
void read(const Json& j, const std::string& key, T& out, const std::string& prefix) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  const std::string field = join(prefix, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad(field, "expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) bad(field, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        out = v.get<T>();
      } else {
        bad(field, "expected a nonnegative integer");
      }
    } else {
      out = v.get<T>();
    }
  } else {
    if (!v.is_number()) bad(field, "expected a number");
    out = v.get<T>();
  }
}

std::string read_string(const Json& j, const std::string& key, const std::string& prefix) {
  std::string s;
  read(j, key, s, prefix);
  return s;
}

}  // namespace

Json env_spec_to_json(const EnvSpec& spec) {
  const auto& p = spec.parameters;
  Json params = {{"discount", p.discount}};
  switch (spec.kind) {
    case EnvKind::chain:
    case EnvKind::junction:
      params["n"] = p.n;
      params["m"] = p.m;
      break;
    case EnvKind::gridworld:
      params["size"] = p.size;
      params["n_object_types"] = p.n_object_types;
      params["objects_per_type"] = p.objects_per_type;
      params["wall_prob"] = p.wall_prob;
      break;
    case EnvKind::four_item:
      break;
  }
  if (p.horizon) params["horizon"] = *p.horizon;
  return Json{{"kind", std::string(to_string(spec.kind))}, {"parameters", params}, {"seed", spec.rng_seed}};
}

EnvSpec env_spec_from_json(const Json& j, const std::string& prefix) {
  reject_unknown(j, {"kind", "parameters", "seed"}, prefix);
  if (!j.contains("kind")) bad(join(prefix, "kind"), "missing");
  const std::string kind = read_string(j, "kind", prefix);
  EnvKind k;
  try {
    k = env_kind_from_string(kind);
  } catch (const Error&) {
    bad(join(prefix, "kind"), "unknown env kind '" + kind + "'");
  }
  EnvSpec spec = default_env_spec(k);
  read(j, "seed", spec.rng_seed, prefix);
  if (j.contains("parameters")) {
    const Json& p = j.at("parameters");
    const std::string pp = join(prefix, "parameters");
    reject_unknown(p, {"n", "m", "size", "n_object_types", "objects_per_type", "wall_prob", "discount", "horizon"}, pp);
    auto& q = spec.parameters;
    read(p, "n", q.n, pp);
    read(p, "m", q.m, pp);
    read(p, "size", q.size, pp);
    read(p, "n_object_types", q.n_object_types, pp);
    read(p, "objects_per_type", q.objects_per_type, pp);
    read(p, "wall_prob", q.wall_prob, pp);
    read(p, "discount", q.discount, pp);
    if (p.contains("horizon")) {
      if (p.at("horizon").is_null()) {
        q.horizon.reset();
      } else {
        int h = 0;
        read(p, "horizon", h, pp);
        q.horizon = h;
      }
    }
  }
  try {
    validate_env_spec(spec);
  } catch (const Error& e) {
    fail(ErrorKind::invalid_configuration, e.what(), e.field());
  }
  return spec;
}

Json config_to_json(const ExperimentConfig& c) {
  return Json{
      {"env", env_spec_to_json(c.env)},
      {"query_kind", std::string(to_string(c.query_kind))},
      {"acquisition", std::string(to_string(c.acquisition))},
      {"num_queries", c.num_queries},
      {"seeds", c.seeds},
      {"noise", c.noise_std},
      {"candidate_policies", c.candidate_policies},
      {"candidate_update_every", c.candidate_update_every},
      {"eir_xi", c.eir_xi},
      {"epd_optimism", c.epd_optimism == EpdOptimism::variance ? "variance" : "std"},
      {"mr_probability", c.mr_probability == MrProbability::gp ? "gp" : "bernoulli"},
      {"mr_bernoulli_p", c.mr_bernoulli_p},
      {"rollout_length", c.rollout_length},
      {"master_seed", c.master_seed},
      {"answer_delta", c.answer_delta},
      {"solver_tol", c.solver_tol},
      {"record_timing", c.record_timing},
      {"threads", c.threads},
      {"out", c.output},
  };
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  reject_unknown(j,
                 {"env", "query_kind", "acquisition", "num_queries", "seeds", "noise", "candidate_policies",
                  "candidate_update_every", "eir_xi", "epd_optimism", "mr_probability", "mr_bernoulli_p",
                  "rollout_length", "master_seed", "answer_delta", "solver_tol", "record_timing", "threads", "out"},
                 "");
  if (j.contains("env")) c.env = env_spec_from_json(j.at("env"), "env");
  if (j.contains("query_kind")) {
    const std::string s = read_string(j, "query_kind", "");
    try {
      c.query_kind = query_kind_from_string(s);
    } catch (const Error&) {
      bad("query_kind", "unknown query kind '" + s + "'");
    }
  }
  if (j.contains("acquisition")) {
    const std::string s = read_string(j, "acquisition", "");
    try {
      c.acquisition = acquisition_from_string(s);
    } catch (const Error&) {
      bad("acquisition", "unknown acquisition '" + s + "'");
    }
  }
  read(j, "num_queries", c.num_queries, "");
  if (j.contains("seeds")) {
    const Json& s = j.at("seeds");
    if (s.is_string()) {
      c.seeds = parse_seed_list(s.get<std::string>());
    } else if (s.is_array()) {
      c.seeds.clear();
      for (const auto& v : s) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) bad("seeds", "expected nonnegative integers");
        c.seeds.push_back(v.get<std::uint64_t>());
      }
    } else {
      bad("seeds", "expected a list or a range string");
    }
  }
  read(j, "noise", c.noise_std, "");
  read(j, "candidate_policies", c.candidate_policies, "");
  read(j, "candidate_update_every", c.candidate_update_every, "");
  read(j, "eir_xi", c.eir_xi, "");
  if (j.contains("epd_optimism")) {
    const std::string s = read_string(j, "epd_optimism", "");
    if (s == "variance") c.epd_optimism = EpdOptimism::variance;
    else if (s == "std") c.epd_optimism = EpdOptimism::std;
    else bad("epd_optimism", "expected 'variance' or 'std'");
  }
  if (j.contains("mr_probability")) {
    const std::string s = read_string(j, "mr_probability", "");
    if (s == "gp") c.mr_probability = MrProbability::gp;
    else if (s == "bernoulli") c.mr_probability = MrProbability::bernoulli;
    else bad("mr_probability", "expected 'gp' or 'bernoulli'");
  }
  read(j, "mr_bernoulli_p", c.mr_bernoulli_p, "");
  read(j, "rollout_length", c.rollout_length, "");
  read(j, "master_seed", c.master_seed, "");
  read(j, "answer_delta", c.answer_delta, "");
  read(j, "solver_tol", c.solver_tol, "");
  read(j, "record_timing", c.record_timing, "");
  read(j, "threads", c.threads, "");
  read(j, "out", c.output, "");
  return c;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_configuration, "cannot open config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::invalid_configuration, std::string("config file is not valid JSON: ") + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(text);
  std::string part;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) bad("seeds", "bad seed list '" + text + "'");
    return std::stoull(s);
  };
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(part));
      continue;
    }
    const std::uint64_t lo = number(part.substr(0, dots));
    const std::uint64_t hi = number(part.substr(dots + 2));
    if (hi < lo) bad("seeds", "empty seed range '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) bad("seeds", "no seeds given");
  return out;
}

}  // namespace idrl
