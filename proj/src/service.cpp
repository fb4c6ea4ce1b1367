#include "idrl/service.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "idrl/error.hpp"

namespace idrl {

namespace fs = std::filesystem;

namespace {

Json element_payload(const Environment& env, int s, double w) {
  Json e = {{"state", s}, {"weight", w}};
  if (env.grid) {
    const auto& g = *env.grid;
    e["row"] = g.row_of(s);
    e["col"] = g.col_of(s);
    const int t = g.object_type[s];
    e["object"] = t >= 0 ? Json(g.type_names[t]) : Json(nullptr);
  } else {
    for (const auto& n : env.nodes)
      if (n.state == s) e["label"] = n.label;
  }
  return e;
}

Json metrics_json(const Metrics& m) {
  return Json{{"regret", m.regret}, {"mse", m.mse}, {"cosine", m.cosine}, {"cosine_defined", m.cosine_defined}};
}

double answer_value(const Json& answer, const Proposal& p, double delta) {
  if (answer.is_string()) {
    const std::string s = answer.get<std::string>();
    if (!is_comparison(p.query.kind))
      fail(ErrorKind::invalid_input, "binary answers are only accepted for comparison queries", "answer");
    if (s == "first") return delta;
    if (s == "second") return -delta;
    fail(ErrorKind::invalid_input, "binary answer must be 'first' or 'second'", "answer");
  }
  if (!answer.is_number()) fail(ErrorKind::invalid_input, "answer must be a number or 'first'/'second'", "answer");
  const double v = answer.get<double>();
  if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "answer must be finite", "answer");
  return v;
}

}  // namespace

Json env_payload(const Environment& env) {
  const auto& mdp = env.mdp;
  Json j = {{"kind", std::string(to_string(env.spec.kind))},
            {"num_states", mdp.num_states()},
            {"num_actions", mdp.num_actions()},
            {"discount", mdp.discount()},
            {"horizon", mdp.horizon() ? Json(*mdp.horizon()) : Json(nullptr)}};
  if (env.grid) {
    const auto& g = *env.grid;
    Json walls = Json::array();
    Json objects = Json::array();
    for (int c = 0; c < g.rows * g.cols; ++c) {
      const unsigned b = g.blocked[c];
      if (b) {
        walls.push_back({{"cell", c},
                         {"row", g.row_of(c)},
                         {"col", g.col_of(c)},
                         {"north", bool(b & 1u)},
                         {"east", bool(b & 2u)},
                         {"south", bool(b & 4u)},
                         {"west", bool(b & 8u)}});
      }
      if (g.object_type[c] >= 0)
        objects.push_back({{"cell", c},
                           {"row", g.row_of(c)},
                           {"col", g.col_of(c)},
                           {"type", g.object_type[c]},
                           {"name", g.type_names[g.object_type[c]]}});
    }
    j["grid"] = {{"rows", g.rows},
                 {"cols", g.cols},
                 {"start", {{"cell", g.start}, {"row", g.row_of(g.start)}, {"col", g.col_of(g.start)}}},
                 {"walls", walls},
                 {"objects", objects},
                 {"actions", {"north", "east", "south", "west", "stay"}}};
  } else {
    Json nodes = Json::array();
    for (const auto& n : env.nodes) nodes.push_back({{"state", n.state}, {"label", n.label}, {"x", n.x}, {"y", n.y}});
    Json edges = Json::array();
    for (auto [a, b] : env.edges) edges.push_back({a, b});
    j["graph"] = {{"nodes", nodes}, {"edges", edges}};
  }
  return j;
}

Json query_payload(const Environment& env, const Proposal& p) {
  Json elements = Json::array();
  for (std::size_t k = 0; k < p.query.states.size(); ++k)
    elements.push_back(element_payload(env, p.query.states[k], p.query.weights[k]));
  const bool binary = is_comparison(p.query.kind);
  return Json{{"status", "pending"},
              {"query_id", p.query_id},
              {"iteration", p.iteration},
              {"kind", std::string(to_string(p.query.kind))},
              {"answer_type", binary ? "binary" : "numeric"},
              {"elements", elements}};
}

Json record_to_json(const ExperimentRecord& r) {
  return Json{{"seed", r.seed},       {"iteration", r.iteration}, {"acquisition", r.acquisition}, {"env", r.env},
              {"query_id", r.query_id}, {"response", r.response}, {"regret", r.regret},           {"mse", r.mse},
              {"cosine", r.cosine},   {"wall_time_ms", r.wall_time_ms}};
}

Json policy_summary(const ActiveLearner& learner) {
  static const char* grid_actions[] = {"north", "east", "south", "west", "stay"};
  const auto& env = learner.env();
  Json actions = Json::array();
  for (int a : learner.current_policy().action_of) {
    if (env.grid) actions.push_back(grid_actions[a]);
    else actions.push_back(a);
  }
  return Json{{"actions", actions}, {"metrics", metrics_json(learner.current_metrics())}};
}

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    case ErrorKind::invalid_input: return 422;
    case ErrorKind::invalid_parameters:
    case ErrorKind::invalid_configuration:
    case ErrorKind::unsupported_query_kind:
    case ErrorKind::insufficient_candidates: return 400;
    case ErrorKind::degenerate_query:
    case ErrorKind::numerical_failure: return 500;
  }
  return 500;
}

Json error_payload(const Error& e) {
  Json j = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (!e.field().empty()) j["field"] = e.field();
  return j;
}

SessionManager::SessionManager(std::optional<std::string> snapshot_dir) : snapshot_dir_(std::move(snapshot_dir)) {
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  if (snapshot_dir_) fs::create_directories(*snapshot_dir_);
}

std::string SessionManager::new_id() {
  std::lock_guard lock(id_mutex_);
  const std::uint64_t a = mix64(id_salt_ ^ ++id_counter_);
  const std::uint64_t b = mix64(a ^ 0x9e3779b97f4a7c15ULL);
  std::ostringstream ss;
  ss << std::hex << std::setfill('0') << std::setw(16) << a << std::setw(16) << b;
  return ss.str();
}

std::shared_ptr<SessionManager::Session> SessionManager::build(const std::string& id, const Json& request) const {
  if (!request.is_object()) fail(ErrorKind::invalid_configuration, "session request must be a JSON object");
  Json cfg = request;
  std::uint64_t seed = 0;
  if (cfg.contains("seed")) {
    const Json& s = cfg.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
      fail(ErrorKind::invalid_configuration, "seed: expected a nonnegative integer", "seed");
    seed = s.get<std::uint64_t>();
    cfg.erase("seed");
  }
  ExperimentConfig base;
  base.seeds = {seed};
  ExperimentConfig config = config_from_json(cfg, base);
  config.seeds = {seed};
  validate_config(config);
  auto s = std::make_shared<Session>();
  s->id = id;
  s->request = request;
  s->seed = seed;
  s->learner = std::make_unique<ActiveLearner>(config, seed);
  return s;
}

Json SessionManager::create(const Json& body) {
  const std::string id = new_id();
  auto s = build(id, body);
  Json out = {{"session_id", id},
              {"status", "created"},
              {"seed", s->seed},
              {"config", config_to_json(s->learner->config())},
              {"env", env_payload(s->learner->env())}};
  {
    std::lock_guard lock(s->mutex);
    write_snapshot(*s);
  }
  std::unique_lock lock(map_mutex_);
  sessions_[id] = std::move(s);
  return out;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorKind::not_found, "unknown session '" + id + "'");
  return it->second;
}

Json SessionManager::next_query(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  ActiveLearner& l = *s->learner;
  if (l.finished()) {
    return Json{{"status", "finished"},
                {"iterations_done", l.iterations_done()},
                {"num_queries", l.config().num_queries},
                {"final_policy", policy_summary(l)}};
  }
  const bool fresh = !l.pending();
  Json out = query_payload(l.env(), l.propose());
  if (fresh) write_snapshot(*s);
  return out;
}

Json SessionManager::submit_answer(const std::string& id, const Json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  ActiveLearner& l = *s->learner;
  if (!body.is_object()) fail(ErrorKind::invalid_input, "answer body must be a JSON object");
  if (!body.contains("query_id") || !body.at("query_id").is_number_integer())
    fail(ErrorKind::invalid_input, "query_id: expected an integer", "query_id");
  if (!body.contains("answer")) fail(ErrorKind::invalid_input, "answer: missing", "answer");
  const int query_id = body.at("query_id").get<int>();
  const auto& pending = l.pending();
  if (!pending) fail(ErrorKind::conflict, "no query is pending for this session");
  if (pending->query_id != query_id)
    fail(ErrorKind::conflict, "query_id " + std::to_string(query_id) + " does not match the pending query");
  if (body.contains("iteration")) {
    if (!body.at("iteration").is_number_integer() || body.at("iteration").get<int>() != pending->iteration)
      fail(ErrorKind::conflict, "iteration does not match the pending query");
  }
  const double y = answer_value(body.at("answer"), *pending, l.config().answer_delta);
  const int iteration = pending->iteration;
  const ExperimentRecord& r = l.observe(y);
  s->answers.push_back({{"iteration", iteration}, {"query_id", query_id}, {"value", y}});
  write_snapshot(*s);
  return Json{{"status", l.finished() ? "finished" : "accepted"},
              {"record", record_to_json(r)},
              {"iterations_done", l.iterations_done()},
              {"num_queries", l.config().num_queries}};
}

Json SessionManager::progress(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  const ActiveLearner& l = *s->learner;
  Json history = Json::array();
  Json curve = Json::array();
  for (const auto& r : l.history()) {
    history.push_back(record_to_json(r));
    curve.push_back({{"iteration", r.iteration}, {"regret", r.regret}});
  }
  const Vector& mean = l.model().mean();
  Json heat = {{"values", std::vector<double>(mean.data(), mean.data() + mean.size())}};
  if (l.env().grid) {
    heat["rows"] = l.env().grid->rows;
    heat["cols"] = l.env().grid->cols;
  }
  return Json{{"session_id", s->id},
              {"iterations_done", l.iterations_done()},
              {"num_queries", l.config().num_queries},
              {"finished", l.finished()},
              {"pending_query_id", l.pending() ? Json(l.pending()->query_id) : Json(nullptr)},
              {"history", history},
              {"regret_curve", curve},
              {"heatmap", heat},
              {"policy", policy_summary(l)}};
}

Json SessionManager::env(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return env_payload(s->learner->env());
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

void SessionManager::write_snapshot(const Session& s) const {
  if (!snapshot_dir_) return;
  const Json j = {{"session_id", s.id},
                  {"request", s.request},
                  {"pending_query_id",
                   s.learner->pending() ? Json(s.learner->pending()->query_id) : Json(nullptr)},
                  {"answers", s.answers}};
  const fs::path target = fs::path(*snapshot_dir_) / (s.id + ".json");
  const fs::path tmp = fs::path(*snapshot_dir_) / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::invalid_input, "cannot write snapshot '" + tmp.string() + "'");
    out << j.dump(1) << '\n';
  }
  fs::rename(tmp, target);
}

std::size_t SessionManager::restore() {
  if (!snapshot_dir_) return 0;
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(*snapshot_dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    Json j;
    try {
      in >> j;
    } catch (const Json::parse_error&) {
      continue;
    }
    const std::string id = j.at("session_id").get<std::string>();
    auto s = build(id, j.at("request"));
    for (const auto& a : j.at("answers")) {
      const Proposal& p = s->learner->propose();
      if (p.query_id != a.at("query_id").get<int>())
        fail(ErrorKind::conflict, "snapshot of session '" + id + "' does not replay consistently");
      s->learner->observe(a.at("value").get<double>());
      s->answers.push_back(a);
    }
    if (j.contains("pending_query_id") && !j.at("pending_query_id").is_null()) s->learner->propose();
    std::unique_lock lock(map_mutex_);
    sessions_[id] = std::move(s);
    ++count;
  }
  return count;
}

}  // namespace idrl
