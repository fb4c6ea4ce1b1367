#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "idrl/config_io.hpp"
#include "idrl/error.hpp"
#include "idrl/experiment.hpp"

namespace idrl {

/// Render payload of an environment for the UI. Never contains the hidden
/// true reward.
Json env_payload(const Environment& env);
/// Query presentation: elements with their grid coordinates or node labels.
Json query_payload(const Environment& env, const Proposal& proposal);
Json record_to_json(const ExperimentRecord& r);
Json policy_summary(const ActiveLearner& learner);

/// In-memory interactive sessions, each wrapping one ActiveLearner whose
/// expert is the caller. Mutations on a session are serialized; distinct
/// sessions proceed in parallel.
///
/// With a snapshot directory, each session is written to <dir>/<id>.json after
/// every change and `restore` rebuilds sessions by replaying their answers.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::string> snapshot_dir = std::nullopt);

  /// Body: experiment config keys plus optional "seed" (default 0).
  Json create(const Json& body);
  Json next_query(const std::string& id);
  /// Body: {"query_id": int, "answer": number | "first" | "second", "iteration"?: int}.
  Json submit_answer(const std::string& id, const Json& body);
  Json progress(const std::string& id) const;
  Json env(const std::string& id) const;

  std::size_t size() const;
  /// Loads every snapshot found in the snapshot directory; returns how many.
  std::size_t restore();

 private:
  struct Session {
    std::string id;
    Json request;
    std::uint64_t seed = 0;
    std::unique_ptr<ActiveLearner> learner;
    Json answers = Json::array();
    mutable std::mutex mutex;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Session> build(const std::string& id, const Json& request) const;
  void write_snapshot(const Session& s) const;
  std::string new_id();

  std::optional<std::string> snapshot_dir_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

/// HTTP status for a library error kind.
int http_status(ErrorKind kind);
Json error_payload(const Error& e);

}  // namespace idrl
