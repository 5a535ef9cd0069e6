#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "engine/ability.hpp"
#include "engine/scenario.hpp"
#include "engine/store.hpp"

namespace engine {

// Request-level operations shared by the HTTP layer and tests. Bodies and
// responses are JSON documents; failures are EngineError.
class Service {
 public:
  explicit Service(Store& store) : store_(store) {}

  Json create_scenario(const Json& body);
  Json get_scenario(const std::string& id) const;
  Json list_scenarios() const;
  void delete_scenario(const std::string& id);

  // body: {"model": tag, "options": {...}}
  Json solve(const std::string& scenario_id, const Json& body);
  Json get_solve(const std::string& id) const;

  // body: {"series": {...}} or {"scenario_id", "instrument_id"}, plus
  // "length", "trials", "seed".
  Json open_session(const Json& body);
  Json answer(const std::string& session_id, const Json& body);
  Json session_estimate(const std::string& session_id) const;

 private:
  struct Session {
    explicit Session(TrialSession t) : trials(std::move(t)) {}
    std::mutex mu;
    TrialSession trials;
  };
  std::shared_ptr<Session> session(const std::string& id) const;

  Store& store_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t session_seq_ = 0;
};

Json estimate_json(const AbilityEstimate& e);
Json trial_json(const TrialRecord& r);

}  // namespace engine
