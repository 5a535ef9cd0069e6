#include "engine/service.hpp"

#include <chrono>

#include "engine/errors.hpp"

namespace engine {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw EngineError(ErrorCode::ValidationError, msg, path);
}

std::uint64_t unsigned_field(const Json& body, const char* key, std::uint64_t fallback) {
  auto it = body.find(key);
  if (it == body.end()) return fallback;
  if (!it->is_number_unsigned()) invalid(key, std::string(key) + " must be a nonnegative integer");
  return it->get<std::uint64_t>();
}

Json segment_json(const TrialSession& s) {
  const std::size_t o = s.current_offset();
  Json pts = Json::array();
  for (std::size_t i = o; i + 1 < o + s.length(); ++i)
    pts.push_back(Json{{"t", format_timestamp(s.series().timestamps[i])}, {"price", format_decimal(s.series().prices[i])}});
  return Json{{"trial", s.answered()}, {"offset", o}, {"points", std::move(pts)}};
}

}  // namespace

Json estimate_json(const AbilityEstimate& e) {
  Json j;
  j["p_hat"] = e.p_hat;
  j["n_trials"] = e.n_trials;
  j["n_correct"] = e.n_correct;
  j["ci95"] = Json::array({e.ci_lo, e.ci_hi});
  j["method"] = e.method == CiMethod::Normal ? "normal" : "exact";
  return j;
}

Json trial_json(const TrialRecord& r) {
  Json j;
  j["segment_offset"] = r.segment_offset;
  j["segment_length"] = r.segment_length;
  j["prediction"] = to_string(r.prediction);
  j["actual"] = to_string(r.actual);
  j["correct"] = r.correct;
  return j;
}

Json Service::create_scenario(const Json& body) {
  Scenario s = scenario_from_json(body);
  validate_scenario(s);
  return scenario_to_json(store_.save_scenario(std::move(s)));
}

Json Service::get_scenario(const std::string& id) const { return scenario_to_json(store_.load_scenario(id)); }

Json Service::list_scenarios() const {
  Json arr = Json::array();
  for (const auto& s : store_.list_scenarios())
    arr.push_back(Json{{"id", s.id}, {"name", s.name}, {"updated_at", format_instant(s.updated_at)}});
  return Json{{"scenarios", std::move(arr)}};
}

void Service::delete_scenario(const std::string& id) { store_.delete_scenario(id); }

Json Service::solve(const std::string& scenario_id, const Json& body) {
  if (!body.is_object()) invalid("", "expected an object");
  for (auto it = body.begin(); it != body.end(); ++it)
    if (it.key() != "model" && it.key() != "options") invalid(it.key(), "unknown field");
  if (!body.contains("model") || !body["model"].is_string()) invalid("model", "model is required");
  const Scenario s = store_.load_scenario(scenario_id);
  SolveRecord rec;
  rec.scenario_id = scenario_id;
  rec.model = parse_model_tag(body["model"].get<std::string>());
  rec.options = solve_options_from_json(body.contains("options") ? body["options"] : Json());
  const auto t0 = std::chrono::steady_clock::now();
  rec.result = solve_scenario_result(s, rec.model, rec.options);
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return solve_record_to_json(store_.save_solve(std::move(rec)));
}

Json Service::get_solve(const std::string& id) const { return solve_record_to_json(store_.load_solve(id)); }

Json Service::open_session(const Json& body) {
  if (!body.is_object()) invalid("", "expected an object");
  TimeSeries series;
  if (body.contains("series")) {
    // reuse the scenario series codec; its paths start at series[0]
    try {
      series = scenario_from_json(Json{{"series", Json::array({body["series"]})}}).series.front();
      series.validate();
    } catch (const EngineError& e) {
      std::string path = e.path();
      if (path.rfind("series[0]", 0) == 0) path = "series" + path.substr(9);
      else if (path.rfind("prices", 0) == 0 || path.rfind("timestamps", 0) == 0) path = "series." + path;
      invalid(path, e.what());
    }
  } else if (body.contains("scenario_id")) {
    const Scenario s = store_.load_scenario(body.value("scenario_id", ""));
    const std::string want = body.value("instrument_id", "");
    bool found = false;
    for (const auto& ts : s.series)
      if (want.empty() || ts.instrument_id == want) {
        series = ts;
        found = true;
        break;
      }
    if (!found) throw EngineError(ErrorCode::MissingInputs, "the scenario has no matching series", "series");
  } else {
    invalid("series", "either series or scenario_id is required");
  }
  const std::size_t length = unsigned_field(body, "length", 30);
  const std::size_t trials = unsigned_field(body, "trials", 20);
  const std::uint64_t seed = unsigned_field(body, "seed", 1);
  auto sess = std::make_shared<Session>(TrialSession(std::move(series), length, trials, seed));
  std::string id;
  {
    std::lock_guard lk(sessions_mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "abl-%06llu", static_cast<unsigned long long>(++session_seq_));
    id = buf;
    sessions_[id] = sess;
  }
  std::lock_guard lk(sess->mu);
  Json out;
  out["id"] = id;
  out["instrument_id"] = sess->trials.series().instrument_id;
  out["length"] = length;
  out["total"] = sess->trials.total();
  out["answered"] = 0;
  out["segment"] = sess->trials.done() ? Json() : segment_json(sess->trials);
  return out;
}

std::shared_ptr<Service::Session> Service::session(const std::string& id) const {
  std::lock_guard lk(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw EngineError(ErrorCode::NotFound, "no ability session with id " + id, "id");
  return it->second;
}

Json Service::answer(const std::string& session_id, const Json& body) {
  auto sess = session(session_id);
  if (!body.is_object() || !body.contains("prediction") || !body["prediction"].is_string())
    invalid("prediction", "prediction must be \"up\" or \"not_up\"");
  const Move m = parse_move(body["prediction"].get<std::string>());
  std::lock_guard lk(sess->mu);
  auto& t = sess->trials;
  const std::size_t index = t.answered();
  const TrialRecord rec = t.answer(m);
  const std::size_t revealed = rec.segment_offset + rec.segment_length - 1;
  std::size_t correct = 0;
  for (const auto& r : t.records()) correct += r.correct ? 1 : 0;
  Json out;
  out["trial"] = index;
  out["record"] = trial_json(rec);
  out["revealed"] = Json{{"t", format_timestamp(t.series().timestamps[revealed])}, {"price", format_decimal(t.series().prices[revealed])}};
  out["answered"] = t.answered();
  out["running_frequency"] = static_cast<double>(correct) / static_cast<double>(t.answered());
  out["done"] = t.done();
  out["segment"] = t.done() ? Json() : segment_json(t);
  return out;
}

Json Service::session_estimate(const std::string& session_id) const {
  auto sess = session(session_id);
  std::lock_guard lk(sess->mu);
  Json out = estimate_json(sess->trials.estimate());
  out["total"] = sess->trials.total();
  out["done"] = sess->trials.done();
  return out;
}

}  // namespace engine
