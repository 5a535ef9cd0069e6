#include "engine/store.hpp"

#include <unistd.h>

#include <chrono>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <type_traits>

#include "engine/errors.hpp"

namespace engine {

namespace {

std::uint64_t seq_of(const std::string& id, const std::string& prefix) {
  if (id.rfind(prefix, 0) != 0) return 0;
  try {
    return std::stoull(id.substr(prefix.size()));
  } catch (...) {
    return 0;
  }
}

std::string make_id(const std::string& prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(n));
  return prefix + buf;
}

[[noreturn]] void io_failure(const std::string& what, const std::string& path) {
  throw EngineError(ErrorCode::StorageFailure, what + ": " + std::strerror(errno), path);
}

}  // namespace

std::int64_t now_micros() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

Json solve_record_to_json(const SolveRecord& r) {
  Json j;
  j["id"] = r.id;
  j["scenario_id"] = r.scenario_id;
  j["model"] = to_string(r.model);
  j["options"] = solve_options_to_json(r.options);
  j["wall_time_ms"] = r.wall_time_ms;
  j["created_at"] = format_instant(r.created_at);
  j["result"] = r.result;
  return j;
}

SolveRecord solve_record_from_json(const Json& j) {
  SolveRecord r;
  r.id = j.at("id").get<std::string>();
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.model = parse_model_tag(j.at("model").get<std::string>());
  r.options = solve_options_from_json(j.at("options"));
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.created_at = parse_instant(j.at("created_at").get<std::string>(), "created_at");
  r.result = j.at("result");
  return r;
}

Store::Store(std::string path, std::size_t compact_min_entries) : path_(std::move(path)), compact_min_(compact_min_entries) {
  replay();
  file_ = std::fopen(path_.c_str(), "a");
  if (!file_) io_failure("cannot open store", path_);
  writer_ = std::thread([this] { writer_loop(); });
}

Store::~Store() {
  {
    std::lock_guard lk(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (writer_.joinable()) writer_.join();
  if (file_) std::fclose(file_);
}

void Store::writer_loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lk(queue_mu_);
      queue_cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    job();
  }
}

// Runs f on the writer thread and waits. Failures come back as plain fields
// and are rethrown here, so no exception object crosses threads.
template <class F>
auto Store::submit(F&& f) -> decltype(f()) {
  using R = decltype(f());
  using Value = std::conditional_t<std::is_void_v<R>, bool, R>;
  struct Slot {
    std::optional<Value> value;
    bool failed = false;
    ErrorCode code = ErrorCode::StorageFailure;
    std::string message, path;
    std::vector<std::string> details;
  };
  auto slot = std::make_shared<Slot>();
  auto done = std::make_shared<std::promise<void>>();
  auto fn = std::make_shared<std::decay_t<F>>(std::forward<F>(f));
  auto fut = done->get_future();
  {
    std::lock_guard lk(queue_mu_);
    queue_.emplace_back([slot, done, fn] {
      try {
        if constexpr (std::is_void_v<R>) {
          (*fn)();
          slot->value.emplace(true);
        } else {
          slot->value.emplace((*fn)());
        }
      } catch (const EngineError& e) {
        slot->failed = true;
        slot->code = e.code();
        slot->message = std::string(e.what());
        slot->path = std::string(e.path());
        slot->details = std::vector<std::string>(e.details().begin(), e.details().end());
      } catch (const std::exception& e) {
        slot->failed = true;
        slot->message = std::string(e.what());
      }
      done->set_value();
    });
  }
  queue_cv_.notify_one();
  fut.wait();
  if (slot->failed) throw EngineError(slot->code, slot->message, slot->path, slot->details);
  if constexpr (!std::is_void_v<R>) return std::move(*slot->value);
}

void Store::replay() {
  std::ifstream in(path_);
  if (!in) return;  // new store
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception&) {
      // A torn final line from an interrupted append is dropped.
      if (in.peek() == EOF) break;
      throw EngineError(ErrorCode::ValidationError, "corrupt store line " + std::to_string(lineno), path_);
    }
    ++lines_;
    const std::string op = j.value("op", "");
    if (op == "put_scenario") {
      Scenario s = scenario_from_json(j.at("scenario"));
      scenario_seq_ = std::max(scenario_seq_, seq_of(s.id, "scn-"));
      last_stamp_ = std::max(last_stamp_, s.updated_at);
      scenarios_[s.id] = std::move(s);
    } else if (op == "delete_scenario") {
      scenarios_.erase(j.at("id").get<std::string>());
    } else if (op == "put_solve") {
      SolveRecord r = solve_record_from_json(j.at("solve"));
      solve_seq_ = std::max(solve_seq_, seq_of(r.id, "solve-"));
      last_stamp_ = std::max(last_stamp_, r.created_at);
      solves_[r.id] = std::move(r);
    } else {
      throw EngineError(ErrorCode::ValidationError, "unknown store op '" + op + "' on line " + std::to_string(lineno), path_);
    }
  }
}

void Store::append(const Json& line) {
  const std::string text = line.dump() + "\n";
  if (std::fwrite(text.data(), 1, text.size(), file_) != text.size() || std::fflush(file_) != 0) io_failure("store write failed", path_);
  ::fsync(fileno(file_));
  std::unique_lock lk(state_mu_);
  ++lines_;
}

std::int64_t Store::next_stamp() {
  last_stamp_ = std::max(now_micros(), last_stamp_ + 1);
  return last_stamp_;
}

Scenario Store::save_scenario(Scenario s) {
  return submit([this, s = std::move(s)]() mutable {
    const std::int64_t stamp = next_stamp();
    {
      std::shared_lock lk(state_mu_);
      if (s.id.empty()) {
        do s.id = make_id("scn-", ++scenario_seq_);
        while (scenarios_.count(s.id));
      }
      auto it = scenarios_.find(s.id);
      s.created_at = it != scenarios_.end() ? it->second.created_at : stamp;
    }
    s.updated_at = stamp;
    append(Json{{"op", "put_scenario"}, {"scenario", scenario_to_json(s)}});
    {
      std::unique_lock lk(state_mu_);
      scenarios_[s.id] = s;
    }
    maybe_compact();
    return s;
  });
}

Scenario Store::load_scenario(const std::string& id) const {
  std::shared_lock lk(state_mu_);
  auto it = scenarios_.find(id);
  if (it == scenarios_.end()) throw EngineError(ErrorCode::NotFound, "no scenario with id " + id, "id");
  return it->second;
}

std::vector<Scenario> Store::list_scenarios() const {
  std::shared_lock lk(state_mu_);
  std::vector<Scenario> out;
  for (const auto& [id, s] : scenarios_) out.push_back(s);
  return out;
}

void Store::delete_scenario(const std::string& id) {
  submit([this, id] {
    {
      std::shared_lock lk(state_mu_);
      if (!scenarios_.count(id)) throw EngineError(ErrorCode::NotFound, "no scenario with id " + id, "id");
    }
    append(Json{{"op", "delete_scenario"}, {"id", id}});
    {
      std::unique_lock lk(state_mu_);
      scenarios_.erase(id);
    }
    maybe_compact();
  });
}

SolveRecord Store::save_solve(SolveRecord r) {
  return submit([this, r = std::move(r)]() mutable {
    r.created_at = next_stamp();
    {
      std::shared_lock lk(state_mu_);
      r.id = make_id("solve-", ++solve_seq_);
    }
    append(Json{{"op", "put_solve"}, {"solve", solve_record_to_json(r)}});
    {
      std::unique_lock lk(state_mu_);
      solves_[r.id] = r;
    }
    maybe_compact();
    return r;
  });
}

SolveRecord Store::load_solve(const std::string& id) const {
  std::shared_lock lk(state_mu_);
  auto it = solves_.find(id);
  if (it == solves_.end()) throw EngineError(ErrorCode::NotFound, "no solve with id " + id, "id");
  return it->second;
}

std::vector<SolveRecord> Store::list_solves(const std::string& scenario_id) const {
  std::shared_lock lk(state_mu_);
  std::vector<SolveRecord> out;
  for (const auto& [id, r] : solves_)
    if (scenario_id.empty() || r.scenario_id == scenario_id) out.push_back(r);
  return out;
}

std::size_t Store::log_lines() const {
  std::shared_lock lk(state_mu_);
  return lines_;
}

void Store::compact() {
  submit([this] { compact_locked(); });
}

void Store::maybe_compact() {
  std::size_t live = 0, lines = 0;
  {
    std::shared_lock lk(state_mu_);
    live = scenarios_.size() + solves_.size();
    lines = lines_;
  }
  if (lines >= compact_min_ && lines > 2 * live) compact_locked();
}

// Runs on the writer thread only.
void Store::compact_locked() {
  const std::string tmp = path_ + ".tmp";
  std::FILE* out = std::fopen(tmp.c_str(), "w");
  if (!out) io_failure("cannot write compacted store", tmp);
  std::size_t n = 0;
  {
    std::shared_lock lk(state_mu_);
    auto put = [&](const Json& j) {
      const std::string text = j.dump() + "\n";
      std::fwrite(text.data(), 1, text.size(), out);
      ++n;
    };
    for (const auto& [id, s] : scenarios_) put(Json{{"op", "put_scenario"}, {"scenario", scenario_to_json(s)}});
    for (const auto& [id, r] : solves_) put(Json{{"op", "put_solve"}, {"solve", solve_record_to_json(r)}});
  }
  if (std::fflush(out) != 0) io_failure("store write failed", tmp);
  ::fsync(fileno(out));
  std::fclose(out);
  if (std::rename(tmp.c_str(), path_.c_str()) != 0) io_failure("cannot replace store", path_);
  std::fclose(file_);
  file_ = std::fopen(path_.c_str(), "a");
  if (!file_) io_failure("cannot reopen store", path_);
  std::unique_lock lk(state_mu_);
  lines_ = n;
}

}  // namespace engine
