#pragma once

#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "engine/scenario.hpp"

namespace engine {

struct SolveRecord {
  std::string id;
  std::string scenario_id;
  ModelTag model = ModelTag::M2Bound;
  SolveOptions options;
  double wall_time_ms = 0.0;
  std::int64_t created_at = 0;  // microseconds
  Json result;
};

Json solve_record_to_json(const SolveRecord& r);
SolveRecord solve_record_from_json(const Json& j);

// Single-file append log (one JSON object per line) replayed on open.
// Mutations run on one writer thread in submission order; readers see the
// in-memory state under a shared lock.
class Store {
 public:
  explicit Store(std::string path, std::size_t compact_min_entries = 256);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Assigns an id when empty, keeps created_at of an existing id and stamps
  // a strictly increasing updated_at. Returns once the line is on disk.
  Scenario save_scenario(Scenario s);
  Scenario load_scenario(const std::string& id) const;  // NotFound
  std::vector<Scenario> list_scenarios() const;          // by id
  void delete_scenario(const std::string& id);           // NotFound

  SolveRecord save_solve(SolveRecord r);
  SolveRecord load_solve(const std::string& id) const;  // NotFound
  std::vector<SolveRecord> list_solves(const std::string& scenario_id = {}) const;

  // Rewrites the log as one line per live entry.
  void compact();
  std::size_t log_lines() const;
  const std::string& path() const { return path_; }

 private:
  template <class F>
  auto submit(F&& f) -> decltype(f());
  void writer_loop();
  void replay();
  void append(const Json& line);
  void maybe_compact();
  void compact_locked();
  std::int64_t next_stamp();

  std::string path_;
  std::size_t compact_min_;
  std::FILE* file_ = nullptr;

  mutable std::shared_mutex state_mu_;
  std::map<std::string, Scenario> scenarios_;
  std::map<std::string, SolveRecord> solves_;
  std::size_t lines_ = 0;
  std::uint64_t scenario_seq_ = 0;
  std::uint64_t solve_seq_ = 0;
  std::int64_t last_stamp_ = 0;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<std::function<void()>> queue_;
  bool stopping_ = false;
  std::thread writer_;
};

std::int64_t now_micros();

}  // namespace engine
