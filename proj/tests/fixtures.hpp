#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include "engine/scenario.hpp"

namespace fixtures {

#ifndef ENGINE_FIXTURES_DIR
#define ENGINE_FIXTURES_DIR "fixtures"
#endif

// ENGINE_FIXTURES overrides the directory baked in at build time.
inline std::string path(const std::string& name) {
  const char* dir = std::getenv("ENGINE_FIXTURES");
  return std::string(dir ? dir : ENGINE_FIXTURES_DIR) + "/" + name;
}

inline std::string read_text(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open fixture " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline engine::Json load_json(const std::string& name) { return engine::Json::parse(read_text(path(name))); }

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    static std::atomic<int> counter{0};
    dir = std::filesystem::temp_directory_path() /
          ("engine-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace fixtures
