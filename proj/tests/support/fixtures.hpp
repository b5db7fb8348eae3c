#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gazkit/wikidata_ingest.hpp"

namespace gazkit::testing {

inline std::string data_path(const std::string& name) { return std::string(GAZKIT_TEST_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// `alias<TAB>t1,t2` lines of an extraction result, header first.
inline std::vector<std::string> dictionary_lines(const std::vector<RankedAlias>& aliases) {
  std::vector<std::string> lines{"#gazkit-dict v1"};
  for (const auto& a : aliases) {
    std::string line = a.alias + '\t';
    for (std::size_t i = 0; i < a.types.size(); ++i) line += (i ? "," : "") + a.types[i];
    lines.push_back(line);
  }
  return lines;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / ("gazkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(i));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace gazkit::testing
