#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "bykov/cli/config.hpp"

namespace bykov::cli {

inline constexpr const char* kToolVersion = "bykov 1.0.0";
inline constexpr int kCsvSchemaVersion = 1;

// 17 significant digits; nan and inf spelled out.
std::string format_real(double v);
std::string sha256_hex(const std::string& data);

class CsvTable {
 public:
  explicit CsvTable(std::string header) : text_(std::move(header) + "\n") {}
  CsvTable& row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Grayscale raster written as ASCII PGM (P2, maxval 255).
std::string pgm_p2(int width, int height, const std::vector<int>& pixels);

// Files are staged in memory and written together with the manifest by commit().
class RunOutput {
 public:
  RunOutput(std::string dir, bool force, std::string command, const RunConfig& config);
  void add(const std::string& name, std::string content);
  // Creates the directory (refusing an existing one unless forced) and writes everything.
  void commit();
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  bool force_;
  std::string command_;
  const RunConfig& config_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace bykov::cli
