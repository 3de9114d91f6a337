#include "bykov/cli/output.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace bykov::cli {

namespace fs = std::filesystem;

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

std::string pgm_p2(int width, int height, const std::vector<int>& pixels) {
  if (static_cast<long>(pixels.size()) != static_cast<long>(width) * height)
    throw std::invalid_argument("pgm: pixel count mismatch");
  std::ostringstream os;
  os << "P2\n" << width << ' ' << height << "\n255\n";
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (c) os << ' ';
      os << pixels[static_cast<std::size_t>(r) * width + c];
    }
    os << '\n';
  }
  return os.str();
}

RunOutput::RunOutput(std::string dir, bool force, std::string command, const RunConfig& config)
    : dir_(std::move(dir)),
      force_(force),
      command_(std::move(command)),
      config_(config),
      started_(std::chrono::system_clock::now()),
      t0_(std::chrono::steady_clock::now()) {
  if (dir_.empty()) throw ConfigError("output directory must not be empty");
  if (fs::exists(dir_) && !force_)
    throw ConfigError("output directory '" + dir_ + "' exists (use --force to overwrite)");
}

void RunOutput::add(const std::string& name, std::string content) {
  files_.emplace_back(name, std::move(content));
}

void RunOutput::commit() {
  if (fs::exists(dir_) && !force_)
    throw ConfigError("output directory '" + dir_ + "' exists (use --force to overwrite)");
  fs::create_directories(dir_);

  nlohmann::ordered_json manifest;
  manifest["tool"] = kToolVersion;
  manifest["command"] = command_;
  manifest["csv_schema"] = kCsvSchemaVersion;
  manifest["seed"] = config_.text("seed");
  const std::time_t tt = std::chrono::system_clock::to_time_t(started_);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  manifest["started_utc"] = stamp;
  manifest["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_.values()) cfg[k] = v;
  manifest["config"] = cfg;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [name, content] : files_) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    files.push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  manifest["files"] = files;
  std::ofstream out(fs::path(dir_) / "manifest.json", std::ios::trunc);
  out << manifest.dump(2) << "\n";
}

}  // namespace bykov::cli
