#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "laser/error.hpp"
#include "laser/reports.hpp"

namespace laser {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string config_hash(const nlohmann::json& config) { return sha256_hex(config.dump()); }

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

OutputDir::OutputDir(fs::path target) : target_(std::move(target)) {
  if (target_.empty()) throw ConfigError("output directory not given");
  if (!target_.has_filename()) target_ = target_.parent_path();
  if (fs::exists(target_)) {
    if (!fs::is_directory(target_)) throw ConfigError("output path exists and is not a directory: " + target_.string());
    if (!fs::is_empty(target_) && !fs::exists(target_ / "run_manifest.json")) {
      throw ConfigError("refusing to replace non-empty directory without run_manifest.json: " + target_.string());
    }
  }
  const auto parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
  fs::create_directories(parent);
  temp_ = parent / ("." + target_.filename().string() + ".tmp-" + std::to_string(::getpid()));
  fs::remove_all(temp_);
  fs::create_directory(temp_);
}

OutputDir::~OutputDir() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(temp_, ec);
  }
}

void OutputDir::write(const std::string& name, std::string_view bytes) const {
  std::ofstream out(temp_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (temp_ / name).string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + (temp_ / name).string());
}

void OutputDir::commit(const std::string& command, const nlohmann::json& config, const std::vector<fs::path>& inputs) {
  std::vector<std::string> outputs;
  for (const auto& entry : fs::directory_iterator(temp_)) outputs.push_back(entry.path().filename().string());
  outputs.push_back("run_manifest.json");
  std::sort(outputs.begin(), outputs.end());

  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["config_hash"] = config_hash(config);
  manifest["input_paths"] = nlohmann::json::array();
  for (const auto& p : inputs) manifest["input_paths"].push_back(p.string());
  manifest["output_paths"] = outputs;
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["timestamp"] = utc_timestamp();
  write("run_manifest.json", manifest.dump(2) + "\n");

  if (fs::exists(target_)) fs::remove_all(target_);
  fs::rename(temp_, target_);
  committed_ = true;
}

}  // namespace laser
