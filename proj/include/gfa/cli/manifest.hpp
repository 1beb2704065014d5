#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gfa/components.hpp"
#include "gfa/gibbs.hpp"
#include "gfa/ingest.hpp"
#include "gfa/model.hpp"

namespace gfa::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct ViewSpec {
  std::string name;
  std::string path;  // relative to the manifest's directory unless absolute
  std::string role;
  std::string sha256;  // filled on first fit when empty
  bool merge_replicates = true;
  bool threshold = false;
  int top_up = kDefaultTopUp;
  int top_down = kDefaultTopDown;

  bool operator==(const ViewSpec&) const = default;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::vector<ViewSpec> views;
  ModelConfig model;
  SamplingSchedule sampling;
  ReportOptions report;
  std::string output = "model";

  // Directory the manifest was read from; not serialized.
  std::filesystem::path base_dir;

  void validate() const;
  std::filesystem::path resolve(const std::string& path) const;
  ViewRoleMap roles() const;

  std::string to_json_string() const;
  static RunManifest from_json_string(const std::string& text, const std::string& source,
                                      const std::filesystem::path& base_dir);
  static RunManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

bool operator==(const RunManifest& a, const RunManifest& b);

std::string sha256_file(const std::filesystem::path& path);

// Fills empty hashes; throws IntegrityError when a recorded hash differs
// from the file on disk.
void verify_hashes(RunManifest& manifest);

// Order in which per-view preprocessing is applied during fit.
std::vector<std::string> preprocessing_order();

}  // namespace gfa::cli
