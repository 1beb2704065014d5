#include "gfa/cli/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "gfa/error.hpp"
#include "json.hpp"

namespace gfa::cli {

using nlohmann::json;

namespace {

json view_to_json(const ViewSpec& v) {
  json j = {{"name", v.name},
            {"path", v.path},
            {"role", v.role},
            {"sha256", v.sha256},
            {"merge_replicates", v.merge_replicates}};
  if (v.threshold) {
    j["threshold"] = {{"top_up", v.top_up}, {"top_down", v.top_down}};
  } else {
    j["threshold"] = nullptr;
  }
  return j;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

std::vector<std::string> preprocessing_order() {
  return {"merge_replicates", "threshold_top_genes", "pair_rows", "standardize_columns"};
}

void RunManifest::validate() const {
  if (views.size() < 2) {
    throw InvalidInput("manifest must list at least 2 views");
  }
  static const std::regex name_re("[A-Za-z0-9_.-]+");
  std::set<std::string> names;
  for (const auto& v : views) {
    if (!std::regex_match(v.name, name_re)) {
      throw InvalidInput("view name '" + v.name + "' must match [A-Za-z0-9_.-]+");
    }
    if (!names.insert(v.name).second) {
      throw InvalidInput("duplicate view name '" + v.name + "'");
    }
    if (v.path.empty()) {
      throw InvalidInput("view '" + v.name + "' has no path");
    }
    if (v.role.empty()) {
      throw InvalidInput("view '" + v.name + "' has no role");
    }
    if (v.threshold && (v.top_up < 0 || v.top_down < 0)) {
      throw InvalidInput("view '" + v.name + "': top-gene counts must be non-negative");
    }
  }
  model.validate();
  sampling.validate();
  if (report.n_top < 1 || report.n_permutations < 100 || !(report.q_threshold > 0.0) ||
      report.q_threshold > 1.0 || report.activity_threshold < 0.0 ||
      report.activity_threshold > 1.0) {
    throw InvalidInput("invalid report settings");
  }
}

std::filesystem::path RunManifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

ViewRoleMap RunManifest::roles() const {
  ViewRoleMap map;
  for (const auto& v : views) map.roles.push_back(v.role);
  return map;
}

std::string RunManifest::to_json_string() const {
  json j;
  j["tool_version"] = tool_version;
  j["views"] = json::array();
  for (const auto& v : views) j["views"].push_back(view_to_json(v));
  j["preprocessing_order"] = preprocessing_order();
  j["model"] = {{"components", model.num_components},
                {"inclusion_a", model.inclusion_a},
                {"inclusion_b", model.inclusion_b},
                {"ard_shape", model.ard_shape},
                {"ard_rate", model.ard_rate},
                {"noise_shape", model.noise_shape},
                {"noise_rate", model.noise_rate},
                {"center_columns", model.center_columns},
                {"scale_columns", model.scale_columns}};
  j["sampling"] = {{"chains", sampling.n_chains},
                   {"burn_in", sampling.burn_in},
                   {"samples", sampling.n_samples},
                   {"thinning", sampling.thinning},
                   {"seed", sampling.seed}};
  j["report"] = {{"activity_threshold", report.activity_threshold},
                 {"top_loadings", report.n_top},
                 {"permutations", report.n_permutations},
                 {"q_threshold", report.q_threshold}};
  j["output"] = output;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_string(const std::string& text, const std::string& source,
                                          const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError(source, line, "invalid JSON");
  }

  RunManifest m;
  m.base_dir = base_dir;
  try {
    m.tool_version = get_or<std::string>(j, "tool_version", kToolVersion);
    for (const auto& jv : j.at("views")) {
      ViewSpec v;
      v.name = jv.at("name").get<std::string>();
      v.path = jv.at("path").get<std::string>();
      v.role = get_or<std::string>(jv, "role", v.name);
      v.sha256 = get_or<std::string>(jv, "sha256", "");
      v.merge_replicates = get_or<bool>(jv, "merge_replicates", true);
      if (jv.contains("threshold") && !jv.at("threshold").is_null()) {
        const auto& t = jv.at("threshold");
        v.threshold = true;
        v.top_up = get_or<int>(t, "top_up", kDefaultTopUp);
        v.top_down = get_or<int>(t, "top_down", kDefaultTopDown);
      }
      m.views.push_back(std::move(v));
    }
    const json model = j.value("model", json::object());
    m.model.num_components = get_or<int>(model, "components", m.model.num_components);
    m.model.inclusion_a = get_or<double>(model, "inclusion_a", m.model.inclusion_a);
    m.model.inclusion_b = get_or<double>(model, "inclusion_b", m.model.inclusion_b);
    m.model.ard_shape = get_or<double>(model, "ard_shape", m.model.ard_shape);
    m.model.ard_rate = get_or<double>(model, "ard_rate", m.model.ard_rate);
    m.model.noise_shape = get_or<double>(model, "noise_shape", m.model.noise_shape);
    m.model.noise_rate = get_or<double>(model, "noise_rate", m.model.noise_rate);
    m.model.center_columns = get_or<bool>(model, "center_columns", m.model.center_columns);
    m.model.scale_columns = get_or<bool>(model, "scale_columns", m.model.scale_columns);

    const json sampling = j.value("sampling", json::object());
    m.sampling.n_chains = get_or<int>(sampling, "chains", m.sampling.n_chains);
    m.sampling.burn_in = get_or<int>(sampling, "burn_in", m.sampling.burn_in);
    m.sampling.n_samples = get_or<int>(sampling, "samples", m.sampling.n_samples);
    m.sampling.thinning = get_or<int>(sampling, "thinning", m.sampling.thinning);
    m.sampling.seed = get_or<std::uint64_t>(sampling, "seed", m.sampling.seed);

    const json report = j.value("report", json::object());
    m.report.activity_threshold =
        get_or<double>(report, "activity_threshold", m.report.activity_threshold);
    m.report.n_top = get_or<int>(report, "top_loadings", m.report.n_top);
    m.report.n_permutations = get_or<int>(report, "permutations", m.report.n_permutations);
    m.report.q_threshold = get_or<double>(report, "q_threshold", m.report.q_threshold);

    m.output = get_or<std::string>(j, "output", m.output);
  } catch (const json::exception& e) {
    throw InvalidInput(source + ": malformed manifest: " + e.what());
  }
  m.validate();
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open manifest '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str(), path.string(), path.parent_path());
}

void RunManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write manifest '" + path.string() + "'");
  }
  out << to_json_string();
}

bool operator==(const RunManifest& a, const RunManifest& b) {
  return a.to_json_string() == b.to_json_string();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open '" + path.string() + "'");
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

void verify_hashes(RunManifest& manifest) {
  for (auto& v : manifest.views) {
    const auto path = manifest.resolve(v.path);
    if (!std::filesystem::exists(path)) {
      throw InvalidInput("view '" + v.name + "': file not found: " + path.string());
    }
    const auto digest = sha256_file(path);
    if (v.sha256.empty()) {
      v.sha256 = digest;
    } else if (v.sha256 != digest) {
      throw IntegrityError("view '" + v.name + "': content hash mismatch for " + path.string() +
                           " (manifest " + v.sha256 + ", file " + digest + ")");
    }
  }
}

}  // namespace gfa::cli
