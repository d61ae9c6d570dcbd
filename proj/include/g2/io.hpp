#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace g2 {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Pretty JSON with a trailing newline. Non-finite numbers become null.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Collects the artifacts of one run below `dir` and writes manifest.json.
class ArtifactSet {
public:
  /// Creates `dir`; throws IoError if that fails or it is not writable.
  explicit ArtifactSet(std::filesystem::path dir);

  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
  /// Registers `name` (relative to dir) and returns its full path.
  std::filesystem::path add(const std::string& name);
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

  /// Manifest listing every registered file with its SHA-256, sorted by
  /// name. Holds no timestamps, so identical runs give identical bytes.
  [[nodiscard]] nlohmann::json manifest(nlohmann::json header) const;
  void write_manifest(nlohmann::json header) const;

private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

/// Library versions recorded in manifests.
nlohmann::json versions();

}  // namespace g2
