#include "g2/io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include <fftw3.h>
#include <fmt/format.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>

#ifndef G2_VERSION
#define G2_VERSION "0.0.0"
#endif

namespace g2 {

namespace fs = std::filesystem;

namespace {

class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256: init failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw IoError("sha256: update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw IoError("sha256: final failed");
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

private:
  std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("{}: cannot read", path.string()));
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("{}: cannot write", path.string()));
  out << j.dump(2) << '\n';
  if (!out) throw IoError(fmt::format("{}: write failed", path.string()));
}

ArtifactSet::ArtifactSet(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) throw IoError(fmt::format("{}: cannot create output directory", dir_.string()));
  const fs::path probe = dir_ / ".g2_write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw IoError(fmt::format("{}: output directory is not writable", dir_.string()));
  }
  fs::remove(probe, ec);
}

fs::path ArtifactSet::add(const std::string& name) {
  if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
  return dir_ / name;
}

nlohmann::json ArtifactSet::manifest(nlohmann::json header) const {
  std::vector<std::string> sorted = names_;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::json files = nlohmann::json::array();
  for (const auto& n : sorted)
    files.push_back({{"path", n}, {"sha256", sha256_file(dir_ / n)}, {"bytes", fs::file_size(dir_ / n)}});
  header["files"] = std::move(files);
  return header;
}

void ArtifactSet::write_manifest(nlohmann::json header) const {
  write_json(dir_ / "manifest.json", manifest(std::move(header)));
}

nlohmann::json versions() {
  nlohmann::json v;
  v["g2"] = G2_VERSION;
  v["fftw"] = std::string(fftw_version);
  v["openssl"] = std::string(OpenSSL_version(OPENSSL_VERSION));
  v["fmt"] = fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
  return v;
}

}  // namespace g2
