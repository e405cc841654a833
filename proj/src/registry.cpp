#include "conserts/registry.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "conserts/format.hpp"
#include "conserts/parse.hpp"

namespace conserts {

namespace fs = std::filesystem;

namespace {

constexpr const char* kIndexName = "index.tsv";

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_atomic(const fs::path& target, std::string_view content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::vector<RegistryEntry> read_index(const fs::path& root) {
  std::vector<RegistryEntry> entries;
  const fs::path index = root / kIndexName;
  if (!fs::exists(index)) return entries;
  std::istringstream is(read_file(index));
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw std::runtime_error("corrupt registry index '" + index.string() + "' line " +
                               std::to_string(lineno));
    }
    entries.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                       line.substr(t2 + 1)});
  }
  return entries;
}

void write_index(const fs::path& root, std::vector<RegistryEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RegistryEntry& x, const RegistryEntry& y) {
              return x.system_id < y.system_id;
            });
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.system_id << '\t' << e.hash << '\t' << e.filename << '\n';
  }
  write_atomic(root / kIndexName, os.str());
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256_hex: digest failure");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<size_t>(len) * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string Registry::publish(const SystemManifest& manifest) {
  const std::string text = format_canonical(manifest);
  const std::string hash = sha256_hex(text);
  fs::create_directories(root_);
  auto entries = read_index(root_);
  for (const auto& e : entries) {
    if (e.system_id != manifest.system_id) continue;
    if (e.hash == hash) return hash;  // identical content, nothing to do
    throw std::runtime_error("ID_CONFLICT: system '" + manifest.system_id +
                             "' is already published with different content");
  }
  const std::string filename = manifest.system_id + ".consert";
  write_atomic(root_ / filename, text);
  entries.push_back({manifest.system_id, hash, filename});
  write_index(root_, std::move(entries));
  return hash;
}

std::vector<RegistryEntry> Registry::list() const {
  auto entries = read_index(root_);
  std::sort(entries.begin(), entries.end(),
            [](const RegistryEntry& x, const RegistryEntry& y) {
              return x.system_id < y.system_id;
            });
  return entries;
}

std::optional<std::string> Registry::fetch_text(const std::string& system_id) const {
  for (const auto& e : read_index(root_)) {
    if (e.system_id != system_id) continue;
    std::string text = read_file(root_ / e.filename);
    if (sha256_hex(text) != e.hash) {
      throw std::runtime_error("TAMPERED: content of '" + e.filename +
                               "' does not match its published hash");
    }
    return text;
  }
  return std::nullopt;
}

std::optional<SystemManifest> Registry::fetch(const std::string& system_id) const {
  auto text = fetch_text(system_id);
  if (!text.has_value()) return std::nullopt;
  auto parsed = parse_document({(root_ / (system_id + ".consert")).string(), *text});
  if (!parsed.ok() || !parsed.manifest.has_value()) {
    throw std::runtime_error("registry entry for '" + system_id + "' does not parse");
  }
  return std::move(parsed.manifest);
}

}  // namespace conserts
