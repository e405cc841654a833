#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conserts/model.hpp"

namespace conserts {

// Lowercase SHA-256 hex of `data`.
std::string sha256_hex(std::string_view data);

struct RegistryEntry {
  std::string system_id;
  std::string hash;
  std::string filename;
  bool operator==(const RegistryEntry&) const = default;
};

// Directory-backed store of published manifests: `<root>/index.tsv` with one
// `system_id<TAB>hash<TAB>filename` line per system, plus the canonical
// `.consert` text files. All writes go to a temp file first and are renamed
// over the target, the index last, so a crash never leaves a half-written
// file indexed. Stateless over the directory: safe for concurrent readers
// with a single writer per system_id.
class Registry {
 public:
  explicit Registry(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  // Stores the canonical text of `manifest` (which must already validate
  // against its catalog) and returns the content hash. Idempotent for
  // identical content. Throws std::runtime_error on an id collision with
  // different content (message starts with ID_CONFLICT) or on IO failure.
  std::string publish(const SystemManifest& manifest);

  // All published entries, sorted by system_id. A missing registry
  // directory reads as empty.
  std::vector<RegistryEntry> list() const;

  // Stored canonical text, verified against the indexed hash. Returns
  // nullopt for an unknown id; throws std::runtime_error when the file
  // content does not match its hash (message starts with TAMPERED).
  std::optional<std::string> fetch_text(const std::string& system_id) const;

  // fetch_text plus parse; the stored text is canonical, so parsing cannot
  // fail unless the hash check would have failed first.
  std::optional<SystemManifest> fetch(const std::string& system_id) const;

 private:
  std::filesystem::path root_;
};

}  // namespace conserts
