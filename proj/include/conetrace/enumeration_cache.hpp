#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conetrace/cone_geometry.hpp"
#include "conetrace/geodesic_enum.hpp"

namespace conetrace {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Content-addressed store of enumeration results. Entries are JSON files
/// named by the SHA-256 of the canonical graph description and the
/// enumeration limits.
class EnumerationCache {
 public:
  explicit EnumerationCache(std::filesystem::path dir);

  /// $CONETRACE_CACHE, or .conetrace-cache/ when unset.
  static std::filesystem::path default_directory();

  static std::string key(const ConeGraph& graph, const EnumerationLimits& limits);

  std::optional<std::vector<DiffractiveClosedGeodesic>> load(const std::string& key) const;
  void store(const std::string& key, const std::vector<DiffractiveClosedGeodesic>& chains) const;

  /// Cached enumeration, computing and storing on a miss.
  std::vector<DiffractiveClosedGeodesic> enumerate(const ConeGraph& graph, const EnumerationLimits& limits) const;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace conetrace
