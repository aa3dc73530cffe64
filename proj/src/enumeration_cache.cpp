#include "conetrace/enumeration_cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "conetrace/errors.hpp"
#include "conetrace/surface_io.hpp"

namespace conetrace {

namespace {

constexpr int kCacheFormat = 1;

std::string format17(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

EnumerationCache::EnumerationCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path EnumerationCache::default_directory() {
  if (const char* env = std::getenv("CONETRACE_CACHE"); env && *env) return env;
  return ".conetrace-cache";
}

std::string EnumerationCache::key(const ConeGraph& graph, const EnumerationLimits& limits) {
  std::string material = graph_to_json(graph).dump();
  material += "|L=" + format17(limits.max_length);
  material += "|k=" + std::to_string(limits.max_diffractions);
  material += "|tol=" + format17(limits.geometric_tolerance);
  material += "|v=" + std::to_string(kCacheFormat);
  return sha256_hex(material);
}

std::optional<std::vector<DiffractiveClosedGeodesic>> EnumerationCache::load(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    std::vector<DiffractiveClosedGeodesic> chains;
    for (const auto& c : j.at("geodesics")) chains.push_back(chain_from_json(c));
    return chains;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void EnumerationCache::store(const std::string& key, const std::vector<DiffractiveClosedGeodesic>& chains) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) return;
  json arr = json::array();
  for (const auto& c : chains) arr.push_back(chain_to_json(c));
  json doc = {{"key", key}, {"format", kCacheFormat}, {"geodesics", arr}};
  auto tmp = dir_ / (key + ".json.tmp");
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << doc.dump();
  }
  std::filesystem::rename(tmp, dir_ / (key + ".json"), ec);
}

std::vector<DiffractiveClosedGeodesic> EnumerationCache::enumerate(const ConeGraph& graph,
                                                                   const EnumerationLimits& limits) const {
  auto k = key(graph, limits);
  if (auto hit = load(k)) return *hit;
  auto chains = enumerate_closed_chains(graph, limits);
  store(k, chains);
  return chains;
}

}  // namespace conetrace
