#include "phishbowl/embedding.hpp"

#include <cmath>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : token) {
    h ^= c;
    h *= kFnvPrime;
  }
  return splitmix64(h ^ seed);
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::pair<std::size_t, int> hashed_bucket(std::string_view token,
                                          const HashedEmbedderConfig& config) {
  const std::uint64_t h = token_hash(token, config.seed);
  const auto bucket = static_cast<std::size_t>(h % config.dimension);
  const int sign = (h >> 63) ? -1 : 1;
  return {bucket, sign};
}

Vector hashed_embed(std::string_view text, const HashedEmbedderConfig& config) {
  if (config.dimension == 0) {
    throw ValidationError("embed", "embedding dimension must be positive");
  }
  Vector v(config.dimension, 0.0);
  for (const auto& token : word_tokens(text)) {
    auto [bucket, sign] = hashed_bucket(token, config);
    v[bucket] += sign;
  }
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
  }
  return v;
}

HashedEmbedder::HashedEmbedder(HashedEmbedderConfig config) : config_(config) {
  if (config_.dimension == 0) {
    throw ValidationError("config", "embedding dimension must be positive");
  }
}

Vector HashedEmbedder::embed(std::string_view text) const {
  return hashed_embed(text, config_);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace phishbowl
