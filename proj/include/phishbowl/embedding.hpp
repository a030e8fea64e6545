#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phishbowl {

using Vector = std::vector<double>;

/// Maps text to a fixed-length vector. `embed` must always return exactly
/// `dimension()` values.
class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vector embed(std::string_view text) const = 0;
};

struct HashedEmbedderConfig {
  std::size_t dimension = 256;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Lowercased word tokens; a word is a run of ASCII alphanumerics or
/// non-ASCII bytes.
std::vector<std::string> word_tokens(std::string_view text);

/// Signed feature hashing into `dimension` buckets, L2-normalized. Empty or
/// token-free text gives the zero vector. Stable across runs and platforms.
Vector hashed_embed(std::string_view text, const HashedEmbedderConfig& config = {});

/// Bucket and sign (+1/-1) a single token hashes to.
std::pair<std::size_t, int> hashed_bucket(std::string_view token,
                                          const HashedEmbedderConfig& config = {});

class HashedEmbedder : public EmbeddingClient {
 public:
  explicit HashedEmbedder(HashedEmbedderConfig config = {});
  std::size_t dimension() const override { return config_.dimension; }
  Vector embed(std::string_view text) const override;

 private:
  HashedEmbedderConfig config_;
};

/// Sum of squared component differences. Sizes must match.
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace phishbowl
