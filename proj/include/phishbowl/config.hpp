#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "phishbowl/bowl_analyzer.hpp"
#include "phishbowl/email_model.hpp"
#include "phishbowl/embedding.hpp"
#include "phishbowl/ensemble.hpp"
#include "phishbowl/ocr_extract.hpp"
#include "phishbowl/remote_clients.hpp"
#include "phishbowl/trends.hpp"

namespace phishbowl {

enum class EmbedderKind { Hashed, Remote };
enum class ChatKind { Mock, Remote };

struct PlatformConfig {
  std::filesystem::path bowl_path;       // empty: memory only
  std::filesystem::path alert_log_path;  // empty: memory only

  EmbedderKind embedder = EmbedderKind::Hashed;
  HashedEmbedderConfig hashed;
  RemoteEndpoint embedding_endpoint;
  std::size_t remote_dimension = 1536;

  ChatKind chat = ChatKind::Mock;
  RemoteEndpoint chat_endpoint;
  int max_attempts = 2;

  OcrConfig ocr;
  ConverterConfig converter{Truncation::ContentEnd, 8191, 0.2815};
  ConverterConfig verdict_converter{Truncation::NoTruncation, 8191, 0.2815};
  /// Embed stored records with their "This is a phishing email:" label line.
  /// Off by default so a stored email and the same email as a query embed
  /// identically.
  bool embed_label_phrase = false;
  BowlConfig bowl;
  EnsembleConfig ensemble;
  TrendConfig trend;

  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;

  std::size_t embedding_dimension() const {
    return embedder == EmbedderKind::Hashed ? hashed.dimension : remote_dimension;
  }
  void validate() const;
};

/// Parses the key-value config format:
///
///   # comment
///   [bowl]
///   path = "data/bowl.jsonl"
///   k = 12
///   [ocr]
///   greeting_terms = ["hi", "hello", "dear"]
///
/// Values are JSON scalars or arrays; bare words are taken as strings.
/// Unknown keys are errors.
PlatformConfig parse_config(std::string_view text, PlatformConfig base = {});
PlatformConfig load_config(const std::filesystem::path& path);

/// Overrides remote endpoints from PHISHBOWL_CHAT_URL, PHISHBOWL_CHAT_MODEL,
/// PHISHBOWL_EMBED_URL and PHISHBOWL_EMBED_MODEL when set.
void apply_environment(PlatformConfig& config);

}  // namespace phishbowl
