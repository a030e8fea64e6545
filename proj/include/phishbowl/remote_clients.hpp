#pragma once

#include <string>

#include "phishbowl/chat_client.hpp"
#include "phishbowl/embedding.hpp"

namespace phishbowl {

/// Where a hosted model lives. The bearer token is read from the named
/// environment variable on every call and never stored.
struct RemoteEndpoint {
  std::string url;  // e.g. https://host/v1/chat/completions
  std::string model;
  std::string token_env = "PHISHBOWL_API_KEY";
  int timeout_seconds = 60;
};

/// Chat-completion adapter: POSTs {model, messages:[{role:user, content}]}
/// and returns choices[0].message.content.
class RemoteChatClient : public ChatClient {
 public:
  explicit RemoteChatClient(RemoteEndpoint endpoint);
  std::string complete(const std::string& prompt) const override;

 private:
  RemoteEndpoint endpoint_;
};

/// Embedding adapter: POSTs {model, input} and reads data[0].embedding.
class RemoteEmbeddingClient : public EmbeddingClient {
 public:
  RemoteEmbeddingClient(RemoteEndpoint endpoint, std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  Vector embed(std::string_view text) const override;

 private:
  RemoteEndpoint endpoint_;
  std::size_t dimension_;
};

}  // namespace phishbowl
