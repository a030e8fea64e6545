#include "phishbowl/remote_clients.hpp"

#include <cstdlib>

#include <httplib.h>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url, const std::string& stage) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError(stage, "endpoint URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const RemoteEndpoint& ep, const nlohmann::json& body,
                         const std::string& stage) {
  const auto [origin, path] = split_url(ep.url, stage);
  httplib::Client client(origin);
  client.set_connection_timeout(ep.timeout_seconds);
  client.set_read_timeout(ep.timeout_seconds);
  httplib::Headers headers;
  if (const char* token = std::getenv(ep.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
    headers.emplace("api-key", token);
  }
  auto res = client.Post(path, headers,
                         body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                         "application/json");
  if (!res) {
    throw TransportError(stage, "request to " + ep.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError(stage, "HTTP " + std::to_string(res->status) + " from " + ep.url);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(stage, std::string("malformed provider response: ") + e.what());
  }
}

}  // namespace

RemoteChatClient::RemoteChatClient(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string RemoteChatClient::complete(const std::string& prompt) const {
  nlohmann::json body{{"messages", {{{"role", "user"}, {"content", prompt}}}},
                      {"temperature", 0}};
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  const auto reply = post_json(endpoint_, body, "chat");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("chat", std::string("unexpected chat response shape: ") + e.what());
  }
}

RemoteEmbeddingClient::RemoteEmbeddingClient(RemoteEndpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("config", "embedding dimension must be positive");
}

Vector RemoteEmbeddingClient::embed(std::string_view text) const {
  nlohmann::json body{{"input", std::string(text)}};
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  const auto reply = post_json(endpoint_, body, "embed");
  Vector v;
  try {
    v = reply.at("data").at(0).at("embedding").get<Vector>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("embed", std::string("unexpected embedding response shape: ") + e.what());
  }
  if (v.size() != dimension_) throw DimensionError(dimension_, v.size());
  return v;
}

}  // namespace phishbowl
