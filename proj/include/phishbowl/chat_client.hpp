#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace phishbowl {

/// Sends one prompt to a chat-completion model and returns the reply text.
/// Implementations must leave the prompt untouched and may throw
/// TransportError. Calls can arrive concurrently from service threads.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::string& prompt) const = 0;
};

/// Accepts a reply that is exactly one JSON object, optionally wrapped in a
/// single fenced code block and surrounding whitespace. Anything else
/// (leading prose, trailing text, arrays) raises ValidationError(stage).
nlohmann::json parse_reply_object(std::string_view raw, const std::string& stage);

/// Single-pass `{name}` substitution; text inserted for one placeholder is
/// never rescanned, so email content cannot inject further placeholders.
std::string fill_template(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> values);

}  // namespace phishbowl
