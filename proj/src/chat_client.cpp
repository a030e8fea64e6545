#include "phishbowl/chat_client.hpp"

#include <cctype>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

nlohmann::json parse_reply_object(std::string_view raw, const std::string& stage) {
  std::string_view body = trim(raw);
  if (body.starts_with("```")) {
    auto newline = body.find('\n');
    if (newline == std::string_view::npos) {
      throw ValidationError(stage, "unterminated code fence");
    }
    // Only a bare language tag may follow the opening fence.
    auto tag = trim(body.substr(3, newline - 3));
    for (char c : tag) {
      if (!std::isalnum(static_cast<unsigned char>(c))) {
        throw ValidationError(stage, "unexpected text after opening fence");
      }
    }
    body = body.substr(newline + 1);
    if (!body.ends_with("```")) {
      throw ValidationError(stage, "unterminated code fence");
    }
    body = trim(body.substr(0, body.size() - 3));
  }
  if (body.empty()) throw ValidationError(stage, "empty response");

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(stage, std::string("response is not a bare JSON object: ") + e.what());
  }
  if (!parsed.is_object()) {
    throw ValidationError(stage, "response payload is not a JSON object");
  }
  return parsed;
}

std::string fill_template(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [name, value] : values) {
        if (tmpl.compare(i + 1, name.size(), name) == 0 &&
            i + 1 + name.size() < tmpl.size() && tmpl[i + 1 + name.size()] == '}') {
          out += value;
          i += name.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

}  // namespace phishbowl
