#include "phishbowl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

using json = nlohmann::json;
using Setter = std::function<void(PlatformConfig&, const json&)>;

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw ValidationError("config", "expected a string");
  return v.get<std::string>();
}
double as_double(const json& v) {
  if (!v.is_number()) throw ValidationError("config", "expected a number");
  return v.get<double>();
}
long long as_int(const json& v) {
  if (!v.is_number_integer()) throw ValidationError("config", "expected an integer");
  return v.get<long long>();
}
bool as_bool(const json& v) {
  if (!v.is_boolean()) throw ValidationError("config", "expected true or false");
  return v.get<bool>();
}
std::vector<std::string> as_strings(const json& v) {
  if (!v.is_array()) throw ValidationError("config", "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(as_string(x));
  return out;
}
Truncation as_truncation(const json& v) {
  auto t = parse_truncation(as_string(v));
  if (!t) throw ValidationError("config", "unknown truncation strategy");
  return *t;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"bowl.path", [](auto& c, const json& v) { c.bowl_path = as_string(v); }},
      {"bowl.k", [](auto& c, const json& v) { c.bowl.k = static_cast<std::size_t>(as_int(v)); }},
      {"bowl.epsilon", [](auto& c, const json& v) { c.bowl.epsilon = as_double(v); }},
      {"bowl.lambda", [](auto& c, const json& v) { c.bowl.lambda = as_double(v); }},
      {"bowl.confidence_decay", [](auto& c, const json& v) { c.bowl.confidence_decay_enabled = as_bool(v); }},
      {"bowl.embed_label_phrase", [](auto& c, const json& v) { c.embed_label_phrase = as_bool(v); }},

      {"alerts.path", [](auto& c, const json& v) { c.alert_log_path = as_string(v); }},

      {"embedder.kind",
       [](auto& c, const json& v) {
         const auto s = as_string(v);
         if (s == "hashed") {
           c.embedder = EmbedderKind::Hashed;
         } else if (s == "remote") {
           c.embedder = EmbedderKind::Remote;
         } else {
           throw ValidationError("config", "embedder.kind must be 'hashed' or 'remote'");
         }
       }},
      {"embedder.dimension", [](auto& c, const json& v) {
         c.hashed.dimension = c.remote_dimension = static_cast<std::size_t>(as_int(v));
       }},
      {"embedder.seed", [](auto& c, const json& v) { c.hashed.seed = static_cast<std::uint64_t>(as_int(v)); }},
      {"embedder.url", [](auto& c, const json& v) { c.embedding_endpoint.url = as_string(v); }},
      {"embedder.model", [](auto& c, const json& v) { c.embedding_endpoint.model = as_string(v); }},
      {"embedder.token_env", [](auto& c, const json& v) { c.embedding_endpoint.token_env = as_string(v); }},

      {"chat.kind",
       [](auto& c, const json& v) {
         const auto s = as_string(v);
         if (s == "mock") {
           c.chat = ChatKind::Mock;
         } else if (s == "remote") {
           c.chat = ChatKind::Remote;
         } else {
           throw ValidationError("config", "chat.kind must be 'mock' or 'remote'");
         }
       }},
      {"chat.url", [](auto& c, const json& v) { c.chat_endpoint.url = as_string(v); }},
      {"chat.model", [](auto& c, const json& v) { c.chat_endpoint.model = as_string(v); }},
      {"chat.token_env", [](auto& c, const json& v) { c.chat_endpoint.token_env = as_string(v); }},
      {"chat.max_attempts", [](auto& c, const json& v) { c.max_attempts = static_cast<int>(as_int(v)); }},

      {"converter.strategy", [](auto& c, const json& v) { c.converter.strategy = as_truncation(v); }},
      {"converter.token_limit", [](auto& c, const json& v) { c.converter.token_limit = static_cast<int>(as_int(v)); }},
      {"converter.tokens_per_char", [](auto& c, const json& v) {
         c.converter.tokens_per_char = c.verdict_converter.tokens_per_char = as_double(v);
       }},
      {"converter.verdict_strategy", [](auto& c, const json& v) { c.verdict_converter.strategy = as_truncation(v); }},
      {"converter.verdict_token_limit", [](auto& c, const json& v) {
         c.verdict_converter.token_limit = static_cast<int>(as_int(v));
       }},

      {"ocr.t_ocr", [](auto& c, const json& v) { c.ocr.t_ocr = as_double(v); }},
      {"ocr.t_header", [](auto& c, const json& v) { c.ocr.t_header = static_cast<int>(as_int(v)); }},
      {"ocr.k_subject", [](auto& c, const json& v) { c.ocr.k_subject = as_double(v); }},
      {"ocr.k_logo", [](auto& c, const json& v) { c.ocr.k_logo = as_double(v); }},
      {"ocr.header_terms", [](auto& c, const json& v) { c.ocr.header_terms = as_strings(v); }},
      {"ocr.greeting_terms", [](auto& c, const json& v) { c.ocr.greeting_terms = as_strings(v); }},
      {"ocr.email_regex", [](auto& c, const json& v) { c.ocr.email_regex = as_string(v); }},

      {"ensemble.coefficient", [](auto& c, const json& v) { c.ensemble.coefficient = as_double(v); }},
      {"ensemble.exponent", [](auto& c, const json& v) { c.ensemble.exponent = as_double(v); }},
      {"ensemble.decision_threshold", [](auto& c, const json& v) { c.ensemble.decision_threshold = as_double(v); }},

      {"trend.delta", [](auto& c, const json& v) { c.trend.delta = as_double(v); }},
      {"trend.k_alert", [](auto& c, const json& v) { c.trend.k_alert = as_double(v); }},
      {"trend.t_alert", [](auto& c, const json& v) { c.trend.t_alert = as_double(v); }},
      {"trend.daily_window_days", [](auto& c, const json& v) { c.trend.daily_window_days = static_cast<int>(as_int(v)); }},

      {"server.host", [](auto& c, const json& v) { c.listen_host = as_string(v); }},
      {"server.port", [](auto& c, const json& v) { c.listen_port = static_cast<int>(as_int(v)); }},
  };
  return table;
}

}  // namespace

void PlatformConfig::validate() const {
  ocr.validate();
  converter.validate();
  verdict_converter.validate();
  bowl.validate();
  ensemble.validate();
  trend.validate();
  if (max_attempts < 1) throw ValidationError("config", "chat.max_attempts must be >= 1");
  if (embedding_dimension() == 0) throw ValidationError("config", "embedding dimension must be positive");
  if (embedder == EmbedderKind::Remote && embedding_endpoint.url.empty()) {
    throw ValidationError("config", "remote embedder needs embedder.url");
  }
  if (chat == ChatKind::Remote && chat_endpoint.url.empty()) {
    throw ValidationError("config", "remote chat client needs chat.url");
  }
  if (listen_port < 0 || listen_port > 65535) throw ValidationError("config", "invalid server.port");
}

PlatformConfig parse_config(std::string_view text, PlatformConfig config) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("config", "unterminated section header", line_number);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("config", "expected key = value", line_number);
    const std::string key = std::string(trim(line.substr(0, eq)));
    const auto value_text = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    auto it = setters().find(full);
    if (it == setters().end()) throw ParseError("config", "unknown key '" + full + "'", line_number);
    json value;
    try {
      value = json::parse(value_text);
    } catch (const json::parse_error&) {
      value = std::string(value_text);
    }
    try {
      it->second(config, value);
    } catch (const ValidationError& e) {
      throw ParseError("config", full + ": " + e.what(), line_number);
    }
  }
  return config;
}

PlatformConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("config", "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto config = parse_config(buf.str());
  // Relative data paths resolve against the config file's directory.
  const auto base = path.parent_path();
  if (!config.bowl_path.empty() && config.bowl_path.is_relative()) {
    config.bowl_path = base / config.bowl_path;
  }
  if (!config.alert_log_path.empty() && config.alert_log_path.is_relative()) {
    config.alert_log_path = base / config.alert_log_path;
  }
  return config;
}

void apply_environment(PlatformConfig& config) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return (v && *v) ? v : nullptr;
  };
  if (auto v = env("PHISHBOWL_CHAT_URL")) config.chat_endpoint.url = v;
  if (auto v = env("PHISHBOWL_CHAT_MODEL")) config.chat_endpoint.model = v;
  if (auto v = env("PHISHBOWL_EMBED_URL")) config.embedding_endpoint.url = v;
  if (auto v = env("PHISHBOWL_EMBED_MODEL")) config.embedding_endpoint.model = v;
}

}  // namespace phishbowl
