#include "phishbowl/corpus.hpp"

#include <fstream>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

std::optional<std::string> optional_field(const nlohmann::json& j, const char* key,
                                          const std::string& stage) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) {
    throw ValidationError(stage, std::string("'") + key + "' must be a string or null");
  }
  return j[key].get<std::string>();
}

}  // namespace

EmailContent email_from_json(const nlohmann::json& j, const std::string& stage) {
  if (!j.is_object()) throw ValidationError(stage, "email must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "sender" && key != "subject" && key != "body" && key != "label") {
      throw ValidationError(stage, "unexpected field '" + key + "'");
    }
  }
  EmailContent e;
  e.sender = optional_field(j, "sender", stage);
  e.subject = optional_field(j, "subject", stage);
  if (!j.contains("body") || !j["body"].is_string()) {
    throw ValidationError(stage, "'body' must be a string");
  }
  e.body = j["body"].get<std::string>();
  try {
    e.validate();
  } catch (const ValidationError& err) {
    throw ValidationError(stage, err.what());
  }
  return e;
}

nlohmann::json to_json(const EmailContent& e) {
  nlohmann::json j{{"body", e.body}};
  if (e.sender) j["sender"] = *e.sender;
  if (e.subject) j["subject"] = *e.subject;
  return j;
}

LabeledEmail parse_corpus_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("corpus", e.what());
  }
  LabeledEmail out;
  out.content = email_from_json(j, "corpus");
  if (!j.contains("label") || !j["label"].is_number_integer()) {
    throw ValidationError("corpus", "'label' must be 0 or 1");
  }
  const auto label = j["label"].get<long long>();
  if (label != 0 && label != 1) throw ValidationError("corpus", "'label' must be 0 or 1");
  out.label = static_cast<Label>(label);
  return out;
}

nlohmann::json to_corpus_json(const LabeledEmail& e) {
  auto j = to_json(e.content);
  if (e.label) j["label"] = static_cast<int>(*e.label);
  return j;
}

std::vector<LabeledEmail> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("corpus", "cannot read corpus " + path.string());
  std::vector<LabeledEmail> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_corpus_line(line));
    } catch (const ValidationError& e) {
      throw ParseError("corpus", e.what(), n);
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<LabeledEmail>& emails) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("corpus", "cannot write corpus " + path.string());
  for (const auto& e : emails) {
    out << to_corpus_json(e).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
        << '\n';
  }
}

}  // namespace phishbowl
