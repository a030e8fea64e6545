#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phishbowl/email_model.hpp"

namespace phishbowl {

/// Reads {sender?, subject?, body} from a JSON object. Unknown keys other
/// than `label` are rejected. Throws ValidationError(stage).
EmailContent email_from_json(const nlohmann::json& j, const std::string& stage);
nlohmann::json to_json(const EmailContent& e);

/// One corpus line: {label: 0|1, sender?, subject?, body}.
LabeledEmail parse_corpus_line(std::string_view line);
nlohmann::json to_corpus_json(const LabeledEmail& e);

/// Whole corpus file, one object per line; blank lines skipped. Errors carry
/// the 1-based line number.
std::vector<LabeledEmail> load_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<LabeledEmail>& emails);

}  // namespace phishbowl
