#pragma once

#include <optional>
#include <string>

#include "phishbowl/chat_client.hpp"

namespace phishbowl {

/// Parsed classification reply from the language model.
struct Verdict {
  bool is_phishing = false;
  int confidence = 0;  // 0..10
  std::optional<std::string> is_impersonating;
  std::string reason;

  bool operator==(const Verdict&) const = default;
};

std::string_view classify_prompt_template();

/// Interpolates the converted email text into the classification prompt.
std::string build_classify_prompt(std::string_view email_text);

/// Strict parse: exactly is_phishing (bool), confidence (integer 0..10),
/// is_impersonating (string|null) and reason (non-empty string).
Verdict parse_verdict(std::string_view raw);

/// 0.5 + s * 0.5 * confidence / 10 with s = +1 for phishing, -1 otherwise.
/// Zero confidence lands on 0.5 either way.
double verdict_to_label(const Verdict& v);

/// Prompt, call, validate with bounded retries on validation failures.
Verdict request_verdict(std::string_view email_text, const ChatClient& client,
                        int max_attempts = 2);

nlohmann::json to_json(const Verdict& v);

/// Keyword-scoring stand-in for the classification model. Counts urgency,
/// credential, reward and link cues in the email text and answers with a
/// well-formed verdict object. Deterministic.
class HeuristicVerdictClient : public ChatClient {
 public:
  std::string complete(const std::string& prompt) const override;

  /// The verdict the client would give for a bare email text.
  static Verdict judge(std::string_view email_text);
};

}  // namespace phishbowl
