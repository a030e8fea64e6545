#pragma once

#include <optional>
#include <string>

#include "phishbowl/chat_client.hpp"
#include "phishbowl/email_model.hpp"

namespace phishbowl {

/// Email with named entities replaced by placeholders such as [Person 1].
struct AnonymizedEmail {
  std::optional<std::string> sender;
  std::optional<std::string> subject;
  std::string body;

  EmailContent to_content() const { return {sender, subject, body}; }
};

/// The anonymization prompt with `{sender}`, `{subject}` and `{body}`
/// placeholders still in place.
std::string_view anonymize_prompt_template();

/// Interpolates the email into the anonymization prompt. Missing sender or
/// subject render as the literal `null`.
std::string build_anonymize_prompt(const EmailContent& email);

/// Strict parse of the model reply: exactly the keys sender (string|null),
/// subject (string|null) and body (non-empty string).
AnonymizedEmail parse_anonymizer_response(std::string_view raw);

/// Prompt, call, validate; retries on validation failures only.
/// Throws ValidationError("anonymize", ...) with the last diagnostic once
/// `max_attempts` replies have been rejected.
AnonymizedEmail anonymize(const EmailContent& email, const ChatClient& client,
                          int max_attempts = 2);

/// Offline stand-in for a real model. Reads the email back out of an
/// anonymization prompt and masks email addresses and capitalized two-word
/// names with [Person n]; repeated surface forms share a placeholder.
class MaskingChatClient : public ChatClient {
 public:
  std::string complete(const std::string& prompt) const override;
};

}  // namespace phishbowl
