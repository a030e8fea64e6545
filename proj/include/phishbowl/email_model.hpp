#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace phishbowl {

enum class Label : int { Benign = 0, Phishing = 1 };

/// Structured email. An absent sender/subject is distinct from an empty one.
struct EmailContent {
  std::optional<std::string> sender;
  std::optional<std::string> subject;
  std::string body;

  /// Throws ValidationError when the body is blank.
  void validate() const;

  bool operator==(const EmailContent&) const = default;
};

struct LabeledEmail {
  EmailContent content;
  std::optional<Label> label;
};

enum class Truncation { NoTruncation, End, Content, ContentEnd };

std::string_view to_string(Truncation t);
/// Accepts "none", "end", "content", "content-end" (case-insensitive).
std::optional<Truncation> parse_truncation(std::string_view name);

struct ConverterConfig {
  Truncation strategy = Truncation::NoTruncation;
  int token_limit = 8191;
  double tokens_per_char = 0.2815;

  void validate() const;
};

/// Maps text to a token count. Must return 0 for empty text and be monotone
/// in prefix length.
using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view text);
/// Longest prefix holding at most `chars` scalar values.
std::string_view utf8_prefix(std::string_view text, std::size_t chars);

/// ceil(scalar count × tokens_per_char).
std::size_t estimate_tokens(std::string_view text, double tokens_per_char);
TokenCounter character_estimator(double tokens_per_char);

/// Renders an email as a single prompt-ready string:
///
///   This is a phishing email:      (or "benign", or "This is a email:")
///   From: {sender}                 (only if present)
///   To: {subject}                  (only if present)
///   {body}
///
/// then fits it under `config.token_limit` with the configured strategy.
/// Parts are kept in priority order body > label > sender > subject.
/// When `counter` is empty the character estimator from `config` is used.
/// Throws TokenLimitError when nothing admissible fits.
std::string email_to_text(const LabeledEmail& email,
                          const ConverterConfig& config,
                          const TokenCounter& counter = {});

}  // namespace phishbowl
