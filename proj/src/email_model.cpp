#include "phishbowl/email_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

std::string label_line(const std::optional<Label>& label) {
  if (!label) return "This is a email:";
  return *label == Label::Phishing ? "This is a phishing email:"
                                   : "This is a benign email:";
}

struct Parts {
  std::string label;
  std::optional<std::string> sender;
  std::optional<std::string> subject;
  std::string_view body;
  bool keep_label = true;
  bool keep_sender = true;
  bool keep_subject = true;

  std::string prefix() const {
    std::string out;
    if (keep_label) out += label + "\n";
    if (keep_sender && sender) out += "From: " + *sender + "\n";
    if (keep_subject && subject) out += "To: " + *subject + "\n";
    return out;
  }

  std::string render() const { return prefix() + std::string(body); }
};

// Largest n such that counter(prefix + first n chars of tail) fits.
std::size_t max_fitting_chars(const std::string& prefix, std::string_view tail,
                              std::size_t limit, const TokenCounter& counter) {
  std::size_t lo = 0;
  std::size_t hi = utf8_length(tail);
  auto fits = [&](std::size_t n) {
    std::string candidate = prefix;
    candidate += utf8_prefix(tail, n);
    return counter(candidate) <= limit;
  };
  if (!fits(0)) return 0;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

}  // namespace

void EmailContent::validate() const {
  if (body.empty() || is_blank(body)) {
    throw ValidationError("request", "email body is empty");
  }
}

std::string_view to_string(Truncation t) {
  switch (t) {
    case Truncation::NoTruncation: return "none";
    case Truncation::End: return "end";
    case Truncation::Content: return "content";
    case Truncation::ContentEnd: return "content-end";
  }
  return "none";
}

std::optional<Truncation> parse_truncation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "none") return Truncation::NoTruncation;
  if (lower == "end") return Truncation::End;
  if (lower == "content") return Truncation::Content;
  if (lower == "content-end" || lower == "contentend" || lower == "content_end") {
    return Truncation::ContentEnd;
  }
  return std::nullopt;
}

void ConverterConfig::validate() const {
  if (token_limit < 8) {
    throw ValidationError("config", "token_limit must be at least 8");
  }
  if (!(tokens_per_char > 0.0)) {
    throw ValidationError("config", "tokens_per_char must be positive");
  }
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(),
      [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

std::string_view utf8_prefix(std::string_view text, std::size_t chars) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(text[i]))) {
      if (seen == chars) return text.substr(0, i);
      ++seen;
    }
  }
  return text;
}

std::size_t estimate_tokens(std::string_view text, double tokens_per_char) {
  if (text.empty()) return 0;
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(utf8_length(text)) * tokens_per_char));
}

TokenCounter character_estimator(double tokens_per_char) {
  return [tokens_per_char](std::string_view text) {
    return estimate_tokens(text, tokens_per_char);
  };
}

std::string email_to_text(const LabeledEmail& email,
                          const ConverterConfig& config,
                          const TokenCounter& counter_in) {
  email.content.validate();
  config.validate();
  const TokenCounter counter =
      counter_in ? counter_in : character_estimator(config.tokens_per_char);
  const auto limit = static_cast<std::size_t>(config.token_limit);

  Parts parts{label_line(email.label), email.content.sender,
              email.content.subject, email.content.body};

  if (config.strategy == Truncation::NoTruncation) return parts.render();

  if (config.strategy == Truncation::End) {
    std::string full = parts.render();
    std::size_t n = max_fitting_chars("", full, limit, counter);
    if (n == 0) {
      throw TokenLimitError("convert", "token limit admits no characters");
    }
    return std::string(utf8_prefix(full, n));
  }

  // Content and ContentEnd drop metadata from the lowest priority upward.
  auto fits = [&] { return counter(parts.render()) <= limit; };
  if (fits()) return parts.render();
  parts.keep_subject = false;
  if (fits()) return parts.render();
  parts.keep_sender = false;
  if (fits()) return parts.render();

  if (config.strategy == Truncation::Content) {
    parts.keep_label = false;
    if (fits()) return parts.render();
    throw TokenLimitError("convert",
                          "body alone exceeds the token limit; content "
                          "truncation cannot omit it");
  }

  // ContentEnd: keep the label line while at least one body character fits,
  // otherwise fall back to the bare body.
  std::string prefix = parts.prefix();
  std::size_t n = max_fitting_chars(prefix, parts.body, limit, counter);
  if (n == 0) {
    prefix.clear();
    n = max_fitting_chars(prefix, parts.body, limit, counter);
  }
  if (n == 0) {
    throw TokenLimitError("convert", "token limit admits no body characters");
  }
  return prefix + std::string(utf8_prefix(parts.body, n));
}

}  // namespace phishbowl
