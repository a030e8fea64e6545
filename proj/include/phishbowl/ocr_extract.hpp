#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phishbowl {

struct LineKey {
  int block = 0;
  int paragraph = 0;
  int line = 0;

  auto operator<=>(const LineKey&) const = default;
};

/// One recognized word from an OCR engine's word-level table.
struct OcrWord {
  std::string text;
  double confidence = 0.0;  // 0..100
  LineKey line_key;
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;
};

struct OcrConfig {
  double t_ocr = 80.0;
  int t_header = 7;
  double k_subject = 1.25;
  double k_logo = 1.5;
  std::vector<std::string> header_terms{"from", "to", "subject", "sender"};
  std::vector<std::string> greeting_terms{"hi", "hello", "dear"};
  std::string email_regex = R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})";

  void validate() const;
};

struct ExtractedEmail {
  std::optional<std::string> sender;
  std::optional<std::string> subject;
  std::string body;
  int header_until = 0;
  int body_from = 0;
  /// Reconstructed line texts in reading order.
  std::vector<std::string> lines;
};

/// Parses the 12-column tab-separated word table (level, page_num,
/// block_num, par_num, line_num, word_num, left, top, width, height, conf,
/// text). Keeps word rows with non-empty text; rows with confidence -1 are
/// structural and dropped. Throws ParseError naming the 1-based row.
std::vector<OcrWord> parse_word_table(std::string_view raw);

/// Recovers sender, subject and body from screenshot OCR output using line
/// height and keyword heuristics. Throws ValidationError("ocr", ...) when no
/// word clears the confidence threshold.
ExtractedEmail extract_email(const std::vector<OcrWord>& words,
                             const OcrConfig& config = {});

}  // namespace phishbowl
