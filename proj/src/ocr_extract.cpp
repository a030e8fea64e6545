#include "phishbowl/ocr_extract.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <regex>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

constexpr std::array<std::string_view, 12> kColumns{
    "level", "page_num", "block_num", "par_num", "line_num", "word_num",
    "left",  "top",      "width",     "height",  "conf",     "text"};
constexpr int kWordLevel = 5;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

int parse_int(std::string_view field, std::string_view column, std::size_t row) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("ocr", "non-numeric " + std::string(column) + " '" +
                                std::string(field) + "'",
                     row);
  }
  return value;
}

double parse_double(std::string_view field, std::string_view column, std::size_t row) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("ocr", "non-numeric " + std::string(column) + " '" +
                                std::string(field) + "'",
                     row);
  }
  return value;
}

std::string escape_regex(std::string_view term) {
  static const std::string specials = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : term) {
    if (specials.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::regex word_alternation(const std::vector<std::string>& terms) {
  std::string pattern = R"(\b(?:)";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) pattern += '|';
    pattern += escape_regex(terms[i]);
  }
  pattern += R"()\b)";
  return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
}

struct Line {
  LineKey key;
  std::vector<OcrWord> words;
  std::string text;
  double mean_height = 0.0;
  int top = 0;
};

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void OcrConfig::validate() const {
  if (t_ocr < 0.0 || t_ocr > 100.0) {
    throw ValidationError("config", "t_ocr must lie in [0, 100]");
  }
  if (t_header < 1) throw ValidationError("config", "t_header must be >= 1");
  if (!(k_subject > 0.0) || k_logo < k_subject) {
    throw ValidationError("config", "require k_logo >= k_subject > 0");
  }
  if (header_terms.empty() || greeting_terms.empty()) {
    throw ValidationError("config", "header and greeting term lists must be non-empty");
  }
}

std::vector<OcrWord> parse_word_table(std::string_view raw) {
  std::vector<OcrWord> words;
  auto rows = split(raw, '\n');
  bool header_seen = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t row_number = i + 1;
    std::string_view row = rows[i];
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (trim(row).empty()) continue;

    auto fields = split(row, '\t');
    if (!header_seen) {
      if (fields.size() != kColumns.size()) {
        throw ParseError("ocr", "header must name the 12 word-table columns",
                         row_number);
      }
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (trim(fields[c]) != kColumns[c]) {
          throw ParseError("ocr", "unexpected header column '" +
                                      std::string(fields[c]) + "'",
                           row_number);
        }
      }
      header_seen = true;
      continue;
    }

    // Structural rows may omit the trailing empty text column.
    if (fields.size() == kColumns.size() - 1) fields.emplace_back();
    if (fields.size() != kColumns.size()) {
      throw ParseError("ocr", "expected 12 columns, found " +
                                  std::to_string(fields.size()),
                       row_number);
    }

    const int level = parse_int(fields[0], kColumns[0], row_number);
    parse_int(fields[1], kColumns[1], row_number);
    OcrWord word;
    word.line_key.block = parse_int(fields[2], kColumns[2], row_number);
    word.line_key.paragraph = parse_int(fields[3], kColumns[3], row_number);
    word.line_key.line = parse_int(fields[4], kColumns[4], row_number);
    parse_int(fields[5], kColumns[5], row_number);
    word.left = parse_int(fields[6], kColumns[6], row_number);
    word.top = parse_int(fields[7], kColumns[7], row_number);
    word.width = parse_int(fields[8], kColumns[8], row_number);
    word.height = parse_int(fields[9], kColumns[9], row_number);
    word.confidence = parse_double(fields[10], kColumns[10], row_number);
    word.text = std::string(trim(fields[11]));

    if (level != kWordLevel || word.confidence == -1.0 || word.text.empty()) {
      continue;
    }
    if (word.confidence < 0.0 || word.confidence > 100.0) {
      throw ParseError("ocr", "confidence out of [0, 100]", row_number);
    }
    if (word.left < 0 || word.top < 0 || word.width < 0 || word.height < 0) {
      throw ParseError("ocr", "negative geometry", row_number);
    }
    words.push_back(std::move(word));
  }
  if (!header_seen) throw ParseError("ocr", "missing header row", 1);
  return words;
}

ExtractedEmail extract_email(const std::vector<OcrWord>& words,
                             const OcrConfig& config) {
  config.validate();

  // Confidence filtering, then grouping by engine line id.
  std::map<LineKey, Line> by_key;
  for (const auto& w : words) {
    if (w.confidence < config.t_ocr || w.height <= 0) continue;
    auto& line = by_key[w.line_key];
    line.key = w.line_key;
    line.words.push_back(w);
  }
  if (by_key.empty()) {
    throw ValidationError("ocr", "no confident text");
  }

  std::vector<Line> lines;
  lines.reserve(by_key.size());
  for (auto& [key, line] : by_key) {
    std::stable_sort(line.words.begin(), line.words.end(),
                     [](const OcrWord& a, const OcrWord& b) { return a.left < b.left; });
    double height_sum = 0.0;
    for (std::size_t i = 0; i < line.words.size(); ++i) {
      if (i) line.text += ' ';
      line.text += line.words[i].text;
      height_sum += line.words[i].height;
    }
    line.mean_height = height_sum / static_cast<double>(line.words.size());
    line.top = line.words.front().top;
    lines.push_back(std::move(line));
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.top != b.top) return a.top < b.top;
    return a.key < b.key;
  });

  ExtractedEmail out;
  for (const auto& l : lines) out.lines.push_back(l.text);
  const int line_count = static_cast<int>(lines.size());

  // Header: everything up to the last header term, capped at t_header.
  const std::regex header_re = word_alternation(config.header_terms);
  int last_header = -1;
  for (int i = 0; i < line_count; ++i) {
    if (std::regex_search(lines[i].text, header_re)) last_header = i;
  }
  out.header_until = last_header < 0 ? 0 : std::min(last_header + 1, config.t_header);

  // Body: first greeting at or after the header end; the whole email otherwise.
  const std::regex greeting_re = word_alternation(config.greeting_terms);
  out.body_from = 0;
  for (int i = out.header_until; i < line_count; ++i) {
    if (std::regex_search(lines[i].text, greeting_re)) {
      out.body_from = i;
      break;
    }
  }
  for (int i = out.body_from; i < line_count; ++i) {
    if (i > out.body_from) out.body += '\n';
    out.body += lines[i].text;
  }

  // Subject: explicit "subject:" label wins over the height heuristic.
  const std::regex subject_re(R"(subject\s*:)", std::regex::ECMAScript | std::regex::icase);
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_search(l.text, m, subject_re)) {
      auto rest = trim(std::string_view(l.text).substr(m.position(0) + m.length(0)));
      if (!rest.empty()) {
        out.subject = std::string(rest);
        break;
      }
    }
  }
  if (!out.subject) {
    std::vector<double> heights;
    for (const auto& l : lines) heights.push_back(l.mean_height);
    const double med = median(heights);
    std::string joined;
    for (const auto& l : lines) {
      if (l.mean_height > med * config.k_subject && l.mean_height <= med * config.k_logo) {
        if (!joined.empty()) joined += ' ';
        joined += l.text;
      }
    }
    if (!joined.empty()) out.subject = std::move(joined);
  }

  // Sender: first address-looking token, header lines first.
  const std::regex email_re(config.email_regex);
  auto find_sender = [&](int from, int to) -> std::optional<std::string> {
    for (int i = from; i < to; ++i) {
      std::smatch m;
      if (std::regex_search(lines[i].text, m, email_re)) return m.str(0);
    }
    return std::nullopt;
  };
  out.sender = find_sender(0, out.header_until);
  if (!out.sender) out.sender = find_sender(0, line_count);

  return out;
}

}  // namespace phishbowl
