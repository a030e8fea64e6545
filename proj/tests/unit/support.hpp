#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "phishbowl/chat_client.hpp"
#include "phishbowl/time.hpp"

namespace testing {

/// Replies from a fixed script; the last reply repeats once exhausted.
class ScriptedChatClient : public phishbowl::ChatClient {
 public:
  explicit ScriptedChatClient(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const std::string& prompt) const override {
    std::lock_guard lock(mutex_);
    prompts_.push_back(prompt);
    const std::size_t i = std::min(calls_++, replies_.size() - 1);
    return replies_[i];
  }

  std::size_t calls() const { return calls_; }
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
  }

 private:
  std::vector<std::string> replies_;
  mutable std::mutex mutex_;
  mutable std::size_t calls_ = 0;
  mutable std::vector<std::string> prompts_;
};

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("phishbowl-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Manually advanced clock for trend and platform tests.
struct ManualClock {
  std::shared_ptr<std::atomic<std::int64_t>> ms = std::make_shared<std::atomic<std::int64_t>>(0);

  phishbowl::Clock clock() const {
    auto p = ms;
    return [p] { return phishbowl::from_millis(p->load()); };
  }
  void advance_days(double days) { *ms += static_cast<std::int64_t>(days * 86'400'000.0); }
};

/// Builds word tables in the OCR engine's 12-column TSV layout.
class WordTable {
 public:
  WordTable() {
    tsv_ = "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext\n";
  }

  /// Adds one line of words at vertical position `top`, all `height` pixels
  /// high and recognized with confidence `conf`.
  WordTable& line(int top, int height, const std::string& text, double conf = 95.0) {
    ++line_num_;
    int word_num = 0;
    int left = 10;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(' ', start);
      if (end == std::string::npos) end = text.size();
      std::string word = text.substr(start, end - start);
      if (!word.empty()) {
        ++word_num;
        const int width = static_cast<int>(word.size()) * height / 2;
        tsv_ += "5\t1\t1\t1\t" + std::to_string(line_num_) + "\t" + std::to_string(word_num) +
                "\t" + std::to_string(left) + "\t" + std::to_string(top) + "\t" +
                std::to_string(width) + "\t" + std::to_string(height) + "\t" +
                std::to_string(conf) + "\t" + word + "\n";
        left += width + 5;
      }
      start = end + 1;
    }
    return *this;
  }

  /// A structural (non-word) row as the engine emits it.
  WordTable& structural_row() {
    tsv_ += "4\t1\t1\t1\t" + std::to_string(line_num_ + 1) + "\t0\t0\t0\t100\t20\t-1\t\n";
    return *this;
  }

  const std::string& tsv() const { return tsv_; }

 private:
  std::string tsv_;
  int line_num_ = 0;
};

}  // namespace testing
