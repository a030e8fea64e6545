#pragma once

#include <stdexcept>
#include <string>

namespace phishbowl {

/// Base for every error the library raises. `stage()` names the pipeline
/// step that failed so the service and CLI can report it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Input failed a structural or schema check.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed row in a word table or persisted log.
class ParseError : public Error {
 public:
  ParseError(std::string stage, const std::string& message, std::size_t row)
      : Error(std::move(stage), "row " + std::to_string(row) + ": " + message),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DimensionError : public Error {
 public:
  DimensionError(std::size_t expected, std::size_t actual)
      : Error("bowl", "vector dimension " + std::to_string(actual) +
                          " does not match store dimension " +
                          std::to_string(expected)) {}
};

/// Scoring was requested against a bowl with no records.
class ColdBowlError : public Error {
 public:
  ColdBowlError() : Error("bowl", "cold bowl: no records to compare against") {}
};

/// Even the smallest admissible output cannot meet the token limit.
class TokenLimitError : public Error {
 public:
  using Error::Error;
};

/// A chat or embedding endpoint could not be reached or answered badly.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace phishbowl
