#pragma once

#include <stdexcept>
#include <string>

namespace bitext {

// All pipeline failures carry a machine-parsable category; the CLI prints
// them as a single "error: <category>: <message>" line.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& message) : Error("parse", message) {}
  ParseError(const std::string& path, std::size_t line, const std::string& message)
      : Error("parse", path + ":" + std::to_string(line) + ": " + message) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

struct IoError : Error {
  explicit IoError(const std::string& message) : Error("io", message) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

}  // namespace bitext
