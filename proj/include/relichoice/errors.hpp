#pragma once

#include <stdexcept>
#include <string>

namespace relichoice {

/// Position of a token in DSL source text. 1-based line and column.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 1;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ParseErrorKind { lex, syntax, semantic };

/// Raised by the text parser. Carries the span of the offending token.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, SourceSpan span, const std::string& msg)
      : Error("line " + std::to_string(span.line) + ", col " +
              std::to_string(span.column) + ": " + msg),
        kind_(kind),
        span_(span),
        message_(msg) {}

  ParseErrorKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  ParseErrorKind kind_;
  SourceSpan span_;
  std::string message_;
};

/// Raised by the structured (JSON) loader. `path` names the offending field,
/// e.g. "components[0].lambda".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& msg)
      : Error(path.empty() ? msg : path + ": " + msg), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Bad argument values or operations outside their mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A closed form was requested for a topology it does not cover.
class ShapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace relichoice
