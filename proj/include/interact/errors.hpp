#pragma once

#include <stdexcept>
#include <string>

namespace interact {

// Base of every error the harness raises. Subclasses name the failure kind so
// callers can map them onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// corpus
class ParseError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};

// provider
class TransportError : public Error {
 public:
  using Error::Error;
};
class ApiError : public Error {
 public:
  ApiError(int status, std::string body)
      : Error("API error " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};
class ContentError : public Error {
 public:
  using Error::Error;
};
class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

// authoring
class EmptyLesson : public Error {
 public:
  using Error::Error;
};
class QuizParseError : public Error {
 public:
  using Error::Error;
};

// dialogue
class SourceMismatch : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

// scoring
class EmptyQuiz : public Error {
 public:
  using Error::Error;
};
class EmptyInput : public Error {
 public:
  using Error::Error;
};
class MissingScenario : public Error {
 public:
  using Error::Error;
};

// features
class MissingRound : public Error {
 public:
  using Error::Error;
};

// gainmodel
class DegenerateData : public Error {
 public:
  using Error::Error;
};
class NonFinite : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class TooFewRows : public Error {
 public:
  using Error::Error;
};

}  // namespace interact
