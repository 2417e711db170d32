#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evalkit {

// Root of every error thrown by the library. Catch this at job boundaries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unsupported or malformed field path expression.
class PathSyntaxError : public Error {
 public:
  PathSyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Addressed field does not exist in the document.
class PathMissError : public Error {
 public:
  using Error::Error;
};

// Addressed field exists but has a shape the caller cannot use.
class TypeMismatchError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

// A record-level extraction failure while loading. Carries the 0-based
// record index so the offending row can be located.
class RecordError : public DatasetError {
 public:
  RecordError(std::size_t record_index, const std::string& message)
      : DatasetError("record " + std::to_string(record_index) + ": " + message),
        record_index_(record_index) {}
  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

// A file or directory could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class RunnerError : public Error {
 public:
  enum class Kind { kBackendUnavailable, kMalformedResponse, kCapabilityMissing, kTimeout, kRetriesExhausted, kHttpStatus };

  RunnerError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// The configured response path could not be applied to a backend reply.
// Keeps the raw body for debugging.
class ExtractionError : public RunnerError {
 public:
  ExtractionError(const std::string& message, std::string body)
      : RunnerError(Kind::kMalformedResponse, message + "; response body: " + body), body_(std::move(body)) {}
  const std::string& body() const noexcept { return body_; }

 private:
  std::string body_;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field_path, const std::string& message)
      : Error(field_path.empty() ? message : field_path + ": " + message), field_path_(field_path) {}
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace evalkit
