#pragma once

#include <stdexcept>
#include <string>

namespace branchlab {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct process exit code (see tools/).
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,       // bad arguments / bad configuration text
  kExitIo = 3,          // missing or unreadable/unwritable files
  kExitDataFormat = 4,  // file exists but contents are malformed
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Trace files carry their own failure kinds so tests can pin down exactly
// which way a damaged file was rejected.
class TraceError : public FormatError {
 public:
  enum class Kind { bad_magic, bad_version, truncated, unknown_site, count_mismatch };

  TraceError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace branchlab
