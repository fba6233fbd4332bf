#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dyzeta::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternal = 1,
  kUsage = 2,
  kDomain = 3,
  kResource = 4,
  kVerifyMismatch = 5,
};

enum class Format { decimal, hex, json };

struct Request {
  bool complex = false;
  std::string s;     // real mode
  std::string sigma; // complex mode
  std::string t;
  std::int64_t bits = 64;
  Format format = Format::decimal;
  bool stats = false;
  bool verify = false;
  std::optional<std::int64_t> p;
  std::int64_t max_bits = std::int64_t{1} << 20;
  std::uint64_t max_terms = std::uint64_t{1} << 20;
  std::optional<std::int64_t> timeout_ms;
  /// Test hook: shift the computed center far outside its ball before
  /// verification.
  bool corrupt_center = false;
};

/// Runs one request given the arguments after the program name. Results go
/// to `out`, diagnostics to `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dyzeta::cli
