#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "adanorm/optimizers.hpp"

namespace adanorm {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTraceCsvHeader = "t,b,err_sq,gap,grad_norm_sq,stepsize";

/// Shortest decimal string that round-trips the double.
std::string format_double(double value);

/// CSV with a `#`-prefixed config block, then `t,b,err_sq,gap,grad_norm_sq,stepsize`.
/// Absent optional columns are written empty.
void write_trace_csv(std::ostream& out, const Trace& trace);
std::string trace_csv(const Trace& trace);

/// Parses what write_trace_csv produced (config block and records).
Trace read_trace_csv(std::istream& in);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace adanorm
