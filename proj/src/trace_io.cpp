#include "adanorm/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include <fmt/format.h>

namespace adanorm {

std::string format_double(double value) { return fmt::format("{}", value); }

namespace {

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// from_chars, not stod: stod rejects subnormals with out_of_range.
double parse_double(const std::string& cell) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw IoError("bad number in trace: '" + cell + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_double(cell);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const auto& c = trace.config;
  out << "# optimizer=" << c.optimizer << '\n'
      << "# mode=" << c.mode << '\n'
      << "# problem=" << c.problem << '\n'
      << "# seed=" << c.seed << '\n'
      << "# eta=" << format_double(c.eta) << '\n'
      << "# b0=" << format_double(c.b0) << '\n'
      << "# batch_size=" << c.batch_size << '\n'
      << "# max_iters=" << c.max_iters << '\n'
      << "# stop_tol=" << format_double(c.stop_tol) << '\n'
      << "# stride=" << c.stride << '\n'
      << "# iterations=" << trace.iterations << '\n'
      << "# diverged=" << (trace.diverged ? 1 : 0) << '\n'
      << "# converged=" << (trace.converged ? 1 : 0) << '\n'
      << "# final_b=" << format_double(trace.final_b) << '\n'
      << "# final_err_sq=" << optional_cell(trace.final_err_sq) << '\n'
      << "# final_gap=" << optional_cell(trace.final_gap) << '\n';
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << format_double(r.b) << ',' << optional_cell(r.err_sq) << ','
        << optional_cell(r.gap) << ',' << format_double(r.grad_norm_sq) << ','
        << format_double(r.stepsize) << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  auto& c = trace.config;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "optimizer") c.optimizer = val;
      else if (key == "mode") c.mode = val;
      else if (key == "problem") c.problem = val;
      else if (key == "seed") c.seed = std::stoull(val);
      else if (key == "eta") c.eta = parse_double(val);
      else if (key == "b0") c.b0 = parse_double(val);
      else if (key == "batch_size") c.batch_size = std::stoull(val);
      else if (key == "max_iters") c.max_iters = std::stoll(val);
      else if (key == "stop_tol") c.stop_tol = parse_double(val);
      else if (key == "stride") c.stride = std::stoll(val);
      else if (key == "iterations") trace.iterations = std::stoll(val);
      else if (key == "diverged") trace.diverged = val == "1";
      else if (key == "converged") trace.converged = val == "1";
      else if (key == "final_b") trace.final_b = parse_double(val);
      else if (key == "final_err_sq") trace.final_err_sq = parse_optional(val);
      else if (key == "final_gap") trace.final_gap = parse_optional(val);
      continue;
    }
    if (!header_seen) {
      if (line != kTraceCsvHeader) throw IoError("unexpected trace header: " + line);
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6) throw IoError("malformed trace row: " + line);
    TraceRecord r;
    r.t = std::stoll(cells[0]);
    r.b = parse_double(cells[1]);
    r.err_sq = parse_optional(cells[2]);
    r.gap = parse_optional(cells[3]);
    r.grad_norm_sq = parse_double(cells[4]);
    r.stepsize = parse_double(cells[5]);
    trace.records.push_back(r);
  }
  if (!header_seen) throw IoError("trace csv has no header");
  trace.max_b = trace.final_b;
  for (const auto& r : trace.records) trace.max_b = std::max(trace.max_b, r.b);
  return trace;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

}  // namespace adanorm
