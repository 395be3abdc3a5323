#include "adanorm/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adanorm/trace_io.hpp"

namespace adanorm {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s, std::size_t line, const std::string& key) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError(line, key + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, std::size_t line, const std::string& key) {
  char* end = nullptr;
  errno = 0;
  if (s.empty() || s[0] == '-') throw ConfigError(line, key + ": expected a nonnegative integer");
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError(line, key + ": expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s, std::size_t line, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(line, key + ": expected true or false, got '" + s + "'");
}

const std::vector<std::string> kUnits = {"", "L", "mu", "D0", "sqrtD0"};

ScaledValue scaled_at(const std::string& text, std::size_t line, const std::string& key) {
  try {
    return parse_scaled(text);
  } catch (const ConfigError& e) {
    throw ConfigError(line, key + ": " + e.what());
  }
}

std::string grid_text(const std::vector<double>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ' ';
    out += format_double(grid[i]);
  }
  return out;
}

std::vector<double> parse_grid(const std::string& value, std::size_t line, const std::string& key) {
  std::vector<double> grid;
  for (const auto& w : words(value)) grid.push_back(to_double(w, line, key));
  if (grid.empty()) throw ConfigError(line, key + ": empty list");
  return grid;
}

// logspace(lo, hi, count)
std::vector<double> parse_logspace(const std::string& value, std::size_t line) {
  const auto w = words(value);
  if (w.size() != 3) throw ConfigError(line, "sweep.logspace: expected 'lo hi count'");
  const double lo = to_double(w[0], line, "sweep.logspace");
  const double hi = to_double(w[1], line, "sweep.logspace");
  const auto count = to_u64(w[2], line, "sweep.logspace");
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw ConfigError(line, "sweep.logspace: need 0 < lo <= hi and count >= 1");
  }
  std::vector<double> grid;
  if (count == 1) return {lo};
  const double step = std::log10(hi / lo) / static_cast<double>(count - 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    grid.push_back(lo * std::pow(10.0, step * static_cast<double>(i)));
  }
  grid.back() = hi;
  return grid;
}

MethodSpec parse_method_line(const std::string& value, std::size_t line, std::size_t index) {
  const auto w = words(value);
  if (w.empty()) throw ConfigError(line, "method: missing method name");
  MethodSpec m;
  const auto method = parse_method(w[0]);
  if (!method) throw ConfigError(line, "method: unknown method '" + w[0] + "'");
  m.method = *method;
  m.mode = implied_mode(m.method).value_or(Mode::Stochastic);
  bool mode_given = false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string::npos) throw ConfigError(line, "method: expected key=value, got '" + w[i] + "'");
    const auto key = w[i].substr(0, eq);
    const auto val = w[i].substr(eq + 1);
    if (key == "mode") {
      const auto mode = parse_mode(val);
      if (!mode) throw ConfigError(line, "method: unknown mode '" + val + "'");
      m.mode = *mode;
      mode_given = true;
    } else if (key == "eta") {
      m.eta = scaled_at(val, line, "eta");
    } else if (key == "b0") {
      m.b0 = scaled_at(val, line, "b0");
    } else if (key == "batch") {
      m.batch_size = to_u64(val, line, "batch");
      if (m.batch_size == 0) throw ConfigError(line, "batch: must be >= 1");
    } else if (key == "decay") {
      m.decay = to_double(val, line, "decay");
    } else if (key == "label") {
      m.label = val;
    } else {
      throw ConfigError(line, "method: unknown field '" + key + "'");
    }
  }
  if (auto implied = implied_mode(m.method); implied && mode_given && *implied != m.mode) {
    throw ConfigError(line, to_string(m.method) + " runs in " + to_string(*implied) + " mode only");
  }
  if (m.label.empty()) {
    m.label = to_string(m.method) + "_" + to_string(m.mode) + "_" + std::to_string(index);
  }
  return m;
}

void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> generators = {"least_squares", "least_squares_noisy",
                                                      "regularized", "two_layer_relu"};
  if (std::find(generators.begin(), generators.end(), c.problem.generator) == generators.end()) {
    throw ConfigError(0, "problem: unknown generator '" + c.problem.generator + "'");
  }
  if (c.problem.n < 1 || c.problem.d < 1 || c.problem.m < 1) {
    throw ConfigError(0, "problem: n, d, m must be >= 1");
  }
  if (c.repeats < 1) throw ConfigError(0, "repeats must be >= 1");
  if (c.max_iters < 0) throw ConfigError(0, "max_iters must be >= 0");
  if (c.stride < 1) throw ConfigError(0, "stride must be >= 1");
  if (c.x0 != "default" && c.x0 != "zero" && c.x0.rfind("gaussian:", 0) != 0) {
    throw ConfigError(0, "x0: expected default, zero or gaussian:<scale>");
  }
  std::vector<std::string> labels;
  for (const auto& m : c.methods) {
    if (std::find(labels.begin(), labels.end(), m.label) != labels.end()) {
      throw ConfigError(0, "duplicate method label '" + m.label + "'");
    }
    labels.push_back(m.label);
  }
  if (c.sweep) {
    if (c.sweep->param != "b0" && c.sweep->param != "eta") {
      throw ConfigError(0, "sweep.param: expected b0 or eta");
    }
    if (c.sweep->grid.empty()) throw ConfigError(0, "sweep: grid is empty");
    if (!std::is_sorted(c.sweep->grid.begin(), c.sweep->grid.end())) {
      throw ConfigError(0, "sweep: grid must be sorted ascending");
    }
  }
  if (c.ruig && c.ruig->alpha_grid.empty()) throw ConfigError(0, "ruig.alpha_grid is empty");
}

}  // namespace

ScaledValue parse_scaled(const std::string& text) {
  ScaledValue v;
  const auto star = text.find('*');
  const std::string num = star == std::string::npos ? text : text.substr(0, star);
  v.unit = star == std::string::npos ? "" : text.substr(star + 1);
  if (std::find(kUnits.begin(), kUnits.end(), v.unit) == kUnits.end()) {
    throw ConfigError(0, "unknown unit '" + v.unit + "'");
  }
  char* end = nullptr;
  v.value = std::strtod(num.c_str(), &end);
  if (num.empty() || end != num.c_str() + num.size()) {
    throw ConfigError(0, "expected a number, got '" + text + "'");
  }
  return v;
}

std::string to_string(const ScaledValue& v) {
  return v.unit.empty() ? format_double(v.value) : format_double(v.value) + "*" + v.unit;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string raw;
  std::size_t line = 0;
  bool logspace_given = false;
  bool grid_given = false;

  auto sweep = [&]() -> SweepSpec& {
    if (!c.sweep) c.sweep.emplace();
    return *c.sweep;
  };
  auto ruig = [&]() -> RuigSpec& {
    if (!c.ruig) c.ruig.emplace();
    return *c.ruig;
  };
  auto bounds = [&]() -> BoundsSpec& {
    if (!c.bounds) c.bounds.emplace();
    return *c.bounds;
  };

  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");

    if (key == "experiment") c.id = value;
    else if (key == "description") c.description = value;
    else if (key == "problem") c.problem.generator = value;
    else if (key == "problem.n") c.problem.n = to_u64(value, line, key);
    else if (key == "problem.d") c.problem.d = to_u64(value, line, key);
    else if (key == "problem.m") c.problem.m = to_u64(value, line, key);
    else if (key == "problem.sigma") c.problem.sigma = to_double(value, line, key);
    else if (key == "problem.lambda") c.problem.lambda = to_double(value, line, key);
    else if (key == "problem.seed") c.problem.seed = to_u64(value, line, key);
    else if (key == "problem.allow_degenerate") c.problem.allow_degenerate = to_bool(value, line, key);
    else if (key == "method") c.methods.push_back(parse_method_line(value, line, c.methods.size()));
    else if (key == "max_iters") c.max_iters = static_cast<std::int64_t>(to_u64(value, line, key));
    else if (key == "stop_tol") c.stop_tol = to_double(value, line, key);
    else if (key == "repeats") c.repeats = to_u64(value, line, key);
    else if (key == "seed") c.seed = to_u64(value, line, key);
    else if (key == "stride") c.stride = static_cast<std::int64_t>(to_u64(value, line, key));
    else if (key == "x0") c.x0 = value;
    else if (key == "track_gap") c.track_gap = to_bool(value, line, key);
    else if (key == "sweep.param") sweep().param = value;
    else if (key == "sweep.unit") sweep().unit = value;
    else if (key == "sweep.grid") {
      sweep().grid = parse_grid(value, line, key);
      grid_given = true;
    } else if (key == "sweep.logspace") {
      sweep().grid = parse_logspace(value, line);
      logspace_given = true;
    }
    else if (key == "ruig.epsilon") ruig().epsilon = to_double(value, line, key);
    else if (key == "ruig.alpha_grid") ruig().alpha_grid = parse_grid(value, line, key);
    else if (key == "ruig.alpha_in_units") ruig().alpha_in_units = to_bool(value, line, key);
    else if (key == "ruig.points") ruig().points = to_u64(value, line, key);
    else if (key == "ruig.samples") ruig().samples = to_u64(value, line, key);
    else if (key == "bounds.eps") bounds().eps = to_double(value, line, key);
    else if (key == "bounds.delta_h") bounds().delta_h = to_double(value, line, key);
    else if (key == "bounds.C") bounds().C = scaled_at(value, line, key);
    else throw ConfigError(line, "unknown key '" + key + "'");

    if (grid_given && logspace_given) {
      throw ConfigError(line, "sweep.grid and sweep.logspace are exclusive");
    }
  }
  if (c.sweep && std::find(kUnits.begin(), kUnits.end(), c.sweep->unit) == kUnits.end()) {
    throw ConfigError(0, "sweep.unit: unknown unit '" + c.sweep->unit + "'");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "experiment = " << c.id << '\n';
  if (!c.description.empty()) os << "description = " << c.description << '\n';
  os << "problem = " << c.problem.generator << '\n'
     << "problem.n = " << c.problem.n << '\n'
     << "problem.d = " << c.problem.d << '\n'
     << "problem.m = " << c.problem.m << '\n'
     << "problem.sigma = " << format_double(c.problem.sigma) << '\n'
     << "problem.lambda = " << format_double(c.problem.lambda) << '\n'
     << "problem.seed = " << c.problem.seed << '\n'
     << "problem.allow_degenerate = " << (c.problem.allow_degenerate ? "true" : "false") << '\n'
     << "max_iters = " << c.max_iters << '\n'
     << "stop_tol = " << format_double(c.stop_tol) << '\n'
     << "repeats = " << c.repeats << '\n'
     << "seed = " << c.seed << '\n'
     << "stride = " << c.stride << '\n'
     << "x0 = " << c.x0 << '\n'
     << "track_gap = " << (c.track_gap ? "true" : "false") << '\n';
  for (const auto& m : c.methods) {
    os << "method = " << to_string(m.method) << " mode=" << to_string(m.mode)
       << " eta=" << to_string(m.eta) << " b0=" << to_string(m.b0) << " batch=" << m.batch_size
       << " decay=" << format_double(m.decay) << " label=" << m.label << '\n';
  }
  if (c.sweep) {
    os << "sweep.param = " << c.sweep->param << '\n'
       << "sweep.grid = " << grid_text(c.sweep->grid) << '\n';
    if (!c.sweep->unit.empty()) os << "sweep.unit = " << c.sweep->unit << '\n';
  }
  if (c.ruig) {
    os << "ruig.epsilon = " << format_double(c.ruig->epsilon) << '\n'
       << "ruig.alpha_grid = " << grid_text(c.ruig->alpha_grid) << '\n'
       << "ruig.alpha_in_units = " << (c.ruig->alpha_in_units ? "true" : "false") << '\n'
       << "ruig.points = " << c.ruig->points << '\n'
       << "ruig.samples = " << c.ruig->samples << '\n';
  }
  if (c.bounds) {
    os << "bounds.eps = " << format_double(c.bounds->eps) << '\n'
       << "bounds.delta_h = " << format_double(c.bounds->delta_h) << '\n';
    if (c.bounds->C) os << "bounds.C = " << to_string(*c.bounds->C) << '\n';
  }
  return os.str();
}

}  // namespace adanorm
