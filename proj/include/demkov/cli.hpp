#pragma once

// Command-line front end. Everything except main() lives here so the tests
// can drive the commands in-process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "demkov/core.hpp"
#include "demkov/error.hpp"
#include "demkov/oracle.hpp"
#include "demkov/precision.hpp"
#include "demkov/resonant.hpp"

namespace demkov::cli {

enum class Command { evolve, inversion, sweep, compare, resonant };
enum class Format { csv, json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_compare_failed = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One swept reduced parameter: `count` values from min to max, linear or log.
struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : double(i) / double(count - 1);
      v[i] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                 : min + f * (max - min);
    }
    if (count > 1) v.back() = max;
    return v;
  }

  /// Parses "min:max:count" or "min:max:count:log".
  static GridAxis parse(const std::string& name, const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4)
      throw UsageError("--sweep-" + name + " expects min:max:count[:log], got '" + text + "'");
    GridAxis g;
    g.name = name;
    try {
      std::size_t pos = 0;
      g.min = std::stod(parts[0], &pos);
      if (pos != parts[0].size()) throw std::invalid_argument(parts[0]);
      g.max = std::stod(parts[1], &pos);
      if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
      g.count = std::stoi(parts[2], &pos);
      if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
      throw UsageError("--sweep-" + name + ": cannot parse '" + text + "'");
    }
    if (parts.size() == 4) {
      if (parts[3] != "log" && parts[3] != "linear")
        throw UsageError("--sweep-" + name + ": scale must be 'log' or 'linear'");
      g.log = parts[3] == "log";
    }
    if (g.count < 1) throw UsageError("--sweep-" + name + ": count must be >= 1");
    if (!(g.min <= g.max)) throw UsageError("--sweep-" + name + ": min must not exceed max");
    if (g.log && !(g.min > 0.0)) throw UsageError("--sweep-" + name + ": log scale needs min > 0");
    return g;
  }
};

struct RunSpec {
  Command command = Command::evolve;
  /// True when the parameters came in as (gamma, delta, omega) with T = 1.
  bool reduced = true;
  ModelParams params;
  double gamma = 0.0, delta = 0.0, omega = 0.0;  // reduced mode only
  std::vector<GridAxis> grid;
  double t_min = -10.0;
  double t_max = 10.0;
  int n_points = 201;
  std::string output = "-";
  Format format = Format::csv;
  PrecisionPolicy policy;
  oracle::IntegratorConfig oracle;
  double tolerance = 1e-6;

  void validate() const {
    params.validate();
    policy.validate();
    oracle.validate();
    if (command == Command::sweep) {
      if (!reduced) throw UsageError("sweep requires reduced parameters (--gamma/--delta/--omega)");
      if (grid.empty() || grid.size() > 2)
        throw UsageError("sweep requires one or two --sweep-<param> axes");
      if (grid.size() == 2 && grid[0].name == grid[1].name)
        throw UsageError("sweep axes must be distinct");
    } else if (!grid.empty()) {
      throw UsageError("--sweep-* options are only valid with the sweep command");
    }
    if (command == Command::evolve || command == Command::compare || command == Command::resonant) {
      if (!(t_min < t_max)) throw UsageError("--t-min must be smaller than --t-max");
      if (n_points < 2) throw UsageError("--n must be at least 2");
    }
    if (!(tolerance > 0.0)) throw UsageError("--tolerance must be positive");
  }
};

struct CompareReport {
  std::vector<double> times;
  std::vector<double> analytic;
  std::vector<double> oracle;
  std::vector<double> abs_diff;
  double sup_norm = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

// ---------------------------------------------------------------- output

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::non_convergence, "non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

namespace detail {

inline std::string cell_text(const Cell& c, bool quote) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  const auto& s = std::get<std::string>(c);
  return quote ? "\"" + s + "\"" : s;
}

inline void write_records_json(std::ostream& os, const Table& t, const std::string& indent) {
  os << "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? ",\n" : "\n") << indent << "  {";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      os << (c ? ", " : "") << '"' << t.columns[c] << "\": " << cell_text(t.rows[r][c], true);
    os << "}";
  }
  os << (t.rows.empty() ? "]" : "\n" + indent + "]");
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << detail::cell_text(row[c], false);
    os << '\n';
  }
  return os.str();
}

inline std::string to_json(const Table& t) {
  std::ostringstream os;
  detail::write_records_json(os, t, "");
  os << '\n';
  return os.str();
}

/// Writes to stdout for "-", otherwise to a temporary sibling that is renamed
/// over the target, so a failed run never leaves a partial file behind.
inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

// --------------------------------------------------------------- commands

inline Table bloch_table(const TimeSeries& ts) {
  Table t{{"t", "u", "v", "w"}, {}};
  t.rows.reserve(ts.times.size());
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    const BlochVector& s = ts.states[i];
    t.rows.push_back({ts.times[i], s.u, s.v, s.w});
  }
  return t;
}

inline TimeSeries evolve(const RunSpec& spec) {
  return time_series(spec.params, spec.t_min, spec.t_max, spec.n_points, spec.policy);
}

inline TimeSeries resonant_series(const RunSpec& spec) {
  const resonant::ResonantSolution sol(spec.params);
  TimeSeries ts;
  ts.times = uniform_grid(spec.t_min, spec.t_max, spec.n_points);
  for (double t : ts.times) {
    const auto s = sol.state(t);
    ts.states.push_back({s.u_r, s.v_r, s.w_r});
  }
  return ts;
}

inline std::vector<Cell> inversion_row(const InversionReport& r) {
  return {r.w_inf, r.probability, r.est_error, std::string(to_string(r.route))};
}

inline Table inversion_table(const RunSpec& spec) {
  Table t{{"w_inf", "p", "est_error", "route"}, {}};
  t.rows.push_back(inversion_row(final_inversion(spec.params, spec.policy)));
  return t;
}

/// w(+inf) over the grid; rows in lexicographic order of the axis indices
/// (first axis slowest).
inline Table sweep_table(const RunSpec& spec) {
  Table t{{"gamma", "delta", "omega", "w_inf", "p", "est_error", "route"}, {}};
  const std::vector<double> v0 = spec.grid[0].values();
  const std::vector<double> v1 = spec.grid.size() > 1 ? spec.grid[1].values() : std::vector<double>{0.0};
  for (double a : v0) {
    for (double b : v1) {
      std::map<std::string, double> red{{"gamma", spec.gamma}, {"delta", spec.delta}, {"omega", spec.omega}};
      red[spec.grid[0].name] = a;
      if (spec.grid.size() > 1) red[spec.grid[1].name] = b;
      const ModelParams p = ModelParams::from_reduced(red["gamma"], red["delta"], red["omega"]);
      std::vector<Cell> row{red["gamma"], red["delta"], red["omega"]};
      const auto inv = inversion_row(final_inversion(p, spec.policy));
      row.insert(row.end(), inv.begin(), inv.end());
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

inline CompareReport compare(const RunSpec& spec) {
  CompareReport rep;
  rep.tolerance = spec.tolerance;
  rep.times = uniform_grid(spec.t_min, spec.t_max, spec.n_points);
  const Solution sol(spec.params, spec.policy);
  const oracle::Trajectory tr = oracle::integrate_bloch(spec.params, spec.oracle, rep.times);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double a = sol.w(rep.times[i]);
    const double o = tr.states[i].w;
    const double d = std::abs(a - o);
    rep.analytic.push_back(a);
    rep.oracle.push_back(o);
    rep.abs_diff.push_back(d);
    rep.sup_norm = std::max(rep.sup_norm, d);
  }
  rep.pass = rep.sup_norm <= rep.tolerance;
  return rep;
}

inline Table compare_table(const CompareReport& rep) {
  Table t{{"t", "analytic", "oracle", "abs_diff"}, {}};
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    t.rows.push_back({rep.times[i], rep.analytic[i], rep.oracle[i], rep.abs_diff[i]});
  return t;
}

inline std::string compare_json(const CompareReport& rep) {
  std::ostringstream os;
  os << "{\n  \"points\": ";
  detail::write_records_json(os, compare_table(rep), "  ");
  os << ",\n  \"sup_norm\": " << format_number(rep.sup_norm)
     << ",\n  \"tolerance\": " << format_number(rep.tolerance)
     << ",\n  \"pass\": " << (rep.pass ? "true" : "false") << "\n}\n";
  return os.str();
}

/// Runs one command. Data goes to the output file (or `out` for "-");
/// banners and summaries go to `diag`. Returns the process exit code.
inline int run(const RunSpec& spec, std::ostream& out, std::ostream& diag) {
  spec.validate();
  auto emit = [&](const Table& t) {
    write_output(spec.output, spec.format == Format::csv ? to_csv(t) : to_json(t), out);
  };
  switch (spec.command) {
    case Command::evolve:
      emit(bloch_table(evolve(spec)));
      return exit_ok;
    case Command::resonant:
      emit(bloch_table(resonant_series(spec)));
      return exit_ok;
    case Command::inversion: {
      const Table t = inversion_table(spec);
      diag << "route: " << std::get<std::string>(t.rows[0][3]) << '\n';
      emit(t);
      return exit_ok;
    }
    case Command::sweep:
      emit(sweep_table(spec));
      return exit_ok;
    case Command::compare: {
      const CompareReport rep = compare(spec);
      write_output(spec.output, spec.format == Format::csv ? to_csv(compare_table(rep)) : compare_json(rep),
                   out);
      diag << "sup_norm " << format_number(rep.sup_norm) << " tolerance "
           << format_number(rep.tolerance) << (rep.pass ? " PASS" : " FAIL") << '\n';
      return rep.pass ? exit_ok : exit_compare_failed;
    }
  }
  return exit_usage;
}

// ---------------------------------------------------------------- parsing

struct ParseResult {
  std::optional<RunSpec> spec;  // empty when --help was handled
  int exit_code = exit_ok;
};

inline ParseResult parse_args(int argc, const char* const* argv, std::ostream& out,
                              std::ostream& diag) {
  CLI::App app{"Analytic and reference solutions of the Demkov model with dephasing", "demkov"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  std::map<std::string, Command> commands{{"evolve", Command::evolve},
                                          {"inversion", Command::inversion},
                                          {"sweep", Command::sweep},
                                          {"compare", Command::compare},
                                          {"resonant", Command::resonant}};
  const std::map<Command, std::string> help{
      {Command::evolve, "Bloch vector (t,u,v,w) on a uniform time grid"},
      {Command::inversion, "final inversion w(+inf) and transition probability"},
      {Command::sweep, "w(+inf) over a one- or two-parameter grid"},
      {Command::compare, "analytic w(t) against direct numerical integration"},
      {Command::resonant, "Bloch vector at zero detuning from the Bessel solution"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : commands) {
    subs[name] = app.add_subcommand(name, help.at(cmd));
    subs[name]->fallthrough();
  }

  RunSpec spec;
  spec.policy = PrecisionPolicy::from_environment();
  double gamma = 0.0, delta = 0.0, omega = 0.0;
  double detuning = 0.0, rabi = 0.0, width = 1.0, dephasing = 0.0;
  std::string sweep_text[3];
  std::string format = "csv";
  std::optional<int> precision_digits;
  double oracle_window = spec.oracle.t_end_factor;

  auto* g = app.add_option("--gamma", gamma, "reduced dephasing T Gamma / 2");
  auto* d = app.add_option("--delta", delta, "reduced detuning T Delta / 2");
  auto* o = app.add_option("--omega", omega, "reduced peak Rabi frequency T Omega0 / 2");
  auto* pd = app.add_option("--detuning", detuning, "detuning Delta");
  auto* pr = app.add_option("--rabi", rabi, "peak Rabi frequency Omega0");
  auto* pw = app.add_option("--width", width, "pulse width T");
  auto* pg = app.add_option("--dephasing", dephasing, "dephasing rate Gamma");
  app.add_option("--sweep-gamma", sweep_text[0], "min:max:count[:log]");
  app.add_option("--sweep-delta", sweep_text[1], "min:max:count[:log]");
  app.add_option("--sweep-omega", sweep_text[2], "min:max:count[:log]");
  app.add_option("--t-min", spec.t_min, "first sample time");
  app.add_option("--t-max", spec.t_max, "last sample time");
  app.add_option("--n", spec.n_points, "number of samples");
  app.add_option("--output,-o", spec.output, "output path, '-' for stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--precision-digits", precision_digits, "floor on working precision (decimal digits)");
  app.add_option("--target-rel-error", spec.policy.target_rel_error, "special-function accuracy target");
  app.add_option("--z-switch", spec.policy.z_switch, "|z| above which the asymptotic form is used");
  app.add_option("--oracle-rel-tol", spec.oracle.rel_tol, "integrator relative tolerance");
  app.add_option("--oracle-abs-tol", spec.oracle.abs_tol, "integrator absolute tolerance");
  app.add_option("--oracle-window", oracle_window, "integrate over [-k T, k T]");
  app.add_option("--oracle-max-steps", spec.oracle.max_steps, "integrator step budget");
  app.add_option("--tolerance", spec.tolerance, "compare: sup-norm tolerance");

  for (auto* r : {g, d, o})
    for (auto* p : {pd, pr, pw, pg}) r->excludes(p);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return {std::nullopt, exit_ok};
  } catch (const CLI::ParseError& e) {
    diag << "error: " << e.what() << '\n';
    return {std::nullopt, exit_usage};
  }

  for (const auto& [name, sub] : subs)
    if (sub->parsed()) spec.command = commands.at(name);
  spec.reduced = !(pd->count() || pr->count() || pw->count() || pg->count());
  if (spec.reduced) {
    spec.gamma = gamma;
    spec.delta = delta;
    spec.omega = omega;
    spec.params = ModelParams::from_reduced(gamma, delta, omega);
  } else {
    spec.params = {detuning, rabi, width, dephasing};
  }
  const char* names[3] = {"gamma", "delta", "omega"};
  try {
    for (int i = 0; i < 3; ++i)
      if (!sweep_text[i].empty()) spec.grid.push_back(GridAxis::parse(names[i], sweep_text[i]));
  } catch (const UsageError& e) {
    diag << "error: " << e.what() << '\n';
    return {std::nullopt, exit_usage};
  }
  spec.format = format == "json" ? Format::json : Format::csv;
  if (precision_digits) spec.policy.min_digits = *precision_digits;
  spec.oracle.t_start_factor = spec.oracle.t_end_factor = oracle_window;
  return {spec, exit_ok};
}

/// Full program: parse, run, map failures onto exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& diag = std::cerr) {
  try {
    ParseResult parsed = parse_args(argc, argv, out, diag);
    if (!parsed.spec) return parsed.exit_code;
    return run(*parsed.spec, out, diag);
  } catch (const UsageError& e) {
    diag << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    diag << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::domain ? exit_usage : exit_numerical;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace demkov::cli
