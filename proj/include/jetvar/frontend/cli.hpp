#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jetvar/frontend/parser.hpp"
#include "jetvar/frontend/render.hpp"
#include "jetvar/numeric/jacobi.hpp"

namespace jetvar {

enum ExitCode : int { exit_ok = 0, exit_theorem_failed = 1, exit_usage = 2, exit_numeric = 3 };

/// Exit status of `check`: any pair that is not proven equal fails the theorem.
inline int exit_code(const CommutationReport& report) { return report.passed() ? exit_ok : exit_theorem_failed; }

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "y=1,y_t=pi/2" -> {y: 1, y_t: 1.5707...}
inline Point parse_assignments(const std::string& text) {
  Point out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error("expected name=value, got '" + std::string(item) + "'");
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    const std::string name(trim(item.substr(0, eq)));
    if (name.empty()) throw Error("empty name in '" + std::string(item) + "'");
    if (out.count(name)) throw Error("'" + name + "' assigned twice");
    out[name] = parse_constant(trim(item.substr(eq + 1)));
  }
  return out;
}

inline EquationSystem derived_system(const Model& model) {
  switch (model.kind) {
    case ModelKind::lagrangian: {
      const auto op = euler_lagrange(model.lagrangian());
      return {op.components, op.spec, Structure::plain};
    }
    case ModelKind::equation: return {model.payload, model.spec, Structure::plain};
    case ModelKind::hamiltonian: return hamilton_equations(model.hamiltonian());
  }
  throw Error("unknown model kind");
}

inline EquationSystem deviation_of(const Model& model) {
  return deviation_system(as_operator(derived_system(model)));
}

struct Options {
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  std::optional<int> order;
  std::string file;
  std::string init;
  std::string jacobi_init;
  // Time options accept constant expressions such as pi/2.
  std::string t0 = "0";
  std::string t1 = "1";
  std::string dt = "1e-3";
  std::string out;
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
};

inline Format format_of(const std::string& s) {
  if (s == "latex") return Format::latex;
  if (s == "json") return Format::json;
  return Format::text;
}

inline JacobiProblem problem_of(const Options& o, const Model& model) {
  return {deviation_of(model), parse_assignments(o.init), parse_assignments(o.jacobi_init), parse_constant(o.t0),
          parse_constant(o.t1),       parse_constant(o.dt)};
}

/// Writes `text` to --out when given, otherwise to `out`.
inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Error("cannot write '" + o.out + "'");
  file << text;
}

inline int run_check(const Options& o, const Model& model, std::ostream& out) {
  EquivalenceOptions eq;
  if (o.seed) eq.seed = *o.seed;
  CommutationReport report;
  switch (model.kind) {
    case ModelKind::lagrangian: report = check_el_vertical_commute(model.lagrangian(), eq); break;
    case ModelKind::equation: report = check_prolongation_commute(model.differential_operator(), eq); break;
    case ModelKind::hamiltonian: report = check_hamilton_deviation_commute(model.hamiltonian(), eq); break;
  }
  out << render(report, format_of(o.format));
  return exit_code(report);
}

inline int run_simulate(const Options& o, const Model& model, std::ostream& out) {
  const JacobiSolution sol = solve_jacobi(problem_of(o, model));
  std::ostringstream csv;
  write_csv(csv, std::vector<const Trajectory*>{&sol.base, &sol.jacobi});
  emit(o, csv.str(), out);
  return exit_ok;
}

inline int run_residual(const Options& o, const Model& model, std::ostream& out) {
  const ResidualTable table = perturbation_residual(problem_of(o, model), o.eps);
  std::ostringstream csv;
  csv << "epsilon,residual\n";
  for (const auto& r : table.rows) csv << format_number(r.epsilon) << ',' << format_number(r.residual) << '\n';
  if (format_of(o.format) == Format::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) rows.push_back({{"epsilon", r.epsilon}, {"residual", r.residual}});
    nlohmann::json doc = {{"rows", rows},
                          {"exponent", std::isfinite(table.exponent) ? nlohmann::json(table.exponent) : nlohmann::json()},
                          {"norm", table.norm}};
    if (!o.out.empty()) emit(o, csv.str(), out);
    out << doc.dump(2) << '\n';
    return exit_ok;
  }
  std::ostringstream summary;
  summary << "exponent " << format_number(table.exponent) << "\nnorm " << table.norm << '\n';
  if (o.out.empty()) {
    out << csv.str();
    std::istringstream lines(summary.str());
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  } else {
    emit(o, csv.str(), out);
    out << summary.str();
  }
  return exit_ok;
}

}  // namespace detail

/// Entry point of the command-line tool. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  detail::Options o;
  CLI::App app{"Variational calculus on jet bundles: Euler-Lagrange, deviation and Jacobi fields", "jetvar"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "latex", "json"}))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for the numeric equivalence fallback");
  app.add_option("--order", o.order, "Override the inferred jet order");

  auto file_arg = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "Model file")->required();
    sub->fallthrough();
  };
  CLI::App* derive = app.add_subcommand("derive", "Emit the Euler-Lagrange or Hamilton equations");
  CLI::App* deviate = app.add_subcommand("deviate", "Emit the deviation system");
  CLI::App* check = app.add_subcommand("check", "Run the commutation theorem for the model");
  CLI::App* simulate = app.add_subcommand("simulate", "Integrate a base solution with its Jacobi field");
  CLI::App* residual = app.add_subcommand("residual", "Residual of s + eps*psi in the original equations");
  for (auto* sub : {derive, deviate, check, simulate, residual}) file_arg(sub);
  for (auto* sub : {simulate, residual}) {
    sub->add_option("--init", o.init, "Base initial data, name=value,...")->required();
    sub->add_option("--jacobi-init", o.jacobi_init, "Jacobi initial data, name=value,...")->required();
    sub->add_option("--t0", o.t0)->capture_default_str();
    sub->add_option("--t1", o.t1)->capture_default_str();
    sub->add_option("--dt", o.dt)->capture_default_str();
    sub->add_option("--out", o.out, "CSV output path");
  }
  residual->add_option("--eps", o.eps, "Perturbation sizes")->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help requests exit 0; CLI11 prints the help of the subcommand that was asked
    return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
  }

  try {
    const Model model = parse_model(detail::read_file(o.file), o.order);
    const Format format = detail::format_of(o.format);
    if (derive->parsed()) {
      out << render(detail::derived_system(model), format);
      return exit_ok;
    }
    if (deviate->parsed()) {
      out << render(detail::deviation_of(model), format);
      return exit_ok;
    }
    if (check->parsed()) return detail::run_check(o, model, out);
    if (simulate->parsed()) return detail::run_simulate(o, model, out);
    return detail::run_residual(o, model, out);
  } catch (const CompileError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const ParseError& e) {
    err << o.file << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace jetvar
