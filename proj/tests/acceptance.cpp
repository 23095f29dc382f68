// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jetvar/jetvar.hpp"

namespace fs = std::filesystem;
using namespace jetvar;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string model_path(const std::string& name) { return std::string(JETVAR_MODELS_DIR) + "/" + name; }

std::vector<std::pair<std::string, Model>> corpus() {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(JETVAR_MODELS_DIR)) paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, Model>> out;
  for (const auto& p : paths) out.emplace_back(p.filename().string(), parse_model(slurp(p)));
  return out;
}

EquationSystem deviation_of(const Model& m) {
  switch (m.kind) {
    case ModelKind::lagrangian: return deviation_system(euler_lagrange(m.lagrangian()));
    case ModelKind::hamiltonian: return deviation_system(as_operator(hamilton_equations(m.hamiltonian())));
    case ModelKind::equation: break;
  }
  return deviation_system(m.differential_operator());
}

struct InitialData {
  Point base;
  Point jacobi;
  double t1 = 2.0;
};

// Generic (non-symmetric) data for every ODE model in the corpus.
const std::map<std::string, InitialData>& ode_data() {
  static const std::map<std::string, InitialData> data = {
      {"beam.eqn",
       {{{"y", 0.2}, {"y_t", -0.1}, {"y_tt", 0.3}, {"y_ttt", 0.1}},
        {{"v_y", 0.5}, {"v_y_t", 0.2}, {"v_y_tt", -0.4}, {"v_y_ttt", 0.3}}}},
      {"coupled.eqn",
       {{{"x", 1.0}, {"x_t", 0.0}, {"y", -0.3}, {"y_t", 0.4}},
        {{"v_x", 0.2}, {"v_x_t", 1.0}, {"v_y", -0.5}, {"v_y_t", 0.1}}}},
      {"cubic.eqn", {{{"y", 0.1}, {"y_t", 1.0}}, {{"v_y", 0.5}, {"v_y_t", 0.3}}, 0.5}},
      {"decay.eqn", {{{"y", 1.0}}, {{"v_y", 0.4}}}},
      {"double_pendulum.eqn",
       {{{"a", 0.6}, {"a_t", 0.0}, {"b", -0.4}, {"b_t", 0.3}},
        {{"v_a", 0.3}, {"v_a_t", -0.2}, {"v_b", 0.5}, {"v_b_t", 0.4}}}},
      {"duffing.eqn", {{{"y", 1.2}, {"y_t", 0.0}}, {{"v_y", 0.3}, {"v_y_t", 1.0}}}},
      {"free_particle.eqn",
       {{{"x", 0.0}, {"x_t", 1.0}, {"y", 1.0}, {"y_t", -0.5}},
        {{"v_x", 0.3}, {"v_x_t", 0.2}, {"v_y", -0.1}, {"v_y_t", 0.7}}}},
      {"hamilton_linear.eqn", {{{"q", 0.5}, {"pt_q", 1.0}}, {{"v_q", 0.3}, {"vpt_q", -0.2}}}},
      {"hamilton_oscillator.eqn", {{{"q", 1.0}, {"pt_q", 0.0}}, {{"v_q", 0.2}, {"vpt_q", 1.0}}}},
      {"hamilton_pendulum.eqn", {{{"q", 1.0}, {"pt_q", 0.2}}, {{"v_q", 0.4}, {"vpt_q", 1.0}}}},
      {"hamilton_quartic.eqn", {{{"q", 0.8}, {"pt_q", 0.1}}, {{"v_q", 0.5}, {"vpt_q", 0.6}}}},
      {"hamilton_two.eqn",
       {{{"q", 0.7}, {"pt_q", 0.0}, {"r", 0.3}, {"pt_r", 0.5}},
        {{"v_q", 0.2}, {"vpt_q", 0.4}, {"v_r", -0.3}, {"vpt_r", 0.1}}}},
      {"kepler.eqn",
       {{{"r", 1.0}, {"r_t", 0.1}, {"phi", 0.0}, {"phi_t", 1.1}},
        {{"v_r", 0.2}, {"v_r_t", -0.1}, {"v_phi", 0.3}, {"v_phi_t", 0.2}}}},
      {"linear_system.eqn", {{{"x", 1.0}, {"w", 0.0}}, {{"v_x", 0.3}, {"v_w", 1.0}}}},
      {"logistic.eqn", {{{"y", 0.2}}, {{"v_y", 0.5}}}},
      {"oscillator.eqn", {{{"y", 1.0}, {"y_t", 0.0}}, {{"v_y", 0.3}, {"v_y_t", 1.0}}}},
      {"pendulum.eqn", {{{"y", 1.0}, {"y_t", 0.0}}, {{"v_y", 0.3}, {"v_y_t", 1.0}}}},
      {"riccati.eqn", {{{"y", 0.5}}, {{"v_y", 1.0}}, 1.0}},
      {"sphere.eqn",
       {{{"theta", 1.2}, {"theta_t", 0.3}, {"phi", 0.0}, {"phi_t", 0.8}},
        {{"v_theta", 0.2}, {"v_theta_t", 1.0}, {"v_phi", -0.3}, {"v_phi_t", 0.4}}}},
      {"vanderpol.eqn", {{{"y", 1.0}, {"y_t", 0.5}}, {{"v_y", 0.4}, {"v_y_t", -0.2}}}},
  };
  return data;
}

JacobiProblem problem_for(const std::string& name, const Model& m, double dt = 1e-3) {
  const auto& d = ode_data().at(name);
  return {deviation_of(m), d.base, d.jacobi, 0.0, d.t1, dt};
}

struct Result {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Result criterion1() {
  const auto start = Clock::now();
  int count = 0, multi_field = 0, two_dim = 0;
  Result r;
  for (const auto& [name, m] : corpus()) {
    if (m.kind != ModelKind::lagrangian) continue;
    ++count;
    multi_field += m.spec.fibre().size() > 1;
    two_dim += m.spec.dimension() > 1;
    const auto report = check_el_vertical_commute(m.lagrangian());
    if (!report.passed()) {
      r.pass = false;
      r.detail += " failed:" + name;
    }
  }
  const double t = seconds_since(start);
  r.pass = r.pass && count >= 10 && multi_field > 0 && two_dim > 0 && t < 5.0;
  r.detail = std::to_string(count) + " Lagrangians (" + std::to_string(multi_field) + " multi-field, " +
             std::to_string(two_dim) + " two-dimensional base), " + fmt("%.3f s", t) + r.detail;
  return r;
}

Result criterion2() {
  const auto start = Clock::now();
  int count = 0;
  Result r;
  for (const auto& [name, m] : corpus()) {
    if (m.kind != ModelKind::hamiltonian) continue;
    ++count;
    if (!check_hamilton_deviation_commute(m.hamiltonian()).passed()) {
      r.pass = false;
      r.detail += " failed:" + name;
    }
  }
  const double t = seconds_since(start);
  r.pass = r.pass && count >= 4 && t < 2.0;
  r.detail = std::to_string(count) + " Hamiltonians, " + fmt("%.3f s", t) + r.detail;
  return r;
}

Result criterion3() {
  const std::array<double, 3> eps{1e-2, 1e-3, 1e-4};
  constexpr double floor = 1e-9;
  Result r;
  int models = 0, measured = 0;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [name, m] : corpus()) {
    if (m.spec.dimension() != 1) continue;
    ++models;
    const JacobiProblem problem = problem_for(name, m);
    const Trajectory psi = solve_jacobi(problem).jacobi;
    std::array<double, 3> dist{};
    for (std::size_t i = 0; i < eps.size(); ++i) dist[i] = max_distance(psi, finite_difference_jacobi(problem, eps[i]));
    for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
      if (dist[i + 1] <= floor) continue;
      const double order = std::log10(dist[i] / dist[i + 1]);
      ++measured;
      lo = std::min(lo, order);
      hi = std::max(hi, order);
      if (order < 0.8 || order > 1.2) {
        r.pass = false;
        r.detail += " " + name + fmt("=%.3f", order);
      }
    }
  }
  r.pass = r.pass && models >= 10;
  r.detail = std::to_string(models) + " ODE models, " + std::to_string(measured) + " slopes above floor in [" +
             fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]" + r.detail;
  return r;
}

Result criterion4() {
  const std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
  Result r;
  std::string details;
  for (const auto* name : {"pendulum.eqn", "riccati.eqn"}) {
    const Model m = parse_model(slurp(model_path(name)));
    const double p = perturbation_residual(problem_for(name, m), eps).exponent;
    r.pass = r.pass && p >= 1.9 && p <= 2.1;
    details += std::string(name) + fmt(" exponent %.4f; ", p);
  }
  double worst = 0;
  for (const auto* name : {"oscillator.eqn", "decay.eqn", "linear_system.eqn", "coupled.eqn", "free_particle.eqn",
                           "hamilton_oscillator.eqn", "hamilton_linear.eqn"}) {
    const Model m = parse_model(slurp(model_path(name)));
    for (const auto& row : perturbation_residual(problem_for(name, m), eps).rows) worst = std::max(worst, row.residual);
  }
  r.pass = r.pass && worst < 1e-8;
  r.detail = details + fmt("linear models max residual %.2e", worst);
  return r;
}

Result criterion5() {
  const auto start = Clock::now();
  const Model m = parse_model(slurp(model_path("sphere.eqn")));
  const EquationSystem sys = deviation_of(m);
  const BundleSpec& vs = sys.spec;
  const Expr half_pi = Expr(Rational(1, 2)) * Expr::pi();
  const std::map<std::string, Expr> geodesic{{"theta", half_pi},      {"theta_t", Expr(0L)}, {"theta_tt", Expr(0L)},
                                             {"phi", vs.base_symbol(0)}, {"phi_t", Expr(1L)},  {"phi_tt", Expr(0L)}};
  const Expr along = substitute(sys.equations[sys.block_size()], geodesic);
  // the Euler-Lagrange operator carries an overall minus sign
  const Expr jacobi = Expr(vs.require("v_theta_tt")) + Expr(vs.require("v_theta"));
  const auto verdict = equivalent(Expr(-1L) * along, jacobi);

  const JacobiProblem problem{sys,
                              {{"theta", M_PI / 2}, {"theta_t", 0}, {"phi", 0}, {"phi_t", 1}},
                              {{"v_theta", 0}, {"v_theta_t", 1}, {"v_phi", 0}, {"v_phi_t", 0}},
                              0.0,
                              M_PI,
                              1e-3};
  const JacobiSolution sol = solve_jacobi(problem);
  double worst = 0;
  for (std::size_t k = 0; k < sol.jacobi.size(); ++k) {
    worst = std::max(worst, std::abs(sol.jacobi.value(k, "v_theta") - std::sin(sol.jacobi.times[k])));
  }
  const double t = seconds_since(start);
  const double oracle = max_distance(sol.jacobi, finite_difference_jacobi(problem, 1e-5));
  Result r;
  r.pass = verdict.verdict == Verdict::equal && worst < 1e-6 && t < 1.0;
  r.detail = "Jacobi equation along equator: " + to_string(normalize(along)) + " (" +
             std::string(to_string(verdict.verdict)) + ", " + (verdict.symbolic ? "symbolic" : "numeric") +
             "); max |v_theta - sin t| = " + fmt("%.2e", worst) + ", FD oracle distance " + fmt("%.2e", oracle) +
             ", " + fmt("%.3f s", t);
  return r;
}

Result criterion6() {
  const BundleSpec spec({"t"}, {"y", "z"}, {}, 4);
  std::vector<Expr> leaves;
  for (const auto* n : {"t", "y", "z", "y_t", "z_t"}) leaves.push_back(Expr(spec.require(n)));
  std::mt19937_64 rng(20261017);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::function<Expr(int)> gen = [&](int depth) -> Expr {
    if (depth == 0 || pick(4) == 0) return pick(4) == 0 ? Expr(static_cast<long>(pick(5)) - 2) : leaves[pick(5)];
    switch (pick(6)) {
      case 0: return gen(depth - 1) + gen(depth - 1);
      case 1:
      case 2: return gen(depth - 1) * gen(depth - 1);
      case 3: return pow(gen(depth - 1), 2);
      case 4: return sin(gen(depth - 1));
      default: return exp(Expr(Rational(1, 3)) * gen(depth - 1));
    }
  };
  Result r;
  int symbolic = 0;
  for (int i = 0; i < 20; ++i) {
    const Expr f = gen(4);
    const Lagrangian L = make_lagrangian(total_derivative(f, std::size_t{0}, spec), spec);
    for (const auto& c : euler_lagrange(L).components) {
      const auto v = equivalent(c, Expr(0L));
      symbolic += v.symbolic;
      if (v.verdict != Verdict::equal) {
        r.pass = false;
        r.detail += " f=" + to_string(f);
      }
    }
  }
  r.detail = "20 random f of order <= 1 on two fields, " + std::to_string(symbolic) + "/40 components zero symbolically" +
             r.detail;
  return r;
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return out + "\n<status " + std::to_string(status) + ">";
}

Result criterion7() {
  const std::string cli = JETVAR_CLI;
  const std::vector<std::string> commands = {
      "derive " + model_path("sphere.eqn"),
      "derive " + model_path("hamilton_field.eqn") + " --format json",
      "deviate " + model_path("riccati.eqn") + " --format latex",
      "deviate " + model_path("double_pendulum.eqn") + " --format json",
      "check " + model_path("pendulum.eqn") + " --seed 7",
      "check " + model_path("kepler.eqn") + " --seed 7 --format json",
      "check " + model_path("hamilton_two.eqn") + " --seed 11",
      "check " + model_path("heat.eqn") + " --seed 3",
      "simulate " + model_path("sphere.eqn") +
          " --init theta=pi/2,theta_t=0,phi=0,phi_t=1 --jacobi-init v_theta=0,v_theta_t=1,v_phi=0,v_phi_t=0 --t1 pi",
      "residual " + model_path("pendulum.eqn") + " --init y=1,y_t=0 --jacobi-init v_y=0.3,v_y_t=1 --t1 5",
      "residual " + model_path("riccati.eqn") + " --init y=0.5 --jacobi-init v_y=1 --format json",
      "simulate " + model_path("riccati.eqn") + " --init y=1 --jacobi-init v_y=1 --t1 2",
  };
  Result r;
  std::size_t bytes = 0;
  for (const auto& c : commands) {
    const std::string a = capture(cli + " " + c + " 2>&1");
    const std::string b = capture(cli + " " + c + " 2>&1");
    bytes += a.size();
    if (a != b) {
      r.pass = false;
      r.detail += " differs: " + c;
    }
  }
  r.detail = std::to_string(commands.size()) + " commands run twice, " + std::to_string(bytes) + " bytes compared" +
             r.detail;
  return r;
}

Result criterion8() {
  const Model m = parse_model(slurp(model_path("oscillator.eqn")));
  const FirstOrderSystem f = compile(EquationSystem{euler_lagrange(m.lagrangian()).components, m.spec});
  auto error = [&](double dt) {
    const Trajectory traj = integrate(f, {1.0, 0.0}, 0.0, 10.0, dt);
    return std::abs(traj.value(traj.size() - 1, "y") - std::cos(10.0));
  };
  const double e1 = error(0.1), e2 = error(0.05), e3 = error(0.025);
  const double r1 = e1 / e2, r2 = e2 / e3;
  Result r;
  r.pass = r1 >= 12 && r1 <= 20 && r2 >= 12 && r2 <= 20;
  r.detail = "endpoint error at t=10: dt=0.1 " + fmt("%.3e", e1) + ", 0.05 " + fmt("%.3e", e2) + ", 0.025 " +
             fmt("%.3e", e3) + "; ratios " + fmt("%.2f", r1) + ", " + fmt("%.2f", r2);
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"Lagrangian commutation theorem on the corpus", criterion1},
      {"Hamiltonian commutation theorem on the corpus", criterion2},
      {"finite-difference oracle converges linearly", criterion3},
      {"residual is O(eps^2), linear models at floor", criterion4},
      {"geodesic deviation on the unit sphere", criterion5},
      {"null Lagrangians", criterion6},
      {"CLI determinism", criterion7},
      {"RK4 fourth-order convergence", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
              << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
