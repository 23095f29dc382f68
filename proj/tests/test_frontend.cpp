#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace jetvar {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string model_path(const std::string& name) { return std::string(JETVAR_MODELS_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "jetvar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string parse_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "no error";
}

TEST(Parser, OscillatorModel) {
  const Model m = parse_model("base t\nfibre y\nparam omega = 1\nlagrangian 0.5*(y_t^2 - omega^2*y^2)");
  EXPECT_EQ(m.kind, ModelKind::lagrangian);
  EXPECT_EQ(m.spec.base(), std::vector<std::string>{"t"});
  EXPECT_EQ(m.spec.fibre(), std::vector<std::string>{"y"});
  ASSERT_EQ(m.spec.params().size(), 1u);
  EXPECT_EQ(*m.spec.params()[0].value, Rational(1));
  EXPECT_EQ(m.spec.order(), 2);
  EXPECT_EQ(to_string(normalize(m.payload[0])), "1/2*y_t^2 - 1/2*y^2*omega^2");
}

TEST(Parser, SymbolKinds) {
  const Model m = parse_model("base t\nfibre y\nparam k\nequation y_tt + k*t*y");
  std::map<std::string, SymbolKind> kinds;
  for (const auto& s : free_symbols(m.payload[0])) kinds[s.name()] = s.kind();
  EXPECT_EQ(kinds.at("y_tt"), SymbolKind::jet);
  EXPECT_EQ(kinds.at("k"), SymbolKind::parameter);
  EXPECT_EQ(kinds.at("t"), SymbolKind::base);
  EXPECT_EQ(kinds.at("y"), SymbolKind::fibre);
}

TEST(Parser, Comments) {
  const Model m = parse_model("# header\nbase t # time\nfibre y\n\nequation y_t # first order\n");
  EXPECT_EQ(to_string(m.payload[0]), "y_t");
}

TEST(Parser, MissingBase) { EXPECT_NE(parse_error("fibre y").find("missing base declaration"), std::string::npos); }

TEST(Parser, MissingFibreAndModel) {
  EXPECT_NE(parse_error("base t\nlagrangian t").find("missing fibre declaration"), std::string::npos);
  EXPECT_NE(parse_error("base t\nfibre y").find("missing model"), std::string::npos);
}

TEST(Parser, GeneratedNameCollision) {
  const std::string msg = parse_error("base t\nfibre v_y\nequation v_y");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("v_y"), std::string::npos) << msg;
}

TEST(Parser, MultipleModelKinds) {
  EXPECT_NE(parse_error("base t\nfibre y\nequation y_t\nlagrangian y^2").find("multiple model kinds"),
            std::string::npos);
}

TEST(Parser, UnknownIdentifierHasPosition) {
  EXPECT_EQ(parse_error("base t\nfibre y\nequation y_t + q"), "line 3, column 16: unknown identifier 'q'");
}

TEST(Parser, SyntaxErrors) {
  EXPECT_NE(parse_error("base t\nfibre y\nequation y_t +").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("base t\nfibre y\nequation (y_t").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("base t\nfibre y\nequation y^y").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("base t\nfibre y\nfrobnicate y").find("line 3"), std::string::npos);
}

TEST(Parser, PowerIsRightAssociative) {
  const Model m = parse_model("base t\nfibre y\nequation y^2^3 - y^8 + y_t");
  EXPECT_EQ(to_string(normalize(m.payload[0])), "y_t");
  const Model r = parse_model("base t\nfibre y\nequation y^(1/2) - sqrt(y) + y_t");
  EXPECT_EQ(to_string(normalize(r.payload[0])), "y_t");
}

TEST(Parser, UnaryMinusBindsLooserThanPower) {
  const Model m = parse_model("base t\nfibre y\nequation -y^2 + y_t");
  EXPECT_EQ(to_string(normalize(m.payload[0])), "y_t - y^2");
}

TEST(Parser, OrderInferenceAndOverride) {
  EXPECT_EQ(parse_model("base t\nfibre y\nlagrangian y_tt^2").spec.order(), 4);
  EXPECT_EQ(parse_model("base t\nfibre y\nequation y_ttt").spec.order(), 3);
  EXPECT_EQ(parse_model("base t\nfibre y\nhamiltonian pt_y^2").spec.order(), 1);
  EXPECT_EQ(parse_model("base t\nfibre y\nequation y_t", 5).spec.order(), 5);
  EXPECT_THROW(parse_model("base t\nfibre y\nequation y_tt", 1), ParseError);
}

TEST(Parser, Constants) {
  EXPECT_DOUBLE_EQ(parse_constant("pi/2"), M_PI / 2);
  EXPECT_DOUBLE_EQ(parse_constant("-1.5e-3"), -1.5e-3);
  EXPECT_THROW(parse_constant("y"), ParseError);
}

TEST(Render, TextOfVerticalSymbols) {
  const BundleSpec v = testing::ty(2).vertical_extension();
  EXPECT_EQ(render(testing::P("v_y_tt + v_y", v), Format::text), "v_y_tt + v_y");
}

TEST(Render, Latex) {
  const BundleSpec v = BundleSpec({"t"}, {"y", "theta"}, {}, 2).vertical_extension();
  EXPECT_EQ(to_latex(testing::P("v_y_tt + v_y", v), &v), "\\dot{y}_{tt} + \\dot{y}");
  EXPECT_EQ(to_latex(testing::P("v_theta_t/2", v), &v), "\\frac{\\dot{\\theta}_{t}}{2}");
  EXPECT_EQ(to_latex(normalize(testing::P("sqrt(y)*sin(theta)", v)), &v),
            "\\sqrt{y} \\sin\\left(\\theta\\right)");
  const BundleSpec h = testing::xty(1).with_momenta().vertical_extension();
  EXPECT_EQ(to_latex(testing::P("vpt_y", h), &h), "\\dot{p}^{t}_{y}");
  EXPECT_EQ(to_latex(testing::P("px_y_x", h), &h), "p^{x}_{y,x}");
}

TEST(Render, JsonPrefixArrays) {
  const BundleSpec s = testing::ty(1);
  EXPECT_EQ(to_json(normalize(testing::P("2*y", s))).dump(), R"(["*",2,"y"])");
  EXPECT_EQ(to_json(normalize(testing::P("2*y + y_t^2", s))).dump(), R"(["+",["^","y_t",2],["*",2,"y"]])");
  EXPECT_EQ(to_json(normalize(testing::P("y/3 + pi", s))).dump(), R"(["+",["*",["/",1,3],"y"],"pi"])");
}

TEST(Render, JsonSystemDocument) {
  const Model m = parse_model("base t\nfibre y\nequation y_t - y^2");
  const auto doc = nlohmann::json::parse(render(deviation_system(m.differential_operator()), Format::json));
  EXPECT_EQ(doc["equations"].size(), 2u);
  EXPECT_EQ(doc["spec"]["base"], nlohmann::json::array({"t"}));
  EXPECT_EQ(doc["spec"]["vertical"], true);
  EXPECT_EQ(doc["structure"], "deviation-pair");
}

TEST(Render, ModelRoundTripOnCorpus) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(JETVAR_MODELS_DIR)) {
    const Model m = parse_model(slurp(entry.path()));
    const Model back = parse_model(render_model(m));
    ASSERT_EQ(back.kind, m.kind) << entry.path();
    EXPECT_EQ(back.spec.base(), m.spec.base());
    EXPECT_EQ(back.spec.fibre(), m.spec.fibre());
    EXPECT_EQ(back.spec.order(), m.spec.order());
    ASSERT_EQ(back.payload.size(), m.payload.size());
    for (std::size_t i = 0; i < m.payload.size(); ++i) {
      EXPECT_TRUE(identical(normalize(back.payload[i]), normalize(m.payload[i]))) << entry.path();
      const auto a = free_symbols(back.payload[i]);
      const auto b = free_symbols(m.payload[i]);
      ASSERT_EQ(a.size(), b.size());
      for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        EXPECT_EQ(ia->name(), ib->name());
        EXPECT_EQ(ia->kind(), ib->kind());
      }
    }
    ++count;
  }
  EXPECT_GE(count, 10);
}

TEST(Cli, CheckPendulum) {
  const auto r = cli({"check", model_path("pendulum.eqn")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "δ(VL) = V(δL): PASS (2 pairs)");
}

TEST(Cli, CheckHamiltonian) {
  const auto r = cli({"check", model_path("hamilton_oscillator.eqn"), "--format", "json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["passed"], true);
}

TEST(Cli, DeviateRiccatiLatex) {
  const auto r = cli({"deviate", model_path("riccati.eqn"), "--format", "latex"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "\\[ y_{t} - {y}^{2} = 0 \\]\n\\[ \\dot{y}_{t} - 2 y \\dot{y} = 0 \\]\n");
}

TEST(Cli, DeriveText) {
  const auto r = cli({"derive", model_path("hamilton_pendulum.eqn")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "q_t - pt_q = 0\npt_q_t + sin(q) = 0\n");
}

TEST(Cli, SimulateSphereSchema) {
  const auto r = cli({"simulate", model_path("sphere.eqn"), "--init", "theta=pi/2,theta_t=0,phi=0,phi_t=1",
                      "--jacobi-init", "v_theta=0,v_theta_t=1,v_phi=0,v_phi_t=0", "--t1", "pi", "--dt", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,theta,theta_t,phi,phi_t,v_theta,v_theta_t,v_phi,v_phi_t");
}

TEST(Cli, SimulateWritesFile) {
  const fs::path out = fs::temp_directory_path() / "jetvar_cli_test.csv";
  const auto r = cli({"simulate", model_path("oscillator.eqn"), "--init", "y=0,y_t=1", "--jacobi-init",
                      "v_y=1,v_y_t=0", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(out).substr(0, 17), "t,y,y_t,v_y,v_y_t");
  fs::remove(out);
}

TEST(Cli, ResidualSummary) {
  const auto r = cli({"residual", model_path("riccati.eqn"), "--init", "y=0.5", "--jacobi-init", "v_y=1",
                      "--eps", "0.01,0.005,0.0025"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 17), "epsilon,residual\n");
  EXPECT_NE(r.out.find("# exponent 1.99"), std::string::npos) << r.out;
}

TEST(Cli, Help) {
  const auto top = cli({"--help"});
  EXPECT_EQ(top.code, 0);
  EXPECT_NE(top.out.find("simulate"), std::string::npos);
  const auto sub = cli({"residual", "--help"});
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find("--eps"), std::string::npos);
}

TEST(Cli, ExitCodeUsage) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"check"}).code, 2);
  EXPECT_EQ(cli({"check", model_path("pendulum.eqn"), "--format", "xml"}).code, 2);
  EXPECT_EQ(cli({"check", model_path("does_not_exist.eqn")}).code, 2);
  EXPECT_EQ(cli({"simulate", model_path("oscillator.eqn"), "--init", "y=0", "--jacobi-init", "v_y=1,v_y_t=0"}).code, 2);
}

TEST(Cli, ExitCodeParseError) {
  const fs::path bad = fs::temp_directory_path() / "jetvar_bad_model.eqn";
  std::ofstream(bad) << "base t\nfibre y\nequation y_t + q\n";
  const auto r = cli({"derive", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3, column 16: unknown identifier 'q'"), std::string::npos) << r.err;
  fs::remove(bad);
}

TEST(Cli, ExitCodeNumeric) {
  // Riccati from y=1 blows up at t=1
  EXPECT_EQ(cli({"simulate", model_path("riccati.eqn"), "--init", "y=1", "--jacobi-init", "v_y=1", "--t1", "2"}).code, 3);
  // heat equation has a two-dimensional base
  EXPECT_EQ(cli({"simulate", model_path("heat.eqn"), "--init", "u=1", "--jacobi-init", "v_u=1"}).code, 3);
}

TEST(Cli, ExitCodeTheoremFailure) {
  // Every corpus theorem holds, so the failing report is built by hand.
  const BundleSpec s = testing::ty(1);
  const Expr y = testing::P("y", s);
  const Expr bad = testing::P("ln(-1 - y^2)", s);
  CommutationReport report{"δ(VL) = V(δL)", {}};
  report.pairs.push_back({"ok", y, y, equivalent(y, y)});
  EXPECT_EQ(exit_code(report), 0);
  report.pairs.push_back({"undetermined", bad, bad * 2L, equivalent(bad, bad * 2L)});
  EXPECT_EQ(exit_code(report), 1);
  report.pairs.push_back({"shifted", y, y + 1L, equivalent(y, y + 1L)});
  const std::string text = render(report, Format::text);
  EXPECT_EQ(text.substr(0, text.find('\n')), "δ(VL) = V(δL): FAIL (3 pairs)");
  EXPECT_NE(text.find("[undetermined] undetermined"), std::string::npos) << text;
  EXPECT_NE(text.find("[not-equal] shifted"), std::string::npos) << text;
  EXPECT_NE(text.find("witness: y="), std::string::npos) << text;
}

TEST(Cli, Deterministic) {
  for (const auto* name : {"pendulum.eqn", "hamilton_two.eqn", "sphere.eqn"}) {
    const std::vector<std::string> args{"check", model_path(name), "--seed", "7", "--format", "json"};
    EXPECT_EQ(cli(args).out, cli(args).out);
  }
}

}  // namespace
}  // namespace jetvar
