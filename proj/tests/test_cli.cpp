#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "okstab/error.hpp"
#include "okstab/io/csv.hpp"
#include "okstab/io/json_out.hpp"
#include "okstab/io/scenario.hpp"
#include "okstab/io/svg.hpp"

using namespace okstab;
using namespace okstab::io;
namespace fs = std::filesystem;

namespace {

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

// Tag nesting, attribute quoting and entity references of an XML document.
bool well_formed_xml(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < doc.size()) {
    if (doc[i] == '&') {
      const std::size_t semi = doc.find(';', i);
      if (semi == std::string::npos) return false;
      const std::string ent = doc.substr(i + 1, semi - i - 1);
      if (ent != "amp" && ent != "lt" && ent != "gt" && ent != "quot" && ent != "apos" && ent.rfind('#', 0) != 0)
        return false;
      i = semi + 1;
      continue;
    }
    if (doc[i] != '<') {
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(doc[i]))) return false;
      ++i;
      continue;
    }
    if (doc.compare(i, 4, "<!--") == 0) {
      const std::size_t end = doc.find("-->", i);
      if (end == std::string::npos) return false;
      i = end + 3;
      continue;
    }
    if (doc.compare(i, 2, "<?") == 0) {
      const std::size_t end = doc.find("?>", i);
      if (end == std::string::npos) return false;
      i = end + 2;
      continue;
    }
    std::size_t j = i + 1;
    char quote = 0;
    while (j < doc.size() && (quote || doc[j] != '>')) {
      if (quote) {
        if (doc[j] == quote) quote = 0;
        else if (doc[j] == '<') return false;
      } else if (doc[j] == '"' || doc[j] == '\'') {
        quote = doc[j];
      }
      ++j;
    }
    if (j >= doc.size()) return false;
    std::string tag = doc.substr(i + 1, j - i - 1);
    i = j + 1;
    if (!tag.empty() && tag[0] == '/') {
      const std::string name = tag.substr(1, tag.find_first_of(" \t\n") - 1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = !tag.empty() && tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (name.empty()) return false;
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return root_seen && stack.empty();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OKSTAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("okstab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* small_scenario = R"({
  "domain": {"kind": "rectangle", "lx": 1.0, "ly": 1.0, "nx": 64, "ny": 64},
  "configuration": {"type": "lamella", "a": 0.5, "nodes": 33},
  "gamma": 1.0,
  "seed": 11,
  "probe": {"samples": 50, "lambda_samples": 20},
  "flow": {"steps": 200, "snapshot_every": 50},
  "gammastar": {"grid": 64, "nodes": 33},
  "diffuse": {"epsilon": 0.05, "steps": 300, "log_every": 10}
})";

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario(small_scenario);
  CHECK(s.domain.nx == 64);
  CHECK(s.configuration.kind == ConfigurationSpec::Kind::lamella);
  CHECK(s.configuration.nodes == 33);
  CHECK(s.seed == 11);
  CHECK(s.probe.samples == 50);
  CHECK(s.diffuse.epsilon == 0.05);
  CHECK(s.gammastar.tol == 1e-6);
  CHECK(build_interface(s).size() == 33);

  const std::string typo = "{\n  \"gamma\": 1,\n  \"seed\": 2,\n  \"gama\": 3\n}";
  const std::string e = error_of([&] { parse_scenario(typo); });
  CHECK(e.find("\"gama\"") != std::string::npos);
  CHECK(e.find("line 4") != std::string::npos);
  CHECK(e.find("unknown key") != std::string::npos);

  CHECK(error_of([] { parse_scenario(R"({"gamma": "one"})"); }).find("\"gamma\"") != std::string::npos);
  CHECK(error_of([] { parse_scenario(R"({"domain": {"kind": "sphere"}})"); }).find("domain.kind") != std::string::npos);
  CHECK(error_of([] { parse_scenario(R"({"flow": {"stepz": 3}})"); }).find("flow.stepz") != std::string::npos);
  CHECK(error_of([] { parse_scenario("{"); }).find("not valid JSON") != std::string::npos);
  CHECK(error_of([] { parse_scenario(R"({"gamma": -1})"); }).find("non-negative") != std::string::npos);

  const Scenario circle = parse_scenario(
      R"({"domain": {"kind": "torus"}, "configuration": {"type": "circle", "center": [0.4, 0.5], "radius": 0.2, "nodes": 40}})");
  CHECK(circle.domain.kind == DomainKind::torus);
  CHECK(build_interface(circle).topology() == Topology::loop);
}

TEST_CASE("command-line overrides") {
  Scenario s = parse_scenario(R"({"domain": {"lx": 2.0, "ly": 1.0, "nx": 64, "ny": 32}, "seed": 4})");
  Overrides o;
  o.grid = 128;
  o.nodes = 21;
  o.seed = 99;
  o.out = "elsewhere";
  apply_overrides(s, o);
  CHECK(s.domain.nx == 128);
  CHECK(s.domain.ny == 64);
  CHECK(s.configuration.nodes == 21);
  CHECK(s.seed == 99);
  CHECK(s.output == "elsewhere");
  CHECK(s.gammastar.grid == 128);
}

TEST_CASE("number formatting and JSON output") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(NAN) == "null");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  Json j;
  j["b"] = 2.5;
  j["a"] = Json::array({1, 0.1});
  const std::string text = dump_json(j);
  CHECK(text.find("\"b\"") < text.find("\"a\""));
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(Json::parse(text)["b"] == 2.5);
}

TEST_CASE("CSV and SVG writers") {
  const fs::path dir = scratch_dir("writers");
  write_csv(dir / "t.csv", {"x", "y"}, {{1.0, 0.5}, {2.0, 0.25}});
  CHECK(slurp(dir / "t.csv") == "x,y\n1,0.5\n2,0.25\n");

  const DomainSpec d = DomainSpec::rectangle(1, 1, 32, 32);
  const Interface l = make_lamella(d, 0.3, 17);
  write_interface_csv(dir / "i.csv", l, {{"extra", std::vector<double>(17, 1.0)}});
  CHECK(first_line(dir / "i.csv") == "index,s,x,y,nu_x,nu_y,curvature,extra");
  write_field_csv(dir / "f.csv", ScalarField(Grid(d), 1.0));
  CHECK(first_line(dir / "f.csv") == "i,j,x,y,value");

  CHECK(well_formed_xml(svg_interface(l, d)));
  CHECK(well_formed_xml(svg_snapshots({l, make_lamella(d, 0.4, 17)}, d)));
  CHECK(well_formed_xml(svg_heatmap(ScalarField(Grid(d), 0.5), "a < b & c")));
  CHECK(well_formed_xml(svg_mode_overlay(l, d, std::vector<double>(17, 0.1))));
  CHECK(well_formed_xml(svg_plot({"t", "x", "y", true, true}, {{"s", {1, 10, 100}, {1, 2, 3}, true}})));
  CHECK_FALSE(well_formed_xml("<svg><g></svg>"));
}

TEST_CASE("every command runs end to end") {
  const fs::path dir = scratch_dir("commands");
  const fs::path scenario = dir / "small.json";
  std::ofstream(scenario) << small_scenario;
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"energy", {"interface.csv", "field_u.csv", "field_v.csv"}},
      {"critic", {"residual.csv"}},
      {"stability", {"mode.csv"}},
      {"dispersion", {"dispersion.csv"}},
      {"probe", {"probe.csv", "lambda.csv"}},
      {"flow", {"flow.csv", "final_interface.csv"}},
      {"gammastar", {"mu_min.csv"}},
      {"diffuse", {"diffuse_log.csv", "field_u.csv"}},
  };
  for (const auto& [cmd, csvs] : commands) {
    CAPTURE(cmd);
    const fs::path out = dir / cmd;
    REQUIRE(run_cli(cmd + " --scenario " + scenario.string() + " --out " + out.string()) == 0);
    const Json report = Json::parse(slurp(out / "report.json"));
    CHECK(report["command"] == cmd);
    CHECK(report["exit_status"] == 0);
    CHECK(fs::exists(out / "meta.json"));
    for (const std::string& c : csvs) CHECK(first_line(out / c).find(',') != std::string::npos);
    for (const auto& entry : fs::directory_iterator(out)) {
      if (entry.path().extension() == ".svg") {
        CAPTURE(entry.path().string());
        CHECK(well_formed_xml(slurp(entry.path())));
      }
    }
  }
  CHECK(first_line(dir / "probe" / "probe.csv") == "amplitude,symmetric_difference,delta_j,perimeter_drop,rejections");
  CHECK(first_line(dir / "flow" / "flow.csv") == "step,t,dt,J,residual_sup,area,ortho_max,halvings");
  CHECK(first_line(dir / "diffuse" / "diffuse_log.csv") == "step,t,dt,energy,mass,halvings");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir("exit");
  const std::string scen = OKSTAB_SCENARIO_DIR;
  CHECK(run_cli("stability --scenario " + scen + "/lamella_stable.json --grid 64 --nodes 33 --out " +
                (dir / "s").string()) == 0);
  CHECK(Json::parse(slurp(dir / "s" / "report.json"))["result"]["verdict"] == "stable");
  CHECK(run_cli("stability --scenario " + scen + "/lamella_unstable.json --grid 64 --nodes 33 --out " +
                (dir / "u").string()) == 2);
  CHECK(Json::parse(slurp(dir / "u" / "report.json"))["result"]["verdict"] == "unstable");

  std::ofstream(dir / "typo.json") << "{\n  \"gama\": 1\n}\n";
  CHECK(run_cli("stability --scenario " + (dir / "typo.json").string()) == 1);
  CHECK(run_cli("stability --scenario " + (dir / "missing.json").string()) == 1);
  CHECK(run_cli("bogus --scenario " + scen + "/lamella_stable.json") != 0);
  CHECK(run_cli("--version") == 0);
}

TEST_CASE("seeded reports are byte-identical") {
  const fs::path dir = scratch_dir("determinism");
  const std::string scen = std::string(OKSTAB_SCENARIO_DIR) + "/lamella_stable.json";
  for (const char* run : {"a", "b"})
    REQUIRE(run_cli("probe --scenario " + scen + " --grid 64 --nodes 33 --out " + (dir / run).string()) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "probe.csv") == slurp(dir / "b" / "probe.csv"));
}
