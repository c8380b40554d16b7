#include "okstab/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "okstab/error.hpp"
#include "okstab/io/json_out.hpp"

namespace okstab::io {

namespace {

// Line of the last key on `path`, found by scanning for each quoted key in
// turn. 0 when the text does not contain it.
int line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const std::string& key : path) {
    const std::size_t found = text.find("\"" + key + "\"", pos);
    if (found == std::string::npos) return 0;
    pos = found + 1;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string dotted(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& p : path) s += (s.empty() ? "" : ".") + p;
  return s;
}

class Reader {
 public:
  Reader(const Json& obj, std::vector<std::string> path, const std::string& text)
      : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    std::ostringstream msg;
    msg << "key \"" << dotted(path) << "\"";
    if (const int line = line_of(text_, path)) msg << " at line " << line;
    msg << ": " << what;
    throw Error("cli", msg.str());
  }

  std::vector<std::string> child(const std::string& key) const {
    auto p = path_;
    p.push_back(key);
    return p;
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const Json* j = find(key)) {
      if (!j->is_number()) fail(child(key), "expected a number");
      out = j->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const Json* j = find(key)) {
      if (!j->is_number_integer() && !j->is_number_unsigned()) fail(child(key), "expected an integer");
      if (j->is_number_unsigned()) {
        out = static_cast<Int>(j->get<std::uint64_t>());
      } else {
        const auto v = j->get<std::int64_t>();
        if (v < 0 && std::is_unsigned_v<Int>) fail(child(key), "expected a non-negative integer");
        out = static_cast<Int>(v);
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const Json* j = find(key)) {
      if (!j->is_boolean()) fail(child(key), "expected true or false");
      out = j->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const Json* j = find(key)) {
      if (!j->is_string()) fail(child(key), "expected a string");
      out = j->get<std::string>();
    }
  }

  Vec2 point(const Json& j, const std::vector<std::string>& path) const {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      fail(path, "expected a point [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
  }

  void point(const std::string& key, Vec2& out) {
    if (const Json* j = find(key)) out = point(*j, child(key));
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const Json* j = find(key)) {
      if (!j->is_array()) fail(child(key), "expected an array of numbers");
      out.clear();
      for (const Json& e : *j) {
        if (!e.is_number()) fail(child(key), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void integers(const std::string& key, std::vector<int>& out) {
    if (const Json* j = find(key)) {
      if (!j->is_array()) fail(child(key), "expected an array of integers");
      out.clear();
      for (const Json& e : *j) {
        if (!e.is_number_integer()) fail(child(key), "expected an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(child(key), "unknown key");
    }
  }

  const std::string& text() const { return text_; }

 private:
  const Json& obj_;
  std::vector<std::string> path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

void require(bool ok, const Reader& r, const std::vector<std::string>& path, const std::string& what) {
  if (!ok) r.fail(path, what);
}

void read_domain(Reader& r, DomainSpec& d) {
  std::string kind = "rectangle";
  r.string("kind", kind);
  if (kind == "rectangle") {
    d.kind = DomainKind::rectangle;
  } else if (kind == "torus") {
    d.kind = DomainKind::torus;
  } else {
    r.fail(r.child("kind"), "expected \"rectangle\" or \"torus\"");
  }
  r.number("lx", d.lx);
  r.number("ly", d.ly);
  r.integer("nx", d.nx);
  r.integer("ny", d.ny);
  r.number("corner_margin", d.corner_margin);
  double kappa = NAN;
  r.number("boundary_curvature", kappa);
  if (!std::isnan(kappa)) d.mock_boundary_curvature = kappa;
  r.finish();
}

void read_configuration(Reader& r, ConfigurationSpec& c) {
  std::string type = "lamella";
  r.string("type", type);
  r.integer("nodes", c.nodes);
  if (type == "lamella") {
    c.kind = ConfigurationSpec::Kind::lamella;
    r.number("a", c.a);
  } else if (type == "circle") {
    c.kind = ConfigurationSpec::Kind::circle;
    r.point("center", c.center);
    r.number("radius", c.radius);
    r.boolean("e_inside", c.e_inside);
  } else if (type == "chord") {
    c.kind = ConfigurationSpec::Kind::chord;
    r.point("from", c.from);
    r.point("to", c.to);
  } else if (type == "nodes") {
    c.kind = ConfigurationSpec::Kind::nodes;
    std::string topo = "chord";
    r.string("topology", topo);
    if (topo == "chord") {
      c.topology = Topology::chord;
    } else if (topo == "loop") {
      c.topology = Topology::loop;
    } else {
      r.fail(r.child("topology"), "expected \"chord\" or \"loop\"");
    }
    r.boolean("e_on_left", c.e_on_left);
    if (const Json* pts = r.find("points")) {
      if (!pts->is_array()) r.fail(r.child("points"), "expected an array of points");
      for (const Json& p : *pts) c.points.push_back(r.point(p, r.child("points")));
    } else {
      r.fail(r.child("points"), "required for type \"nodes\"");
    }
  } else {
    r.fail(r.child("type"), "expected \"lamella\", \"circle\", \"chord\" or \"nodes\"");
  }
  r.finish();
}

}  // namespace

const char* to_string(ConfigurationSpec::Kind k) {
  switch (k) {
    case ConfigurationSpec::Kind::lamella: return "lamella";
    case ConfigurationSpec::Kind::circle: return "circle";
    case ConfigurationSpec::Kind::chord: return "chord";
    case ConfigurationSpec::Kind::nodes: return "nodes";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error("cli", std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  Reader r(root, {}, text);
  if (const Json* j = r.find("domain")) {
    Reader sub(*j, {"domain"}, text);
    read_domain(sub, s.domain);
  }
  if (const Json* j = r.find("configuration")) {
    Reader sub(*j, {"configuration"}, text);
    read_configuration(sub, s.configuration);
  }
  r.number("gamma", s.gamma);
  r.integer("seed", s.seed);
  r.string("output", s.output);
  if (const Json* j = r.find("stability")) {
    Reader sub(*j, {"stability"}, text);
    sub.number("tol_positive", s.stability.tolerances.positive);
    sub.number("tol_critical", s.stability.tolerances.critical);
    sub.integer("fourier_rank", s.stability.fourier_rank);
    sub.finish();
  }
  if (const Json* j = r.find("dispersion")) {
    Reader sub(*j, {"dispersion"}, text);
    sub.integers("modes", s.dispersion.modes);
    for (int k : s.dispersion.modes) require(k >= 1, sub, sub.child("modes"), "modes must be positive");
    sub.finish();
  }
  if (const Json* j = r.find("probe")) {
    Reader sub(*j, {"probe"}, text);
    sub.integer("samples", s.probe.samples);
    sub.numbers("amplitudes", s.probe.amplitudes);
    sub.integer("lambda_samples", s.probe.lambda_samples);
    sub.number("critical_tolerance", s.probe.critical_tolerance);
    for (double a : s.probe.amplitudes) require(a > 0.0, sub, sub.child("amplitudes"), "amplitudes must be positive");
    sub.finish();
  }
  if (const Json* j = r.find("flow")) {
    Reader sub(*j, {"flow"}, text);
    sub.number("dt", s.flow.dt);
    sub.integer("steps", s.flow.steps);
    sub.integer("snapshot_every", s.flow.snapshot_every);
    require(s.flow.steps >= 0, sub, sub.child("steps"), "must be non-negative");
    sub.finish();
  }
  if (const Json* j = r.find("gammastar")) {
    Reader sub(*j, {"gammastar"}, text);
    sub.number("a", s.gammastar.a);
    sub.integer("k_max", s.gammastar.k_max);
    sub.number("tol", s.gammastar.tol);
    sub.number("gamma_lo", s.gammastar.gamma_lo);
    sub.number("gamma_hi", s.gammastar.gamma_hi);
    sub.integer("grid", s.gammastar.grid);
    sub.integer("nodes", s.gammastar.nodes);
    sub.finish();
  }
  if (const Json* j = r.find("diffuse")) {
    Reader sub(*j, {"diffuse"}, text);
    sub.number("epsilon", s.diffuse.epsilon);
    sub.number("gamma0", s.diffuse.gamma0);
    sub.number("dt", s.diffuse.dt);
    sub.integer("steps", s.diffuse.steps);
    sub.integer("log_every", s.diffuse.log_every);
    require(s.diffuse.epsilon > 0.0, sub, sub.child("epsilon"), "must be positive");
    sub.finish();
  }
  r.finish();
  require(s.gamma >= 0.0, r, {"gamma"}, "must be non-negative");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cli", "cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str());
}

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.out) s.output = *o.out;
  if (o.grid) {
    if (*o.grid < DomainSpec::min_cells) throw Error("cli", "--grid must be at least 16");
    s.domain.nx = *o.grid;
    s.domain.ny = std::max(DomainSpec::min_cells,
                           static_cast<int>(std::lround(*o.grid * s.domain.ly / s.domain.lx)));
    s.gammastar.grid = *o.grid;
  }
  if (o.nodes) {
    s.configuration.nodes = *o.nodes;
    s.gammastar.nodes = *o.nodes;
  }
  if (o.seed) s.seed = *o.seed;
}

Interface build_interface(const Scenario& s) {
  const ConfigurationSpec& c = s.configuration;
  switch (c.kind) {
    case ConfigurationSpec::Kind::lamella:
      return make_lamella(s.domain, c.a, c.nodes);
    case ConfigurationSpec::Kind::circle:
      return make_circle(c.center, c.radius, c.nodes, c.e_inside);
    case ConfigurationSpec::Kind::chord:
      return make_chord(s.domain, c.from, c.to, c.nodes);
    case ConfigurationSpec::Kind::nodes:
      return Interface(c.points, c.topology, c.e_on_left);
  }
  throw Error("cli", "unknown configuration");
}

}  // namespace okstab::io
