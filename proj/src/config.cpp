#include "viscoflow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace viscoflow {

const char* to_string(ModelKind m) { return m == ModelKind::Maxwell ? "maxwell" : "kbkz"; }

const char* to_string(Preset p) {
  switch (p) {
    case Preset::Uniform: return "uniform";
    case Preset::Riemann: return "riemann";
    case Preset::SmoothWave: return "smooth-wave";
    case Preset::HeatPulse: return "heat-pulse";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using Entries = std::map<std::string, std::map<std::string, std::pair<std::string, int>>>;

Entries tokenize(const std::string& text) {
  Entries out;
  std::istringstream in(text);
  std::string raw, section;
  std::set<std::string> seen;
  out[section];
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ParseError(line, "empty section name");
      if (!seen.insert(section).second) throw ParseError(line, "duplicate section [" + section + "]");
      out[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected `key = value`");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key");
    if (value.empty()) throw ParseError(line, "missing value for " + key);
    auto& sec = out[section];
    if (sec.count(key)) throw ParseError(line, "duplicate key " + key);
    sec[key] = {value, line};
  }
  return out;
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

double to_number(const std::string& name, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ValidationError(name, "expected a finite number, got '" + v + "'");
  return x;
}

long to_integer(const std::string& name, const std::string& v) {
  long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError(name, "expected an integer, got '" + v + "'");
  return x;
}

// Binds every allowed key of a section to a setter and rejects the rest.
class Binder {
 public:
  explicit Binder(const Entries& e) : entries_(e) {
    for (const auto& [sec, keys] : e)
      if (!keys.empty() && !known_sections().count(sec))
        throw ValidationError(sec, "unknown section");
  }

  void number(const std::string& sec, const std::string& key, double& target) {
    bind(sec, key, [&, sec, key](const std::string& v) { target = to_number(qualified(sec, key), v); });
  }
  void integer(const std::string& sec, const std::string& key, long& target) {
    bind(sec, key, [&, sec, key](const std::string& v) { target = to_integer(qualified(sec, key), v); });
  }
  void text(const std::string& sec, const std::string& key, const std::function<void(const std::string&)>& f) {
    bind(sec, key, f);
  }

  void finish() const {
    for (const auto& [sec, keys] : entries_)
      for (const auto& [key, val] : keys)
        if (!bound_.count(qualified(sec, key))) throw ValidationError(qualified(sec, key), "unknown key");
  }

  static const std::set<std::string>& known_sections() {
    static const std::set<std::string> s{"", "eos", "elastic", "material", "grid", "initial", "run", "output"};
    return s;
  }

 private:
  void bind(const std::string& sec, const std::string& key, const std::function<void(const std::string&)>& f) {
    bound_.insert(qualified(sec, key));
    const auto s = entries_.find(sec);
    if (s == entries_.end()) return;
    const auto k = s->second.find(key);
    if (k != s->second.end()) f(k->second.first);
  }

  const Entries& entries_;
  std::set<std::string> bound_;
};

void require(bool ok, const std::string& key, const std::string& reason) {
  if (!ok) throw ValidationError(key, reason);
}

void validate(const RunConfig& c) {
  const VolumetricEOS& e = c.mat.eos;
  require(e.gamma > 1.0, "eos.gamma", "gamma must exceed 1");
  require(e.cv > 0.0, "eos.cv", "cv must be positive");
  require(e.theta_ref > 0.0, "eos.theta_ref", "theta_ref must be positive");
  require(e.rho_ref > 0.0, "eos.rho_ref", "rho_ref must be positive");
  require(e.b >= 0.0, "eos.b", "b must be non-negative");
  require(e.p_inf >= 0.0, "eos.p_inf", "p_inf must be non-negative");
  if (e.kind == VolumetricEOS::Kind::Polytropic)
    require(e.b == 0.0 && e.q == 0.0 && e.p_inf == 0.0, "eos.b",
            "b, q and p_inf apply to the nasg equation of state only");

  const ElasticLaw& l = c.mat.elastic;
  require(l.K0 > 0.0, "elastic.K0", "K0 must be positive");
  require(l.K1 > 0.0, "elastic.K1", "K1 must be positive");
  if (l.kind == ElasticLaw::Kind::FENEP) require(l.b_ext > 0.0, "elastic.b_ext", "b_ext must be positive");
  require(c.kbkz.K0_1 > 0.0 && c.kbkz.K1_1 > 0.0 && c.kbkz.K0_2 > 0.0 && c.kbkz.K1_2 > 0.0,
          "elastic.K0_1", "two-network stiffness constants must be positive");
  if (c.model == ModelKind::KBKZ)
    require(l.kind == ElasticLaw::Kind::Hookean, "elastic", "the kbkz model uses Hookean springs");

  const MaterialParams& m = c.mat;
  require(m.alpha > 0.0, "material.alpha", "alpha must be positive");
  require(m.kB > 0.0, "material.kB", "kB must be positive");
  require(m.zeta > 0.0, "material.zeta", "zeta must be positive");
  require(m.tau0 > 0.0, "material.tau0", "tau0 must be positive");
  require(m.kappa > 0.0, "material.kappa", "kappa must be positive");
  require(m.e_ref >= 0.0, "material.e_ref", "e_ref must be non-negative");
  require(m.rhoR > 0.0, "material.rhoR", "rhoR must be positive");

  require(c.N >= 4, "grid.N", "N must be at least 4");
  require(c.x1 > c.x0, "grid.x1", "x1 must exceed x0");

  const InitialSpec& i = c.initial;
  for (double r : {i.rho, i.rho_left, i.rho_right}) {
    require(r > 0.0, "initial.rho", "densities must be positive");
    if (e.kind == VolumetricEOS::Kind::NASG) require(r * e.b < 1.0, "initial.rho", "density must stay below 1/b");
  }
  for (double t : {i.theta, i.theta_left, i.theta_right})
    require(t > 0.0, "initial.theta", "temperatures must be positive");
  require(i.Y_scale >= 0.0, "initial.Y_scale", "Y_scale must be non-negative");
  require(i.noise >= 0.0, "initial.noise", "noise must be non-negative");
  require(i.split > 0.0 && i.split < 1.0, "initial.split", "split must lie in (0, 1)");
  require(std::fabs(i.amplitude) < 1.0, "initial.amplitude", "amplitude must lie in (-1, 1)");
  require(i.wavenumber >= 1, "initial.wavenumber", "wavenumber must be at least 1");
  require(i.theta + std::min(i.pulse_amplitude, 0.0) > 0.0, "initial.pulse_amplitude",
          "pulse must keep the temperature positive");
  require(i.pulse_width > 0.0, "initial.pulse_width", "pulse_width must be positive");
  require(i.pulse_center > 0.0 && i.pulse_center < 1.0, "initial.pulse_center",
          "pulse_center must lie in (0, 1)");

  require(c.cfl > 0.0 && c.cfl <= 0.9, "run.cfl", "cfl must lie in (0, 0.9]");
  require(c.t_end > 0.0, "run.t_end", "t_end must be positive");
  require(c.max_steps >= 0, "run.max_steps", "max_steps must be non-negative");
  require(c.relax_dt > 0.0, "run.relax_dt", "relax_dt must be positive");

  require(!c.output.directory.empty(), "output.directory", "directory must not be empty");
  require(c.output.snapshot_every >= 0, "output.snapshot_every", "snapshot_every must be non-negative");
  require(c.output.precision >= 1 && c.output.precision <= 17, "output.precision",
          "precision must lie in [1, 17]");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const Entries entries = tokenize(text);
  RunConfig c;
  // Default for FENE-P runs when b_ext is not given.
  c.mat.elastic.b_ext = 10.0;
  Binder b(entries);

  std::string eos_kind = "polytropic", elastic_kind = "hookean";
  b.text("", "model", [&](const std::string& v) {
    if (v == "maxwell") c.model = ModelKind::Maxwell;
    else if (v == "kbkz") c.model = ModelKind::KBKZ;
    else throw ValidationError("model", "expected maxwell or kbkz");
  });
  b.text("", "eos", [&](const std::string& v) {
    if (v != "polytropic" && v != "nasg") throw ValidationError("eos", "expected polytropic or nasg");
    eos_kind = v;
  });
  b.text("", "elastic", [&](const std::string& v) {
    if (v != "hookean" && v != "fenep") throw ValidationError("elastic", "expected hookean or fenep");
    elastic_kind = v;
  });
  long seed = 0;
  b.integer("", "rng_seed", seed);

  VolumetricEOS& e = c.mat.eos;
  b.number("eos", "cv", e.cv);
  b.number("eos", "gamma", e.gamma);
  b.number("eos", "theta_ref", e.theta_ref);
  b.number("eos", "rho_ref", e.rho_ref);
  b.number("eos", "b", e.b);
  b.number("eos", "q", e.q);
  b.number("eos", "p_inf", e.p_inf);

  ElasticLaw& l = c.mat.elastic;
  b.number("elastic", "K0", l.K0);
  b.number("elastic", "K1", l.K1);
  b.number("elastic", "b_ext", l.b_ext);
  b.number("elastic", "K0_1", c.kbkz.K0_1);
  b.number("elastic", "K1_1", c.kbkz.K1_1);
  b.number("elastic", "K0_2", c.kbkz.K0_2);
  b.number("elastic", "K1_2", c.kbkz.K1_2);

  MaterialParams& m = c.mat;
  b.number("material", "alpha", m.alpha);
  b.number("material", "kB", m.kB);
  b.number("material", "zeta", m.zeta);
  b.number("material", "tau0", m.tau0);
  b.number("material", "kappa", m.kappa);
  b.number("material", "e_ref", m.e_ref);
  b.number("material", "rhoR", m.rhoR);
  b.number("material", "f1", m.body_force[0]);
  b.number("material", "f2", m.body_force[1]);
  b.number("material", "f3", m.body_force[2]);

  long n = static_cast<long>(c.N);
  b.integer("grid", "N", n);
  b.number("grid", "x0", c.x0);
  b.number("grid", "x1", c.x1);
  b.text("grid", "boundary", [&](const std::string& v) {
    if (v == "periodic") c.boundary = Boundary::Periodic;
    else if (v == "transmissive") c.boundary = Boundary::Transmissive;
    else throw ValidationError("grid.boundary", "expected periodic or transmissive");
  });

  InitialSpec& i = c.initial;
  b.text("initial", "preset", [&](const std::string& v) {
    if (v == "uniform") i.preset = Preset::Uniform;
    else if (v == "riemann") i.preset = Preset::Riemann;
    else if (v == "smooth-wave") i.preset = Preset::SmoothWave;
    else if (v == "heat-pulse") i.preset = Preset::HeatPulse;
    else throw ValidationError("initial.preset", "expected uniform, riemann, smooth-wave or heat-pulse");
  });
  b.number("initial", "rho", i.rho);
  b.number("initial", "theta", i.theta);
  b.number("initial", "v1", i.v[0]);
  b.number("initial", "v2", i.v[1]);
  b.number("initial", "v3", i.v[2]);
  b.number("initial", "q1", i.q[0]);
  b.number("initial", "q2", i.q[1]);
  b.number("initial", "q3", i.q[2]);
  b.number("initial", "Y_scale", i.Y_scale);
  b.number("initial", "noise", i.noise);
  b.number("initial", "rho_left", i.rho_left);
  b.number("initial", "rho_right", i.rho_right);
  b.number("initial", "theta_left", i.theta_left);
  b.number("initial", "theta_right", i.theta_right);
  b.number("initial", "split", i.split);
  b.number("initial", "amplitude", i.amplitude);
  long k = i.wavenumber;
  b.integer("initial", "wavenumber", k);
  b.number("initial", "pulse_amplitude", i.pulse_amplitude);
  b.number("initial", "pulse_center", i.pulse_center);
  b.number("initial", "pulse_width", i.pulse_width);

  b.number("run", "cfl", c.cfl);
  b.number("run", "t_end", c.t_end);
  b.integer("run", "max_steps", c.max_steps);
  b.number("run", "relax_dt", c.relax_dt);

  b.text("output", "directory", [&](const std::string& v) { c.output.directory = v; });
  b.integer("output", "snapshot_every", c.output.snapshot_every);
  long prec = c.output.precision;
  b.integer("output", "precision", prec);
  b.finish();

  if (seed < 0) throw ValidationError("rng_seed", "rng_seed must be non-negative");
  c.rng_seed = static_cast<std::uint64_t>(seed);
  if (n < 4) throw ValidationError("grid.N", "N must be at least 4");
  c.N = static_cast<std::size_t>(n);
  i.wavenumber = static_cast<int>(k);
  c.output.precision = static_cast<int>(prec);

  const double cv = e.cv, gamma = e.gamma, tr = e.theta_ref, rr = e.rho_ref;
  e = eos_kind == "nasg" ? VolumetricEOS::nasg(cv, gamma, tr, rr, e.b, e.q, e.p_inf)
                         : VolumetricEOS{VolumetricEOS::Kind::Polytropic, cv, gamma, tr, rr, e.b, e.q, e.p_inf};
  l.kind = elastic_kind == "fenep" ? ElasticLaw::Kind::FENEP : ElasticLaw::Kind::Hookean;

  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace viscoflow
