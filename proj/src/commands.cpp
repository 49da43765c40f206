#include "viscoflow/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>

#include "viscoflow/closure.hpp"

namespace viscoflow {

namespace fs = std::filesystem;

kbkz::Model kbkz_model(const RunConfig& c) { return {c.mat, c.kbkz}; }

namespace {

constexpr double kPi = 3.14159265358979323846;

double equilibrium_c(double K, double kB_theta, const ElasticLaw& law) {
  if (law.kind == ElasticLaw::Kind::FENEP) {
    const double b2 = law.b_ext * law.b_ext;
    return kB_theta * b2 / (K * b2 + 3.0 * kB_theta);
  }
  return kB_theta / K;
}

}  // namespace

double equilibrium_metric_scale(const MaterialParams& mat, double f, double theta) {
  const double c = equilibrium_c(stiffness_K(mat.elastic, theta), mat.kB * theta, mat.elastic);
  const double s = f * f / c;
  return s * s;
}

double equilibrium_metric_scale(const kbkz::Model& m, double f, double theta, int family) {
  const double K = family == 1 ? m.params.K1(theta) : m.params.K2(theta);
  const double c = m.mat.kB * theta / K;
  // Family 2 sees Cof F = f²·I in place of F.
  const double g = family == 1 ? f * f : f * f * f * f;
  const double s = g / c;
  return s * s;
}

CellData preset_cell(const RunConfig& c, double x) {
  const InitialSpec& s = c.initial;
  CellData d{s.rho, s.theta, s.v, s.q};
  const double L = c.x1 - c.x0;
  const double xi = (x - c.x0) / L;
  switch (s.preset) {
    case Preset::Uniform: break;
    case Preset::Riemann:
      if (xi < s.split) {
        d.rho = s.rho_left;
        d.theta = s.theta_left;
      } else {
        d.rho = s.rho_right;
        d.theta = s.theta_right;
      }
      break;
    case Preset::SmoothWave:
      d.rho = s.rho * (1.0 + s.amplitude * std::sin(2.0 * kPi * s.wavenumber * xi));
      break;
    case Preset::HeatPulse: {
      const double r = std::fabs(x - (c.x0 + s.pulse_center * L));
      if (r < s.pulse_width) {
        const double w = std::cos(0.5 * kPi * r / s.pulse_width);
        d.theta += s.pulse_amplitude * w * w;
      }
      break;
    }
  }
  return d;
}

namespace {

// F = (ρ_R/ρ)^{1/3}·I keeps ρ·det F = ρ_R.
double stretch(const MaterialParams& mat, double rho) { return std::cbrt(mat.rhoR / rho); }

ConservedState maxwell_cell(const RunConfig& c, const CellData& d) {
  const double f = stretch(c.mat, d.rho);
  const Mat3 F = Mat3::diag(f, f, f);
  const double ys = c.initial.Y_scale > 0.0 ? c.initial.Y_scale
                                            : equilibrium_metric_scale(c.mat, f, d.theta);
  const SymMat3 Y = SymMat3::diag(ys, ys, ys);
  const double y = 1.0 / det(Y);
  const double eta = entropy_for_temperature(c.mat, d.rho, d.theta, F, Y, y);
  return from_primitive(c.mat, d.rho, eta, d.q, d.v, F, Y, y);
}

kbkz::State kbkz_cell(const RunConfig& c, const CellData& d) {
  const kbkz::Model m = kbkz_model(c);
  const double f = stretch(c.mat, d.rho);
  const Mat3 F = Mat3::diag(f, f, f);
  const double s1 = c.initial.Y_scale > 0.0 ? c.initial.Y_scale : equilibrium_metric_scale(m, f, d.theta, 1);
  const double s2 = c.initial.Y_scale > 0.0 ? c.initial.Y_scale : equilibrium_metric_scale(m, f, d.theta, 2);
  const SymMat3 Y1 = SymMat3::diag(s1, s1, s1), Y2 = SymMat3::diag(s2, s2, s2);
  const double y1 = 1.0 / det(Y1), y2 = 1.0 / det(Y2);
  const Mat3 G = transpose(cofactor(F));
  const double eta = kbkz::entropy_for_temperature(m, d.rho, d.theta, F, G, Y1, Y2, y1, y2);
  return kbkz::from_primitive(m, d.rho, eta, d.q, d.v, F, Y1, Y2, y1, y2);
}

template <class State, class Make>
Grid1D<State> build_grid(const RunConfig& c, const Make& make) {
  Grid1D<State> g{c.x0, c.x1, c.boundary, std::vector<State>(c.N)};
  Rng rng(c.rng_seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < c.N; ++i) {
    CellData d = preset_cell(c, g.center(i));
    if (c.initial.noise > 0.0)
      for (double& vk : d.v) vk += c.initial.noise * u(rng);
    g.cells[i] = make(c, d);
  }
  return g;
}

}  // namespace

Grid1D<ConservedState> initial_grid(const RunConfig& c) {
  return build_grid<ConservedState>(c, maxwell_cell);
}

Grid1D<kbkz::State> initial_grid_kbkz(const RunConfig& c) {
  return build_grid<kbkz::State>(c, kbkz_cell);
}

ConservedState homogeneous_state(const RunConfig& c) {
  const InitialSpec& s = c.initial;
  return maxwell_cell(c, {s.rho, s.theta, s.v, s.q});
}

kbkz::State homogeneous_state_kbkz(const RunConfig& c) {
  const InitialSpec& s = c.initial;
  return kbkz_cell(c, {s.rho, s.theta, s.v, s.q});
}

namespace {

double frobenius(const SymMat3& s) { return std::sqrt(frobenius_sq(s)); }

RelaxSample sample_of(double t, const ConservedState& u, const MaterialParams& mat) {
  const PrimitiveView pv = to_primitive(u, mat);
  const SymMat3 S = cauchy_stress(pv, mat) + pv.p * SymMat3::identity();
  return {t, pv.theta, pv.trC, frobenius(S), entropy_production(pv, mat), pv.ydet * det(pv.Y)};
}

RelaxSample sample_of(double t, const kbkz::State& u, const kbkz::Model& m) {
  const kbkz::Primitive pv = kbkz::to_primitive(u, m);
  const SymMat3 S = kbkz::stress(pv, m) + pv.p * SymMat3::identity();
  // Report the family further from its first integral.
  const double r1 = pv.y1 * det(pv.Y1), r2 = pv.y2 * det(pv.Y2);
  const double ydet = std::fabs(r1 - 1.0) >= std::fabs(r2 - 1.0) ? r1 : r2;
  return {t, pv.theta, pv.trC1, frobenius(S), kbkz::entropy_production(pv, m), ydet};
}

template <class State, class Model>
std::vector<RelaxSample> trajectory(State u, const Model& m, double t_end, double dt) {
  std::vector<RelaxSample> out{sample_of(0.0, u, m)};
  const long n = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  double t = 0.0;
  for (long k = 1; k <= n; ++k) {
    const double t_next = std::min(t_end, static_cast<double>(k) * dt);
    u = relax_substep(u, m, t_next - t);
    t = t_next;
    out.push_back(sample_of(t, u, m));
  }
  return out;
}

}  // namespace

std::vector<RelaxSample> relax_trajectory(const RunConfig& c) {
  if (c.model == ModelKind::KBKZ)
    return trajectory(homogeneous_state_kbkz(c), kbkz_model(c), c.t_end, c.relax_dt);
  return trajectory(homogeneous_state(c), c.mat, c.t_end, c.relax_dt);
}

namespace {

class CsvRow {
 public:
  explicit CsvRow(int precision) : precision_(precision) {}
  CsvRow& operator<<(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision_, x);
    sep();
    line_ += buf;
    return *this;
  }
  CsvRow& operator<<(long x) {
    sep();
    line_ += std::to_string(x);
    return *this;
  }
  CsvRow& operator<<(const std::string& s) {
    sep();
    line_ += s;
    return *this;
  }
  CsvRow& operator<<(const Vec3& v) { return *this << v[0] << v[1] << v[2]; }
  CsvRow& operator<<(const Mat3& m) {
    for (double x : m.a) *this << x;
    return *this;
  }
  CsvRow& operator<<(const SymMat3& m) {
    for (double x : m.s) *this << x;
    return *this;
  }
  const std::string& str() const { return line_; }

 private:
  void sep() {
    if (!line_.empty()) line_ += ',';
  }
  int precision_;
  std::string line_;
};

std::string mat_columns(const std::string& p) {
  std::string s;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) s += "," + p + std::to_string(i) + std::to_string(j);
  return s;
}

std::string sym_columns(const std::string& p) {
  return "," + p + "11," + p + "12," + p + "13," + p + "22," + p + "23," + p + "33";
}

void snapshot_row(CsvRow& r, const ConservedState& u, const MaterialParams& mat) {
  const PrimitiveView pv = to_primitive(u, mat);
  r << pv.rho << pv.eta << pv.q << pv.v << pv.F << pv.Y << pv.ydet << pv.theta << pv.p
    << entropy_production(pv, mat);
}

void snapshot_row(CsvRow& r, const kbkz::State& u, const kbkz::Model& m) {
  const kbkz::Primitive pv = kbkz::to_primitive(u, m);
  r << pv.rho << pv.eta << pv.q << pv.v << pv.F << pv.Y1 << pv.y1 << pv.theta << pv.p
    << kbkz::entropy_production(pv, m) << pv.G << pv.Y2 << pv.y2;
}

void diagnostics_row(CsvRow& r, const RunDiagnostics& d) {
  r << d.step << d.time << d.dt << d.mass << d.momentum << d.energy << d.math_entropy
    << d.phys_entropy << d.max_detY_residual << d.max_rhoR_residual << d.min_theta << d.min_eig_Y
    << d.sigma_integral;
}

template <class State, class Model>
void write_snapshot(const fs::path& dir, long step, const Grid1D<State>& g, const Model& m,
                    ModelKind kind, int precision) {
  std::ofstream out(dir / ("snapshot_" + std::to_string(step) + ".csv"));
  if (!out) throw Error("cannot write snapshot in " + dir.string());
  out << snapshot_header(kind) << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    CsvRow r(precision);
    r << g.center(i);
    snapshot_row(r, g.cells[i], m);
    out << r.str() << '\n';
  }
}

template <class System, class Model>
RunOutcome run_system(const RunConfig& c, const System& sys, const Model& model,
                      const Grid1D<typename System::State>& g0, int threads) {
  using State = typename System::State;
  const fs::path dir(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return {kExitConfig, 0, 0.0, "cannot create output directory " + dir.string()};
  std::ofstream diag(dir / "diagnostics.csv");
  if (!diag) return {kExitConfig, 0, 0.0, "cannot write diagnostics in " + dir.string()};
  diag << diagnostics_header() << '\n';

  const int prec = c.output.precision;
  std::optional<Grid1D<State>> last;
  long last_step = -1, last_written = -1;
  double last_time = 0.0;
  const auto observer = [&](long n, const Grid1D<State>& g, const RunDiagnostics& d) {
    CsvRow r(prec);
    diagnostics_row(r, d);
    diag << r.str() << '\n' << std::flush;
    if (n == 0 || (c.output.snapshot_every > 0 && n % c.output.snapshot_every == 0)) {
      write_snapshot(dir, n, g, model, c.model, prec);
      last_written = n;
    }
    last = g;
    last_step = n;
    last_time = d.time;
  };

  RunControl ctl{c.cfl, c.t_end, c.max_steps, threads};
  const auto flush_last = [&] {
    if (last && last_step != last_written) write_snapshot(dir, last_step, *last, model, c.model, prec);
  };
  try {
    run(g0, sys, ctl, std::function<void(long, const Grid1D<State>&, const RunDiagnostics&)>(observer));
  } catch (const InadmissibleCell& e) {
    flush_last();
    return {kExitAbort, last_step, last_time, e.what()};
  } catch (const Inadmissible& e) {
    flush_last();
    return {kExitAbort, last_step, last_time, e.what()};
  } catch (const CFLCollapse& e) {
    flush_last();
    return {kExitAbort, last_step, last_time, e.what()};
  }
  flush_last();
  return {kExitOk, last_step, last_time, "completed"};
}

}  // namespace

std::string snapshot_header(ModelKind m) {
  std::string h = "x,rho,eta,q1,q2,q3,v1,v2,v3" + mat_columns("F") + sym_columns("Y") + ",detY,theta,p,sigma";
  if (m == ModelKind::KBKZ) h += mat_columns("G") + sym_columns("Y2_") + ",detY2";
  return h;
}

std::string diagnostics_header() {
  return "step,time,dt,mass,momentum1,momentum2,momentum3,energy,math_entropy,phys_entropy,"
         "max_detY_residual,max_rhoR_residual,min_theta,min_eig_Y,sigma_integral";
}

RunOutcome run_command(const RunConfig& c, int threads) {
  if (threads < 1) return {kExitConfig, 0, 0.0, "threads must be at least 1"};
  if (c.model == ModelKind::KBKZ) {
    const kbkz::Model m = kbkz_model(c);
    return run_system(c, kbkz::System{m}, m, initial_grid_kbkz(c), threads);
  }
  return run_system(c, MaxwellSystem{c.mat}, c.mat, initial_grid(c), threads);
}

int relax_command(const RunConfig& c, std::ostream& log) {
  const fs::path dir(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "relax.csv");
  if (ec || !out) {
    log << "error: cannot write relax.csv in " << dir.string() << '\n';
    return kExitConfig;
  }
  out << "time,theta,trC,norm_S,sigma,ydetY\n";
  std::vector<RelaxSample> traj;
  try {
    traj = relax_trajectory(c);
  } catch (const Inadmissible& e) {
    log << "aborted: " << e.what() << '\n';
    return kExitAbort;
  }
  for (const RelaxSample& s : traj) {
    CsvRow r(c.output.precision);
    r << s.time << s.theta << s.trC << s.norm_S << s.sigma << s.ydetY;
    out << r.str() << '\n';
  }
  const RelaxSample& end = traj.back();
  log << "relaxed to t=" << end.time << ": theta=" << end.theta << " trC=" << end.trC
      << " sigma=" << end.sigma << '\n';
  return kExitOk;
}

MaterialParams nasg_material() {
  MaterialParams m;
  // Liquid-like covolume; 1/b = 20 stays above the sampled densities.
  m.eos = VolumetricEOS::nasg(1.0, 1.4, 1.0, 1.0, 0.05, 0.0, 1.0);
  return m;
}

MaterialParams fenep_material(double b_ext) {
  MaterialParams m;
  m.elastic = ElasticLaw::fenep(0.5, 0.5, b_ext);
  return m;
}

namespace {

bool wants(const std::string& model, const char* m) { return model == "all" || model == m; }

VerificationReport from_minors(MinorFamily f, const std::vector<MinorReport>& rs, double tol) {
  VerificationReport rep{std::string("minors/") + to_string(f), {}};
  for (const MinorReport& r : rs) {
    double worst = 0.0;
    for (double e : r.rel_err) worst = std::max(worst, e);
    rep.add("max_rel_err", r.index, worst, tol, r.pass);
  }
  return rep;
}

}  // namespace

std::vector<VerificationReport> verify_reports(const VerifyOptions& o) {
  if (o.samples < 1) throw ValidationError("samples", "samples must be at least 1");
  if (o.model != "all" && o.model != "maxwell" && o.model != "kbkz")
    throw ValidationError("model", "expected maxwell, kbkz or all");
  std::vector<VerificationReport> out;
  const MaterialParams base = MaterialParams::baseline();
  switch (o.kind) {
    case VerifyKind::Minors: {
      constexpr double tol = 1e-6;
      if (wants(o.model, "maxwell")) {
        out.push_back(from_minors(MinorFamily::PG, minor_reports(MinorFamily::PG, o.samples, o.seed, tol), tol));
        out.push_back(from_minors(MinorFamily::NASG, minor_reports(MinorFamily::NASG, o.samples, o.seed, tol), tol));
        VerificationReport d{"minors/nasg_discriminants", {}};
        for (const DiscriminantReport& r : discriminant_reports(20, o.seed))
          d.add("rel_err", r.index, r.rel_err, 1e-12, r.pass);
        out.push_back(d);
      }
      if (wants(o.model, "kbkz"))
        out.push_back(from_minors(MinorFamily::KBKZ, minor_reports(MinorFamily::KBKZ, o.samples, o.seed, tol), tol));
      break;
    }
    case VerifyKind::Convexity: {
      const auto add = [&](ConvexityTarget t, const MaterialParams& m, const std::string& label) {
        VerificationReport r = strict_convexity_sample(t, m, o.samples, o.seed);
        r.name = std::string("convexity/") + to_string(t) + "/" + label;
        out.push_back(r);
      };
      if (wants(o.model, "maxwell")) {
        add(ConvexityTarget::SolventTilde, base, "polytropic");
        add(ConvexityTarget::SolventTilde, nasg_material(), "nasg");
        add(ConvexityTarget::HookeanTrace, base, "hookean");
        add(ConvexityTarget::FenepTrace, fenep_material(), "fenep");
        add(ConvexityTarget::MathEntropy, base, "maxwell+polytropic");
        add(ConvexityTarget::MathEntropy, nasg_material(), "maxwell+nasg");
        add(ConvexityTarget::MathEntropy, fenep_material(), "maxwell+fenep");
      }
      if (wants(o.model, "kbkz")) add(ConvexityTarget::KBKZMathEntropy, base, "kbkz+polytropic");
      break;
    }
    case VerifyKind::Symmetrizer: {
      const bool godunov = !o.literal;
      const std::string mode = godunov ? "godunov" : "literal";
      if (wants(o.model, "maxwell")) {
        VerificationReport r = symmetrizer_sample(base, o.samples, o.seed, godunov);
        r.name = "symmetrizer/maxwell/" + mode;
        out.push_back(r);
      }
      if (wants(o.model, "kbkz")) {
        VerificationReport r = symmetrizer_sample(kbkz::Model{base, {}}, o.samples, o.seed, godunov);
        r.name = "symmetrizer/kbkz/" + mode;
        out.push_back(r);
      }
      break;
    }
  }
  return out;
}

int verify_command(const VerifyOptions& o, std::ostream& log) {
  const char* kind = o.kind == VerifyKind::Minors ? "minors"
                     : o.kind == VerifyKind::Convexity ? "convexity"
                                                       : "symmetrizer";
  const std::vector<VerificationReport> reports = verify_reports(o);
  std::error_code ec;
  fs::create_directories(o.output, ec);
  const fs::path path = fs::path(o.output) / (std::string("verify_") + kind + ".csv");
  std::ofstream out(path);
  if (ec || !out) {
    log << "error: cannot write " << path.string() << '\n';
    return kExitConfig;
  }
  out << "report,check,index,measured,threshold,pass\n";
  bool all = true;
  for (const VerificationReport& r : reports) {
    for (const VerificationRecord& x : r.records) {
      CsvRow row(17);
      row << r.name << x.check << x.index << x.measured << x.threshold << std::string(x.pass ? "1" : "0");
      out << row.str() << '\n';
    }
    all = all && r.passed();
    log << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.records.size() - r.failures() << "/"
        << r.records.size() << " checks)\n";
  }
  log << (all ? "PASS" : "FAIL") << " verify " << kind << ", report " << path.string() << '\n';
  return all ? kExitOk : kExitAbort;
}

}  // namespace viscoflow
