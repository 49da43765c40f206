#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "viscoflow/config.hpp"
#include "viscoflow/convexity.hpp"
#include "viscoflow/kbkz.hpp"
#include "viscoflow/solver.hpp"

namespace viscoflow {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;  // config, usage or I/O error
inline constexpr int kExitAbort = 2;   // inadmissible state or collapsed time step

kbkz::Model kbkz_model(const RunConfig& c);

// Equilibrium metric for F = f·I at temperature θ: C = c·I with K_eff·c = k_Bθ,
// so Y = (f²/c)²·I. Returns the scalar (f²/c)².
double equilibrium_metric_scale(const MaterialParams& mat, double f, double theta);
double equilibrium_metric_scale(const kbkz::Model& m, double f, double theta, int family);

struct CellData {
  double rho;
  double theta;
  Vec3 v;
  Vec3 q;
};

// Preset profile at cell centre x (noise excluded).
CellData preset_cell(const RunConfig& c, double x);

Grid1D<ConservedState> initial_grid(const RunConfig& c);
Grid1D<kbkz::State> initial_grid_kbkz(const RunConfig& c);

// The homogeneous state used by `relax`: the uniform preset values at x0.
ConservedState homogeneous_state(const RunConfig& c);
kbkz::State homogeneous_state_kbkz(const RunConfig& c);

struct RelaxSample {
  double time;
  double theta;
  double trC;
  double norm_S;  // Frobenius norm of the extra stress T + pI
  double sigma;
  double ydetY;
};

std::vector<RelaxSample> relax_trajectory(const RunConfig& c);

std::string snapshot_header(ModelKind m);
std::string diagnostics_header();

struct RunOutcome {
  int exit_code;
  long steps;
  double time;
  std::string message;
};

// `run`: snapshots and diagnostics.csv in c.output.directory, flushed row by row.
RunOutcome run_command(const RunConfig& c, int threads);

// `relax`: relax.csv in c.output.directory.
int relax_command(const RunConfig& c, std::ostream& log);

enum class VerifyKind { Convexity, Symmetrizer, Minors };

struct VerifyOptions {
  VerifyKind kind = VerifyKind::Minors;
  int samples = 100;
  std::uint64_t seed = 7;
  std::string model = "all";  // maxwell, kbkz or all
  bool literal = false;       // symmetrizer: bare flux Jacobian, no involution term
  std::string output = ".";
};

// Material sets used by the verification suites.
MaterialParams nasg_material();
MaterialParams fenep_material(double b_ext = 10.0);

std::vector<VerificationReport> verify_reports(const VerifyOptions& o);
// Writes verify_<kind>.csv, prints one PASS/FAIL line per report and a total.
int verify_command(const VerifyOptions& o, std::ostream& log);

}  // namespace viscoflow
