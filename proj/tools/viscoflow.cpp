// Command-line front end: run, relax and verify.
#include <CLI11.hpp>
#include <iostream>

#include "viscoflow/commands.hpp"

using namespace viscoflow;

namespace {

int load(const std::string& path, RunConfig& cfg) {
  try {
    cfg = load_config(path);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

// Sub-cycling gets expensive when relaxation is much faster than the run.
// Best effort: a bad initial state is reported by the run itself.
void warn_stiffness(const RunConfig& c) try {
  double tau, speed;
  if (c.model == ModelKind::KBKZ) {
    const kbkz::Model m = kbkz_model(c);
    const kbkz::State u = homogeneous_state_kbkz(c);
    tau = kbkz::relaxation_time(kbkz::to_primitive(u, m), m);
    speed = kbkz::wave_speed_bound(u, m, 0);
  } else {
    const ConservedState u = homogeneous_state(c);
    tau = relaxation_time(to_primitive(u, c.mat), c.mat);
    speed = wave_speed_bound(u, c.mat, 0);
  }
  const double est_dt = c.cfl * (c.x1 - c.x0) / static_cast<double>(c.N) / speed;
  const double n_sub = est_dt / (kRelaxSafety * tau);
  if (n_sub > 1e3)
    std::cerr << "warning: relaxation needs about " << static_cast<long>(n_sub)
              << " substeps per step at the initial state\n";
} catch (const Error&) {
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible viscoelastic Maxwell fluid solver and verification suite"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for flux and source loops")
      ->check(CLI::PositiveNumber);

  std::string run_cfg;
  CLI::App* run = app.add_subcommand("run", "advance a 1D configuration, write snapshots and diagnostics");
  run->add_option("config", run_cfg, "config file")->required();

  std::string relax_cfg;
  CLI::App* relax = app.add_subcommand("relax", "homogeneous relaxation of the initial state");
  relax->add_option("config", relax_cfg, "config file")->required();

  VerifyOptions vo;
  std::string kind;
  CLI::App* verify = app.add_subcommand("verify", "numerical convexity and symmetrizer checks");
  verify->add_option("suite", kind, "convexity, symmetrizer or minors")
      ->required()
      ->check(CLI::IsMember({"convexity", "symmetrizer", "minors"}));
  verify->add_option("--samples", vo.samples, "samples per family")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vo.seed, "random seed");
  verify->add_option("--model", vo.model, "maxwell, kbkz or all")
      ->check(CLI::IsMember({"maxwell", "kbkz", "all"}));
  verify->add_flag("--literal", vo.literal, "symmetrizer: bare flux Jacobian without involution term");
  verify->add_option("--output", vo.output, "directory for the report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      RunConfig cfg;
      if (const int rc = load(run_cfg, cfg); rc != kExitOk) return rc;
      warn_stiffness(cfg);
      const RunOutcome o = run_command(cfg, threads);
      (o.exit_code == kExitOk ? std::cout : std::cerr)
          << (o.exit_code == kExitOk ? "" : "aborted: ") << o.message << " after " << o.steps
          << " steps, t=" << o.time << '\n';
      return o.exit_code;
    }
    if (*relax) {
      RunConfig cfg;
      if (const int rc = load(relax_cfg, cfg); rc != kExitOk) return rc;
      return relax_command(cfg, std::cout);
    }
    vo.kind = kind == "convexity" ? VerifyKind::Convexity
              : kind == "symmetrizer" ? VerifyKind::Symmetrizer
                                      : VerifyKind::Minors;
    return verify_command(vo, std::cout);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAbort;
  }
}
