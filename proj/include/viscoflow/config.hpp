#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "viscoflow/errors.hpp"
#include "viscoflow/kbkz.hpp"
#include "viscoflow/material.hpp"
#include "viscoflow/solver.hpp"

namespace viscoflow {

struct ParseError : Error {
  int line;
  ParseError(int l, const std::string& reason)
      : Error("line " + std::to_string(l) + ": " + reason), line(l) {}
};

struct ValidationError : Error {
  std::string key;
  ValidationError(const std::string& k, const std::string& reason) : Error(k + ": " + reason), key(k) {}
};

enum class ModelKind { Maxwell, KBKZ };
enum class Preset { Uniform, Riemann, SmoothWave, HeatPulse };

const char* to_string(ModelKind m);
const char* to_string(Preset p);

struct InitialSpec {
  Preset preset = Preset::Uniform;
  double rho = 1.0;
  double theta = 1.0;
  Vec3 v{0.0, 0.0, 0.0};
  Vec3 q{0.0, 0.0, 0.0};
  // Y = Y_scale·I with 𝓎 = 1/det Y; 0 selects the equilibrium metric at θ.
  double Y_scale = 0.0;
  double noise = 0.0;  // seeded uniform perturbation of v, amplitude in velocity units

  double rho_left = 2.0, rho_right = 1.0;
  double theta_left = 1.0, theta_right = 1.0;
  double split = 0.5;  // fraction of the domain

  double amplitude = 0.01;
  int wavenumber = 1;

  double pulse_amplitude = 0.1;
  double pulse_center = 0.5;  // fraction of the domain
  double pulse_width = 0.05;  // half-width of the compact bump, x units
};

struct OutputSpec {
  std::string directory = "output";
  long snapshot_every = 0;  // 0 writes only the first and last snapshot
  int precision = 17;
};

struct RunConfig {
  ModelKind model = ModelKind::Maxwell;
  MaterialParams mat;
  kbkz::Params kbkz;
  std::size_t N = 100;
  double x0 = 0.0, x1 = 1.0;
  Boundary boundary = Boundary::Periodic;
  InitialSpec initial;
  double cfl = 0.5;
  double t_end = 1.0;
  long max_steps = 1000;
  double relax_dt = 0.01;  // sampling interval of the relax command
  OutputSpec output;
  std::uint64_t rng_seed = 0;
};

// Strict INI: `[section]`, `key = value`, `#` comments, no duplicates, no
// unknown sections or keys. Defaults are those of RunConfig above:
//
//   (top)      model=maxwell eos=polytropic elastic=hookean rng_seed=0
//   [eos]      cv=1 gamma=1.4 theta_ref=1 rho_ref=1 b=0 q=0 p_inf=0
//   [elastic]  K0=0.5 K1=0.5 b_ext=10 K0_1=K1_1=K0_2=K1_2=0.5
//   [material] alpha=1 kB=1 zeta=4 tau0=1 kappa=1 e_ref=1 rhoR=1 f1=f2=f3=0
//   [grid]     N=100 x0=0 x1=1 boundary=periodic
//   [initial]  preset=uniform rho=1 theta=1 v1..v3=0 q1..q3=0 Y_scale=0 noise=0
//              rho_left=2 rho_right=1 theta_left=1 theta_right=1 split=0.5
//              amplitude=0.01 wavenumber=1
//              pulse_amplitude=0.1 pulse_center=0.5 pulse_width=0.05
//   [run]      cfl=0.5 t_end=1 max_steps=1000 relax_dt=0.01
//   [output]   directory=output snapshot_every=0 precision=17
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace viscoflow
