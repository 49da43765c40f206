#include "viscoflow/convexity.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "viscoflow/flux.hpp"
#include "viscoflow/numdiff.hpp"

namespace viscoflow {

double pg_aux(double p, double q, double r, double x, double y, double z) {
  return std::exp(q * y) / (std::pow(x, p) * std::pow(z, r));
}

double nasg_aux(double p, double q, double r, double b, double x, double y, double z) {
  return std::exp(q * y) / (std::pow(x - b, p) * std::pow(x, r) * std::pow(z, r));
}

double kbkz_aux(double p, double q, double r, double x, double y, double z1, double z2) {
  return std::exp(q * y) / (std::pow(x, p) * std::pow(z1, r) * std::pow(z2, r));
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

std::array<double, 3> pg_minors(double p, double q, double r, double x, double y, double z) {
  require_positive(p, "p");
  require_positive(q, "q");
  require_positive(r, "r");
  require_positive(x, "x");
  require_positive(z, "z");
  const double e = std::exp(q * y);
  return {p * (p + 1.0) * e / (std::pow(x, p + 2.0) * std::pow(z, r)),
          q * q * p * e * e / (std::pow(x, 2.0 * p + 2.0) * std::pow(z, 2.0 * r)),
          q * q * p * r * e * e * e / (std::pow(x, 3.0 * p + 2.0) * std::pow(z, 3.0 * r + 2.0))};
}

std::array<double, 3> nasg_minors(double p, double q, double r, double b, double x, double y,
                                  double z) {
  require_positive(p, "p");
  require_positive(q, "q");
  require_positive(r, "r");
  require_positive(z, "z");
  if (!(b >= 0.0)) throw DomainError("b must be non-negative");
  if (!(x > b)) throw DomainError("x must exceed b");
  const double e = std::exp(q * y);
  const double s = x - b;
  const double quad1 =
      (p + r) * (1.0 + p + r) * x * x - 2.0 * b * r * (1.0 + p + r) * x + b * b * r * (1.0 + r);
  const double quad2 = (p + r) * x * x - 2.0 * b * r * x + b * b * r;
  return {e / (std::pow(s, p + 2.0) * std::pow(x, r + 2.0) * std::pow(z, r)) * quad1,
          q * q * e * e /
              (std::pow(s, 2.0 * p + 2.0) * std::pow(x, 2.0 * r + 2.0) * std::pow(z, 2.0 * r)) *
              quad2,
          q * q * r * e * e * e /
              (std::pow(s, 3.0 * p + 2.0) * std::pow(x, 3.0 * r + 2.0) *
               std::pow(z, 3.0 * r + 2.0)) *
              quad2};
}

std::array<double, 2> nasg_discriminants(double p, double /*q*/, double r, double b) {
  return {-4.0 * b * b * p * r * (1.0 + p + r), -4.0 * b * b * p * r};
}

std::array<double, 2> nasg_discriminants_direct(double p, double /*q*/, double r, double b) {
  const double b1 = 2.0 * b * r * (1.0 + p + r);
  const double d1 = b1 * b1 - 4.0 * (p + r) * (1.0 + p + r) * b * b * r * (1.0 + r);
  const double b2 = 2.0 * b * r;
  const double d2 = b2 * b2 - 4.0 * (p + r) * b * b * r;
  return {d1, d2};
}

std::array<double, 4> kbkz_minors(double p, double q, double r, double x, double y, double z1,
                                  double z2) {
  require_positive(p, "p");
  require_positive(q, "q");
  require_positive(r, "r");
  require_positive(x, "x");
  require_positive(z1, "z1");
  require_positive(z2, "z2");
  const double e = std::exp(q * y);
  const auto pw = [](double a, double k) { return std::pow(a, k); };
  return {p * (p + 1.0) * e / (pw(x, p + 2.0) * pw(z1, r) * pw(z2, r)),
          q * q * p * e * e / (pw(x, 2.0 * p + 2.0) * pw(z1, 2.0 * r) * pw(z2, 2.0 * r)),
          q * q * p * r * e * e * e /
              (pw(x, 3.0 * p + 2.0) * pw(z1, 3.0 * r + 2.0) * pw(z2, 3.0 * r)),
          q * q * p * r * r * e * e * e * e /
              (pw(x, 4.0 * p + 2.0) * pw(z1, 4.0 * r + 2.0) * pw(z2, 4.0 * r + 2.0))};
}

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

SymMat3 random_spd(Rng& rng, double lo, double hi) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = n(rng);
  const Eigen::Matrix3d qm = Eigen::HouseholderQR<Eigen::Matrix3d>(g).householderQ();
  Mat3 Q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Q(i, j) = qm(i, j);
  const double l0 = log_uniform(rng, lo, hi), l1 = log_uniform(rng, lo, hi),
               l2 = log_uniform(rng, lo, hi);
  return congruence(Q, SymMat3::diag(l0, l1, l2));
}

Mat3 random_deformation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Mat3 F = Mat3::identity();
    for (double& a : F.a) a += 0.5 * n(rng);
    if (std::fabs(det(F)) >= 0.2) return F;
  }
}

const char* to_string(MinorFamily f) {
  switch (f) {
    case MinorFamily::PG: return "pg";
    case MinorFamily::NASG: return "nasg";
    case MinorFamily::KBKZ: return "kbkz";
  }
  return "unknown";
}

namespace {

double rel_err(double a, double ref) { return std::fabs(a - ref) / std::max(std::fabs(ref), 1e-300); }

}  // namespace

// With 1e-4 the cross differences lose ~1e-5 to roundoff once the leading minors
// cancel; 2e-3 keeps the Richardson-corrected truncation below 1e-7.
constexpr double kMinorFdRel = 2e-3;

std::vector<MinorReport> minor_reports(MinorFamily family, int n_samples, std::uint64_t seed,
                                       double tol) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uy(-1.0, 1.0);
  std::vector<MinorReport> out;
  for (int k = 0; k < n_samples; ++k) {
    MinorReport rep{family, k, {}, {}, {}, {}, {}, true};
    const double p = log_uniform(rng, 0.25, 4.0), q = log_uniform(rng, 0.25, 4.0),
                 r = log_uniform(rng, 0.25, 4.0);
    ScalarFn f;
    Eigen::VectorXd pt;
    switch (family) {
      case MinorFamily::PG: {
        pt = Eigen::Vector3d(log_uniform(rng, 0.5, 2.0), uy(rng), log_uniform(rng, 0.5, 2.0));
        rep.params = {p, q, r};
        const auto c = pg_minors(p, q, r, pt(0), pt(1), pt(2));
        rep.closed_form.assign(c.begin(), c.end());
        f = [=](const Eigen::VectorXd& v) { return pg_aux(p, q, r, v(0), v(1), v(2)); };
        break;
      }
      case MinorFamily::NASG: {
        const double b = log_uniform(rng, 0.01, 1.0);
        pt = Eigen::Vector3d(b + log_uniform(rng, 0.5, 2.0), uy(rng), log_uniform(rng, 0.5, 2.0));
        rep.params = {p, q, r, b};
        const auto c = nasg_minors(p, q, r, b, pt(0), pt(1), pt(2));
        rep.closed_form.assign(c.begin(), c.end());
        f = [=](const Eigen::VectorXd& v) { return nasg_aux(p, q, r, b, v(0), v(1), v(2)); };
        break;
      }
      case MinorFamily::KBKZ: {
        pt = Eigen::Vector4d(log_uniform(rng, 0.5, 2.0), uy(rng), log_uniform(rng, 0.5, 2.0),
                             log_uniform(rng, 0.5, 2.0));
        rep.params = {p, q, r};
        const auto c = kbkz_minors(p, q, r, pt(0), pt(1), pt(2), pt(3));
        rep.closed_form.assign(c.begin(), c.end());
        f = [=](const Eigen::VectorXd& v) { return kbkz_aux(p, q, r, v(0), v(1), v(2), v(3)); };
        break;
      }
    }
    rep.point.assign(pt.data(), pt.data() + pt.size());
    rep.fd = leading_principal_minors(fd_hessian(f, pt, kMinorFdRel, true));
    for (std::size_t i = 0; i < rep.fd.size(); ++i) {
      const double e = rel_err(rep.fd[i], rep.closed_form[i]);
      rep.rel_err.push_back(e);
      rep.pass = rep.pass && e < tol && rep.closed_form[i] > 0.0;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<DiscriminantReport> discriminant_reports(int n_samples, std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<DiscriminantReport> out;
  for (int k = 0; k < n_samples; ++k) {
    DiscriminantReport d{};
    d.index = k;
    d.p = log_uniform(rng, 0.25, 4.0);
    d.q = log_uniform(rng, 0.25, 4.0);
    d.r = log_uniform(rng, 0.25, 4.0);
    d.b = log_uniform(rng, 0.01, 1.0);
    d.closed_form = nasg_discriminants(d.p, d.q, d.r, d.b);
    d.direct = nasg_discriminants_direct(d.p, d.q, d.r, d.b);
    d.rel_err = std::max(rel_err(d.direct[0], d.closed_form[0]), rel_err(d.direct[1], d.closed_form[1]));
    d.pass = d.rel_err < tol;
    out.push_back(d);
  }
  return out;
}

bool VerificationReport::passed() const { return failures() == 0 && !records.empty(); }

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const VerificationRecord& r) { return !r.pass; }));
}

void VerificationReport::add(const std::string& check, long index, double measured,
                             double threshold, bool pass) {
  records.push_back({check, index, measured, threshold, pass});
}

void VerificationReport::append(const VerificationReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
}

namespace {

constexpr int kMaxAttemptsPerSample = 100;

template <class Draw>
auto draw_admissible(Draw draw) {
  for (int attempt = 0; attempt < kMaxAttemptsPerSample; ++attempt) {
    auto s = draw();
    if (s) return *s;
  }
  throw SamplingFailure("admissible sampler rejected more than 99% of draws");
}

}  // namespace

// η is drawn through the shifted entropy η̃ = η + shift, so θ depends on ρ and η̃
// alone and stays moderate; a Gaussian η would put θ at e^{±shift/cV}, up to
// 10⁷ at the corners, where the FD Hessians lose every digit.
ConservedState sample_state(const MaterialParams& mat, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return draw_admissible([&]() -> std::optional<ConservedState> {
    const double rho = log_uniform(rng, 0.1, 10.0);
    const double eta_shifted = n(rng);
    const Vec3 q{n(rng), n(rng), n(rng)}, v{n(rng), n(rng), n(rng)};
    const Mat3 F = random_deformation(rng);
    const SymMat3 Y = random_spd(rng, 0.1, 10.0);
    const double y = log_uniform(rng, 0.1, 10.0);
    try {
      const double trC = trace(congruence(F, spd_inv_sqrt(Y)));
      const double eta = eta_shifted - entropy_shift(mat, rho, trC, y);
      const ConservedState u = from_primitive(mat, rho, eta, q, v, F, Y, y);
      if (!is_admissible(u, mat)) return std::nullopt;
      return u;
    } catch (const Error&) {
      return std::nullopt;
    }
  });
}

kbkz::State sample_state(const kbkz::Model& m, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return draw_admissible([&]() -> std::optional<kbkz::State> {
    const double rho = log_uniform(rng, 0.1, 10.0);
    const double eta_shifted = n(rng);
    const Vec3 q{n(rng), n(rng), n(rng)}, v{n(rng), n(rng), n(rng)};
    const Mat3 F = random_deformation(rng);
    const SymMat3 Y1 = random_spd(rng, 0.1, 10.0), Y2 = random_spd(rng, 0.1, 10.0);
    const double y1 = log_uniform(rng, 0.1, 10.0), y2 = log_uniform(rng, 0.1, 10.0);
    try {
      const double trC1 = trace(congruence(F, spd_inv_sqrt(Y1)));
      const double trC2 = trace(congruence(cofactor(F), spd_inv_sqrt(Y2)));
      const double eta = eta_shifted - kbkz::entropy_shift(m, rho, trC1, trC2, y1, y2);
      const kbkz::State u = kbkz::from_primitive(m, rho, eta, q, v, F, Y1, Y2, y1, y2);
      if (!kbkz::is_admissible(u, m)) return std::nullopt;
      return u;
    } catch (const Error&) {
      return std::nullopt;
    }
  });
}

const char* to_string(ConvexityTarget t) {
  switch (t) {
    case ConvexityTarget::SolventTilde: return "solvent_tilde";
    case ConvexityTarget::HookeanTrace: return "hookean_trace";
    case ConvexityTarget::FenepTrace: return "fenep_trace";
    case ConvexityTarget::MathEntropy: return "math_entropy";
    case ConvexityTarget::KBKZMathEntropy: return "kbkz_math_entropy";
  }
  return "unknown";
}

namespace {

// (F, Y) packed as 9 + 6 numbers.
Eigen::VectorXd pack_FY(const Mat3& F, const SymMat3& Y) {
  Eigen::VectorXd x(15);
  for (int k = 0; k < 9; ++k) x(k) = F.a[k];
  for (int k = 0; k < 6; ++k) x(9 + k) = Y.s[k];
  return x;
}

double trace_term(const Eigen::VectorXd& x) {
  Mat3 F;
  SymMat3 Y;
  for (int k = 0; k < 9; ++k) F.a[k] = x(k);
  for (int k = 0; k < 6; ++k) Y.s[k] = x(9 + k);
  return trace(congruence(F, spd_inv_sqrt(Y)));
}

double max_abs_eig(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Midpoint inequality g((a+b)/2) < ½(g(a)+g(b)); strict or with a relative slack.
void midpoint_records(VerificationReport& rep, const std::function<Eigen::VectorXd()>& draw,
                      const ScalarFn& g, bool strict, const std::function<bool(const Eigen::VectorXd&)>& ok = {}) {
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd a = draw(), b = draw();
    const Eigen::VectorXd mid = 0.5 * (a + b);
    if (ok) {
      const bool adm = ok(mid);
      rep.add("midpoint_admissible", k, adm ? 1.0 : 0.0, 1.0, adm);
      if (!adm) continue;
    }
    const double avg = 0.5 * (g(a) + g(b));
    const double gap = avg - g(mid);  // ≥ 0 for convex g
    const double slack = strict ? 0.0 : -1e-12 * std::max(1.0, std::fabs(avg));
    rep.add("midpoint_gap", k, gap, slack, strict ? gap > 0.0 : gap >= slack);
  }
}

}  // namespace

VerificationReport strict_convexity_sample(ConvexityTarget target, const MaterialParams& mat,
                                           int n_samples, std::uint64_t seed, const kbkz::Params& kp) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  VerificationReport rep{to_string(target), {}};

  switch (target) {
    case ConvexityTarget::SolventTilde: {
      const double trC = 3.0;
      const ScalarFn g = [&](const Eigen::VectorXd& x) {
        const double rho = 1.0 / x(0);
        check_density(mat.eos, rho);
        return e_solvent(mat.eos, rho, x(1) + entropy_shift(mat, rho, trC, x(2)));
      };
      const auto draw = [&]() -> Eigen::VectorXd {
        return draw_admissible([&]() -> std::optional<Eigen::VectorXd> {
          const double rho = log_uniform(rng, 0.1, 10.0);
          // Keep a margin from the covolume so FD stencils stay inside the domain.
          if (mat.eos.kind == VolumetricEOS::Kind::NASG && !(1.0 / rho > mat.eos.b * 1.01 + 1e-3))
            return std::nullopt;
          return Eigen::Vector3d(1.0 / rho, n(rng), log_uniform(rng, 0.1, 10.0));
        });
      };
      for (int k = 0; k < n_samples; ++k) {
        const Eigen::VectorXd x = draw();
        const double m = min_eigenvalue_sym(fd_hessian(g, x, 1e-4, true));
        rep.add("hessian_min_eig", k, m, 0.0, m > 0.0);
        if (mat.eos.kind == VolumetricEOS::Kind::NASG) {
          const ScalarFn affine = [&](const Eigen::VectorXd& y) {
            return (y(0) - mat.eos.b) * mat.eos.p_inf + mat.eos.q;
          };
          const double h = fd_hessian(affine, x, 1e-4, true).cwiseAbs().maxCoeff();
          const double tol = 1e-6 * (1.0 + std::fabs(mat.eos.p_inf) + std::fabs(mat.eos.q));
          rep.add("affine_hessian_norm", k, h, tol, h <= tol);
        }
      }
      midpoint_records(rep, draw, g, true);
      break;
    }
    case ConvexityTarget::HookeanTrace:
    case ConvexityTarget::FenepTrace: {
      const bool fene = target == ConvexityTarget::FenepTrace;
      const double b = mat.elastic.kind == ElasticLaw::Kind::FENEP ? mat.elastic.b_ext : 10.0;
      const ScalarFn g = [&](const Eigen::VectorXd& x) {
        const double t = trace_term(x);
        return fene ? -b * b * std::log1p(-t / (b * b)) : t;
      };
      const auto draw = [&]() -> Eigen::VectorXd {
        return draw_admissible([&]() -> std::optional<Eigen::VectorXd> {
          const Eigen::VectorXd x = pack_FY(random_deformation(rng), random_spd(rng, 0.1, 10.0));
          if (fene && !(trace_term(x) < 0.9 * b * b)) return std::nullopt;
          return x;
        });
      };
      for (int k = 0; k < n_samples; ++k) {
        const Eigen::VectorXd x = draw();
        const Eigen::MatrixXd H = fd_hessian(g, x, 1e-4, true);
        const double scale = max_abs_eig(H);
        const double m = min_eigenvalue_sym(H);
        rep.add("hessian_min_eig_rel", k, m / scale, -1e-6, m / scale >= -1e-6);
        if (fene) {
          const double mf = min_eigenvalue_sym(H.topLeftCorner(9, 9));
          rep.add("F_block_min_eig", k, mf, 0.0, mf > 0.0);
        }
      }
      midpoint_records(rep, draw, g, false);
      break;
    }
    case ConvexityTarget::MathEntropy: {
      const auto draw = [&]() -> Eigen::VectorXd { return to_vector(sample_state(mat, rng)); };
      for (int k = 0; k < n_samples; ++k) {
        for (int attempt = 0;; ++attempt) {
          const ConservedState u = sample_state(mat, rng);
          try {
            const double m = min_eigenvalue_sym(entropy_hessian(u, mat));
            rep.add("hessian_min_eig", k, m, 0.0, m > 0.0);
            break;
          } catch (const StepTooLarge&) {
            if (attempt + 1 >= kMaxAttemptsPerSample)
              throw SamplingFailure("no sampled state admits the FD stencil");
          }
        }
      }
      const ScalarFn g = [&](const Eigen::VectorXd& x) { return math_entropy(state_from_vector(x), mat); };
      midpoint_records(rep, draw, g, true, [&](const Eigen::VectorXd& x) {
        return static_cast<bool>(is_admissible(state_from_vector(x), mat));
      });
      break;
    }
    case ConvexityTarget::KBKZMathEntropy: {
      const kbkz::Model model{mat, kp};
      const auto draw = [&]() -> Eigen::VectorXd { return kbkz::to_vector(sample_state(model, rng)); };
      for (int k = 0; k < n_samples; ++k) {
        for (int attempt = 0;; ++attempt) {
          const kbkz::State u = sample_state(model, rng);
          try {
            const double m = min_eigenvalue_sym(kbkz::entropy_hessian(u, model));
            rep.add("hessian_min_eig", k, m, 0.0, m > 0.0);
            break;
          } catch (const StepTooLarge&) {
            if (attempt + 1 >= kMaxAttemptsPerSample)
              throw SamplingFailure("no sampled state admits the FD stencil");
          }
        }
      }
      const ScalarFn g = [&](const Eigen::VectorXd& x) {
        return kbkz::math_entropy(kbkz::state_from_vector(x), model);
      };
      midpoint_records(rep, draw, g, true, [&](const Eigen::VectorXd& x) {
        return static_cast<bool>(kbkz::is_admissible(kbkz::state_from_vector(x), model));
      });
      break;
    }
  }
  return rep;
}

namespace {

template <class Sample, class Check>
VerificationReport symmetrizer_loop(const std::string& name, int n_samples, double tol,
                                    Sample sample, Check check) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  VerificationReport rep{name, {}};
  for (int k = 0; k < n_samples; ++k) {
    for (int attempt = 0;; ++attempt) {
      try {
        const auto r = check(sample());
        rep.add("min_eig_H", k, r.min_eig_H, 0.0, r.min_eig_H > 0.0);
        rep.add("asym_rel", k, r.asym_rel, tol, r.asym_rel < tol);
        break;
      } catch (const StepTooLarge&) {
        if (attempt + 1 >= kMaxAttemptsPerSample)
          throw SamplingFailure("no sampled state admits the FD stencil");
      }
    }
  }
  return rep;
}

}  // namespace

VerificationReport symmetrizer_sample(const MaterialParams& mat, int n_samples, std::uint64_t seed,
                                      bool godunov, double tol) {
  Rng rng(seed);
  const Involution mode = godunov ? Involution::GodunovTerm : Involution::Ignore;
  return symmetrizer_loop(
      godunov ? "symmetrizer_maxwell_godunov" : "symmetrizer_maxwell", n_samples, tol,
      [&] { return sample_state(mat, rng); },
      [&](const ConservedState& u) { return symmetrizer_check(u, mat, 0, mode); });
}

VerificationReport symmetrizer_sample(const kbkz::Model& m, int n_samples, std::uint64_t seed,
                                      bool godunov, double tol) {
  Rng rng(seed);
  return symmetrizer_loop(
      godunov ? "symmetrizer_kbkz_godunov" : "symmetrizer_kbkz", n_samples, tol,
      [&] { return sample_state(m, rng); },
      [&](const kbkz::State& u) { return kbkz::symmetrizer_check(u, m, 0, godunov); });
}

}  // namespace viscoflow
