#include "contactlab/hamiltonian.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "contactlab/numerics.hpp"

namespace contactlab {

namespace {

// exp underflow guard: exponents at or below this give exact zero and, since
// every derivative carries the same exponential factor, exact zero
// derivatives as well.  This keeps the flat tails bit-exact zeros instead of
// denormals.
constexpr double kExpFloor = -700.0;

std::string fmt(const char* pattern, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return std::string(buf);
}

Vec default_center(int phase_dim, const Vec& center) {
  if (center.size() == 0) return Vec::Zero(phase_dim);
  if (center.size() != phase_dim)
    throw std::invalid_argument("center has wrong dimension");
  return center;
}

SupportBox cube_box(const Vec& center, double radius) {
  return SupportBox(center.array() - radius, center.array() + radius);
}

// psi, psi', psi'' for the normalized bump profile in u = |p-c|^2:
//   psi(u) = C exp(E(u)),  E = -B^2/(u-B)^2,  u < B.
struct UProfileEval {
  double f, df, d2f;
};

UProfileEval bump_u_profile(double u, double B, double C) {
  if (u >= B) return {0.0, 0.0, 0.0};
  const double w = u - B;  // negative
  const double E = -B * B / (w * w);
  if (E <= kExpFloor) return {0.0, 0.0, 0.0};
  const double f = C * std::exp(E);
  const double dE = 2.0 * B * B / (w * w * w);
  const double d2E = -6.0 * B * B / (w * w * w * w);
  return {f, f * dE, f * (dE * dE + d2E)};
}

}  // namespace

double eval_bump_profile(double B, double x) {
  if (!(B > 0.0)) throw std::domain_error("eval_bump_profile: B must be > 0");
  const double u = x * x;
  if (u >= B) return 0.0;
  const double w = u - B;
  const double E = -B * B / (w * w);
  return E <= kExpFloor ? 0.0 : std::exp(E);
}

AutonomousHamiltonian AutonomousHamiltonian::from_parts(
    int n, ValueFn value, GradFn grad, HessFn hess, SupportBox box,
    std::string mode, std::string label) {
  if (n < 1) throw std::invalid_argument("Hamiltonian: n must be >= 1");
  AutonomousHamiltonian h;
  h.n_ = n;
  h.value_ = std::move(value);
  h.grad_ = std::move(grad);
  h.hess_ = std::move(hess);
  h.box_ = std::move(box);
  h.mode_ = std::move(mode);
  h.label_ = std::move(label);
  return h;
}

AutonomousHamiltonian AutonomousHamiltonian::from_value_only(
    int n, ValueFn value, SupportBox box, double fd_step, std::string label) {
  if (fd_step <= 0.0)
    throw std::invalid_argument("Hamiltonian: fd_step must be > 0");
  AutonomousHamiltonian h;
  h.n_ = n;
  h.value_ = std::move(value);
  h.box_ = std::move(box);
  h.mode_ = "finite_difference";
  h.label_ = std::move(label);
  h.fd_step_ = fd_step;
  return h;
}

double AutonomousHamiltonian::value(const Vec& p) const {
  if (box_.empty() || !box_.contains(p)) return 0.0;
  return value_(p);
}

Vec AutonomousHamiltonian::gradient(const Vec& p) const {
  if (box_.empty() || !box_.contains(p)) return Vec::Zero(2 * n_);
  if (grad_) return grad_(p);
  auto f = [this](const Vec& q) { return this->value(q); };
  return fd_gradient(f, p, fd_step_);
}

Mat AutonomousHamiltonian::hessian(const Vec& p) const {
  if (box_.empty() || !box_.contains(p)) return Mat::Zero(2 * n_, 2 * n_);
  if (hess_) return hess_(p);
  auto f = [this](const Vec& q) { return this->value(q); };
  return fd_hessian(f, p, fd_step_);
}

AutonomousHamiltonian make_zero(int n) {
  if (n < 1) throw std::invalid_argument("make_zero: n must be >= 1");
  AutonomousHamiltonian h = AutonomousHamiltonian::from_parts(
      n, [](const Vec&) { return 0.0; }, nullptr, nullptr, SupportBox(),
      "analytic", "zero");
  return h;
}

AutonomousHamiltonian make_radial_bump(double B, double A, int n, Vec center,
                                       double scale) {
  if (!(B > 0.0)) throw std::domain_error("make_radial_bump: B must be > 0");
  if (!(A > 0.0)) throw std::domain_error("make_radial_bump: A must be > 0");
  if (scale == 0.0) return make_zero(n);
  const int d = 2 * n;
  const Vec c = default_center(d, center);
  // normalization A / f_B(0): f_B(0) = e^{-1} for every B
  const double C = scale * A * std::exp(1.0);

  auto profile = [B, C](const Vec& p, const Vec& cc) {
    const Vec diff = p - cc;
    return std::pair<UProfileEval, Vec>(bump_u_profile(diff.squaredNorm(), B, C),
                                        diff);
  };
  auto value = [profile, c](const Vec& p) { return profile(p, c).first.f; };
  auto grad = [profile, c](const Vec& p) {
    auto [e, diff] = profile(p, c);
    return Vec(2.0 * e.df * diff);
  };
  auto hess = [profile, c, d](const Vec& p) {
    auto [e, diff] = profile(p, c);
    Mat h = 2.0 * e.df * Mat::Identity(d, d);
    h += 4.0 * e.d2f * (diff * diff.transpose());
    return h;
  };
  return AutonomousHamiltonian::from_parts(
      n, value, grad, hess, cube_box(c, std::sqrt(B)), "analytic",
      fmt("radial_bump(B=%g,A=%g)", B, A * scale));
}

AutonomousHamiltonian make_quadratic_core(double a, double cutoff_radius,
                                          double transition_width, int n,
                                          Vec center) {
  if (!(cutoff_radius > 0.0) || !(transition_width > 0.0))
    throw std::domain_error("make_quadratic_core: radii must be > 0");
  const int d = 2 * n;
  const Vec c = default_center(d, center);
  const double R = cutoff_radius, w = transition_width;

  // 1-d radial data: value G(r) = (a/2) r^2 T(r) and its first and second
  // radial derivatives; T == 1 for r <= R so the core is exactly harmonic.
  struct Radial {
    double G, dG, d2G;
  };
  auto radial = [a, R, w](double r) -> Radial {
    if (r <= R) return {0.5 * a * r * r, a * r, a};
    if (r >= R + w) return {0.0, 0.0, 0.0};
    const SmoothStepEval s = smooth_step((R + w - r) / w);
    const double T = s.s;
    const double dT = -s.ds / w;
    const double d2T = s.d2s / (w * w);
    const double G = 0.5 * a * r * r * T;
    const double dG = a * r * T + 0.5 * a * r * r * dT;
    const double d2G = a * T + 2.0 * a * r * dT + 0.5 * a * r * r * d2T;
    return {G, dG, d2G};
  };

  auto value = [radial, c](const Vec& p) {
    return radial((p - c).norm()).G;
  };
  auto grad = [radial, c, a, d](const Vec& p) {
    const Vec diff = p - c;
    const double r = diff.norm();
    if (r < 1e-12) return Vec(Vec::Zero(d));
    const Radial rd = radial(r);
    return Vec((rd.dG / r) * diff);
  };
  auto hess = [radial, c, a, R, d](const Vec& p) {
    const Vec diff = p - c;
    const double r = diff.norm();
    if (r <= R) return Mat(a * Mat::Identity(d, d));  // exact harmonic core
    const Radial rd = radial(r);
    const Vec unit = diff / r;
    Mat h = (rd.dG / r) * Mat::Identity(d, d);
    h += (rd.d2G - rd.dG / r) * (unit * unit.transpose());
    return h;
  };
  return AutonomousHamiltonian::from_parts(
      n, value, grad, hess, cube_box(c, R + w), "analytic",
      fmt("quadratic_core(a=%g,R=%g)", a, R));
}

AutonomousHamiltonian make_ring_bump(double r_inner, double r_outer, double A,
                                     int n) {
  if (!(0.0 < r_inner && r_inner < r_outer))
    throw std::domain_error("make_ring_bump: need 0 < r_inner < r_outer");
  if (!(A > 0.0)) throw std::domain_error("make_ring_bump: A must be > 0");
  const int d = 2 * n;
  const Vec c = Vec::Zero(d);
  const double U1 = r_inner * r_inner, U2 = r_outer * r_outer;
  // E = -W/P with P = (u-U1)(U2-u); at the midpoint P = ((U2-U1)/2)^2, so
  // choosing W equal to that value gives peak e^{-1}, normalized to A below.
  const double W = 0.25 * (U2 - U1) * (U2 - U1);
  const double C = A * std::exp(1.0);

  auto prof = [U1, U2, W, C](double u) -> UProfileEval {
    if (u <= U1 || u >= U2) return {0.0, 0.0, 0.0};
    const double P = (u - U1) * (U2 - u);
    const double E = -W / P;
    if (E <= kExpFloor) return {0.0, 0.0, 0.0};
    const double dP = U1 + U2 - 2.0 * u;
    const double dE = W * dP / (P * P);
    const double d2E = W * (-2.0 * P - 2.0 * dP * dP) / (P * P * P);
    const double f = C * std::exp(E);
    return {f, f * dE, f * (dE * dE + d2E)};
  };
  auto value = [prof, c](const Vec& p) { return prof((p - c).squaredNorm()).f; };
  auto grad = [prof, c](const Vec& p) {
    const Vec diff = p - c;
    const UProfileEval e = prof(diff.squaredNorm());
    return Vec(2.0 * e.df * diff);
  };
  auto hess = [prof, c, d](const Vec& p) {
    const Vec diff = p - c;
    const UProfileEval e = prof(diff.squaredNorm());
    Mat h = 2.0 * e.df * Mat::Identity(d, d);
    h += 4.0 * e.d2f * (diff * diff.transpose());
    return h;
  };
  return AutonomousHamiltonian::from_parts(
      n, value, grad, hess, cube_box(c, r_outer), "analytic",
      fmt("ring_bump(r=[%g,%g])", r_inner, r_outer));
}

AutonomousHamiltonian make_shear(const ShearParams& params) {
  const int n = params.n;
  if (n < 1) throw std::invalid_argument("make_shear: n must be >= 1");
  const int d = 2 * n;
  if (params.core_lo.size() != d || params.core_hi.size() != d ||
      params.width.size() != d)
    throw std::invalid_argument("make_shear: core/width need 2n entries");
  for (int i = 0; i < d; ++i) {
    if (!(params.core_lo[i] <= params.core_hi[i]))
      throw std::invalid_argument("make_shear: core_lo > core_hi");
    if (!(params.width[i] > 0.0))
      throw std::invalid_argument("make_shear: widths must be > 0");
  }
  const double c = params.c;
  const Vec lo = params.core_lo, hi = params.core_hi, wd = params.width;
  const int nu = n;  // index of y_1 in (x_1..x_n, y_1..y_n)

  struct AxisEval {
    double v, dv, d2v;
  };
  auto axes = [lo, hi, wd, d](const Vec& p) {
    std::vector<AxisEval> out(d);
    for (int k = 0; k < d; ++k) {
      const SmoothStepEval e = plateau(p[k], lo[k], hi[k], wd[k]);
      out[k] = {e.s, e.ds, e.d2s};
    }
    return out;
  };
  auto prod_except = [d](const std::vector<AxisEval>& ax, int skip1,
                         int skip2) {
    double prod = 1.0;
    for (int k = 0; k < d; ++k)
      if (k != skip1 && k != skip2) prod *= ax[k].v;
    return prod;
  };

  auto value = [axes, prod_except, c, nu](const Vec& p) {
    const auto ax = axes(p);
    return c * p[nu] * prod_except(ax, -1, -1);
  };
  auto grad = [axes, prod_except, c, nu, d](const Vec& p) {
    const auto ax = axes(p);
    const double P = prod_except(ax, -1, -1);
    Vec g(d);
    for (int m = 0; m < d; ++m) {
      double gm = p[nu] * ax[m].dv * prod_except(ax, m, -1);
      if (m == nu) gm += P;
      g[m] = c * gm;
    }
    return g;
  };
  auto hess = [axes, prod_except, c, nu, d](const Vec& p) {
    const auto ax = axes(p);
    Mat h(d, d);
    for (int m = 0; m < d; ++m) {
      for (int l = m; l < d; ++l) {
        double pml;
        if (m == l)
          pml = ax[m].d2v * prod_except(ax, m, -1);
        else
          pml = ax[m].dv * ax[l].dv * prod_except(ax, m, l);
        double v = p[nu] * pml;
        if (m == nu) v += ax[l].dv * prod_except(ax, l, -1);
        if (l == nu) v += ax[m].dv * prod_except(ax, m, -1);
        h(m, l) = c * v;
        h(l, m) = c * v;
      }
    }
    return h;
  };
  return AutonomousHamiltonian::from_parts(
      n, value, grad, hess, SupportBox(lo - wd, hi + wd), "analytic",
      fmt("shear(c=%g,n=%g)", c, static_cast<double>(n)));
}

AutonomousHamiltonian make_sum(
    const std::vector<AutonomousHamiltonian>& terms) {
  if (terms.empty()) throw std::invalid_argument("make_sum: no terms");
  const int n = terms.front().dim();
  SupportBox box;
  bool analytic = true;
  for (const auto& t : terms) {
    if (t.dim() != n) throw std::invalid_argument("make_sum: mixed dimensions");
    box = SupportBox::hull(box, t.support());
    if (t.derivative_mode() != "analytic") analytic = false;
  }
  if (box.empty()) return make_zero(n);
  const int d = 2 * n;
  auto parts = std::make_shared<std::vector<AutonomousHamiltonian>>(terms);
  auto value = [parts](const Vec& p) {
    double s = 0.0;
    for (const auto& t : *parts) s += t.value(p);
    return s;
  };
  auto grad = [parts, d](const Vec& p) {
    Vec g = Vec::Zero(d);
    for (const auto& t : *parts) g += t.gradient(p);
    return g;
  };
  auto hess = [parts, d](const Vec& p) {
    Mat h = Mat::Zero(d, d);
    for (const auto& t : *parts) h += t.hessian(p);
    return h;
  };
  return AutonomousHamiltonian::from_parts(
      n, value, grad, hess, box, analytic ? "analytic" : "mixed",
      "sum(" + std::to_string(terms.size()) + " terms)");
}

AutonomousHamiltonian scale_hamiltonian(const AutonomousHamiltonian& H,
                                        double s) {
  if (s == 0.0 || H.is_zero()) return make_zero(H.dim());
  auto base = std::make_shared<AutonomousHamiltonian>(H);
  auto value = [base, s](const Vec& p) { return s * base->value(p); };
  auto grad = [base, s](const Vec& p) { return Vec(s * base->gradient(p)); };
  auto hess = [base, s](const Vec& p) { return Mat(s * base->hessian(p)); };
  return AutonomousHamiltonian::from_parts(
      H.dim(), value, grad, hess, H.support(), H.derivative_mode(),
      fmt("%g*", s, 0) + H.label());
}

SmoothStepEval smooth_step(double t) {
  // Flat to all orders at the endpoints; below this the exponentials
  // underflow anyway, so clamp to the exact constants.
  if (t <= 1e-4) return {0.0, 0.0, 0.0};
  if (t >= 1.0 - 1e-4) return {1.0, 0.0, 0.0};
  auto fe = [](double x) {  // f, f', f'' of exp(-1/x) for x in (0,1)
    const double f = std::exp(-1.0 / x);
    const double df = f / (x * x);
    const double d2f = f * (1.0 / (x * x * x * x) - 2.0 / (x * x * x));
    return std::array<double, 3>{f, df, d2f};
  };
  const auto a = fe(t);
  const auto b = fe(1.0 - t);
  const double fa = a[0], dfa = a[1], d2fa = a[2];
  const double fb = b[0];
  const double dfb = -b[1];    // d/dt f(1-t)
  const double d2fb = b[2];    // d^2/dt^2 f(1-t)
  const double D = fa + fb;
  const double N = dfa * fb - fa * dfb;
  const double s = fa / D;
  const double ds = N / (D * D);
  const double d2s =
      ((d2fa * fb - fa * d2fb) * D - 2.0 * N * (dfa + dfb)) / (D * D * D);
  return {s, ds, d2s};
}

SmoothStepEval plateau(double x, double lo, double hi, double w) {
  const SmoothStepEval s1 = smooth_step((x - lo + w) / w);
  const SmoothStepEval s2 = smooth_step((hi + w - x) / w);
  const double v = s1.s * s2.s;
  const double d1 = s1.ds / w, d2 = -s2.ds / w;
  const double dd1 = s1.d2s / (w * w), dd2 = s2.d2s / (w * w);
  return {v, d1 * s2.s + s1.s * d2, dd1 * s2.s + 2.0 * d1 * d2 + s1.s * dd2};
}

}  // namespace contactlab
