#include "contactlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "contactlab/numerics.hpp"

namespace contactlab {
namespace {

int even_step_count(double t, double step) {
  if (!(step > 0)) throw std::invalid_argument("integrator step must be positive");
  int n = static_cast<int>(std::ceil(t / step));
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  return n;
}

// Third-order running quadrature: advances each node with a three-point
// Newton-Cotes rule so the last interval never degrades to trapezoid order.
std::vector<double> cumulative_integral(const std::vector<double>& f, double dt) {
  const int m = static_cast<int>(f.size());
  std::vector<double> acc(m, 0.0);
  for (int k = 0; k + 1 < m; ++k) {
    double inc;
    if (k + 2 < m) {
      inc = dt / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
    } else {
      inc = dt / 12.0 * (-f[k - 1] + 8.0 * f[k] + 5.0 * f[k + 1]);
    }
    acc[k + 1] = acc[k] + inc;
  }
  return acc;
}

double lambda_of_field(const Vec& p, const Vec& grad) {
  // lambda(X_H) = sum y_i dx_i/dt = -sum y_i H_{y_i}
  const int n = static_cast<int>(p.size()) / 2;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s -= p[n + i] * grad[n + i];
  return s;
}

}  // namespace

// --- schedules -------------------------------------------------------------

std::vector<Schedule> standard_schedule_family() {
  std::vector<Schedule> out;
  auto add = [&out](std::string name, std::function<double(double)> a,
                    std::function<double(double)> da, bool monotone) {
    out.push_back(Schedule{std::move(name), std::move(a), std::move(da), monotone});
  };
  const double pi = kTwoPi / 2.0;

  add("identity", [](double t) { return t; }, [](double) { return 1.0; }, true);
  add("quadratic", [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
      true);
  add("cubic", [](double t) { return t * t * t; },
      [](double t) { return 3.0 * t * t; }, true);
  add("smoothstep", [](double t) { return t * t * (3.0 - 2.0 * t); },
      [](double t) { return 6.0 * t * (1.0 - t); }, true);
  add("quintic", [](double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); },
      [](double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }, true);
  add("sine-ramp", [pi](double t) { return 0.5 * (1.0 - std::cos(pi * t)); },
      [pi](double t) { return 0.5 * pi * std::sin(pi * t); }, true);
  add("fast-start", [pi](double t) { return std::sin(0.5 * pi * t); },
      [pi](double t) { return 0.5 * pi * std::cos(0.5 * pi * t); }, true);
  add("slow-start", [pi](double t) { return 1.0 - std::cos(0.5 * pi * t); },
      [pi](double t) { return 0.5 * pi * std::sin(0.5 * pi * t); }, true);

  // Wiggling reparametrizations: t + amp*sin(2 pi k t) is non-monotone as
  // soon as amp * 2 pi k > 1, and still fixes the endpoints.
  struct Wig {
    int k;
    double amp;
  };
  const Wig sin_wigs[] = {{1, 0.25}, {1, 0.4}, {2, 0.12}, {2, 0.2},
                          {3, 0.08}, {3, 0.15}, {1, -0.3}, {2, -0.15}};
  for (const Wig& w : sin_wigs) {
    std::ostringstream name;
    name << "wiggle-" << w.k << "-" << w.amp;
    const double amp = w.amp;
    const double freq = kTwoPi * w.k;
    add(name.str(), [amp, freq](double t) { return t + amp * std::sin(freq * t); },
        [amp, freq](double t) { return 1.0 + amp * freq * std::cos(freq * t); },
        false);
  }
  // t + amp*sin^2(pi k t): one-sided lead/lag, non-monotone for amp*pi*k > 1.
  const Wig sq_wigs[] = {{1, 0.5}, {2, 0.3}, {3, 0.2}, {1, -0.45}};
  for (const Wig& w : sq_wigs) {
    std::ostringstream name;
    name << "lead-" << w.k << "-" << w.amp;
    const double amp = w.amp;
    const double freq = pi * w.k;
    add(name.str(),
        [amp, freq](double t) {
          const double s = std::sin(freq * t);
          return t + amp * s * s;
        },
        [amp, freq](double t) { return 1.0 + amp * freq * std::sin(2.0 * freq * t); },
        false);
  }
  return out;
}

// --- ContactPathSpec -------------------------------------------------------

ContactPathSpec ContactPathSpec::autonomous(AutonomousHamiltonian H,
                                            double horizon) {
  ContactPathSpec s;
  s.kind_ = Kind::Autonomous;
  s.n_ = H.dim();
  s.horizon_ = horizon;
  s.box_ = H.support();
  s.H_ = std::move(H);
  return s;
}

ContactPathSpec ContactPathSpec::scheduled(AutonomousHamiltonian H,
                                           Schedule schedule, double horizon) {
  ContactPathSpec s;
  s.kind_ = Kind::Scheduled;
  s.n_ = H.dim();
  s.horizon_ = horizon;
  s.box_ = H.support();
  s.H_ = std::move(H);
  s.schedule_ = std::move(schedule);
  return s;
}

ContactPathSpec ContactPathSpec::general(int n, GeneralData data, SupportBox box,
                                         double horizon) {
  if (n < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!data.value) throw std::invalid_argument("general path needs a value closure");
  ContactPathSpec s;
  s.kind_ = Kind::General;
  s.n_ = n;
  s.horizon_ = horizon;
  s.box_ = std::move(box);
  s.general_ = std::move(data);
  return s;
}

ContactPathSpec ContactPathSpec::inverse_of(const ContactPathSpec& spec) {
  // The inverse flow of an autonomous Hamiltonian is the flow of -H; a
  // scheduled path additionally runs its profile backwards from the top.
  if (spec.kind_ == Kind::Autonomous) {
    return autonomous(scale_hamiltonian(spec.H_, -1.0), spec.horizon_);
  }
  if (spec.kind_ == Kind::Scheduled) {
    const Schedule& sch = spec.schedule_;
    const double T = spec.horizon_;
    Schedule inv;
    inv.name = sch.name + "-inverse";
    auto a = sch.a;
    auto da = sch.da;
    inv.a = [a, T](double t) { return a(T) - a(T - t); };
    inv.da = [da, T](double t) { return da(T - t); };
    inv.monotone = sch.monotone;
    return scheduled(scale_hamiltonian(spec.H_, -1.0), std::move(inv), T);
  }
  throw std::invalid_argument(
      "inverse path is only defined for (scheduled) autonomous specs");
}

bool ContactPathSpec::z_independent() const {
  return kind_ != Kind::General || general_.z_independent;
}

const AutonomousHamiltonian* ContactPathSpec::base_hamiltonian() const {
  return kind_ == Kind::General ? nullptr : &H_;
}

const Schedule* ContactPathSpec::schedule() const {
  return kind_ == Kind::Scheduled ? &schedule_ : nullptr;
}

double ContactPathSpec::value(double t, const Vec& p, double z) const {
  switch (kind_) {
    case Kind::Autonomous:
      return H_.value(p);
    case Kind::Scheduled:
      return schedule_.da(t) * H_.value(p);
    case Kind::General:
      return general_.value(t, p, wrap_unit(z));
  }
  return 0.0;
}

ContactPathSpec::Rates ContactPathSpec::rates(double t, const Vec& p,
                                              double z) const {
  const int n = n_;
  Rates r;
  r.base = Vec::Zero(2 * n);

  if (kind_ == Kind::General) {
    const double zw = wrap_unit(z);
    Vec grad(2 * n);
    double hz = 0.0;
    if (general_.gradient) {
      general_.gradient(t, p, zw, grad, hz);
    } else {
      const double h = general_.fd_step;
      Vec q = p;
      for (int i = 0; i < 2 * n; ++i) {
        const double save = q[i];
        q[i] = save + h;
        const double fp = general_.value(t, q, zw);
        q[i] = save - h;
        const double fm = general_.value(t, q, zw);
        q[i] = save;
        grad[i] = (fp - fm) / (2.0 * h);
      }
      hz = (general_.value(t, p, wrap_unit(zw + h)) -
            general_.value(t, p, wrap_unit(zw - h))) /
           (2.0 * h);
    }
    const double hval = general_.value(t, p, zw);
    double ydot_h = 0.0;
    for (int i = 0; i < n; ++i) {
      r.base[i] = -grad[n + i];
      r.base[n + i] = grad[i] + hz * p[n + i];
      ydot_h += p[n + i] * grad[n + i];
    }
    r.z = hval - ydot_h;
    r.g = hz;
    return r;
  }

  const double factor = (kind_ == Kind::Scheduled) ? schedule_.da(t) : 1.0;
  Vec grad = H_.gradient(p);
  double ydot_h = 0.0;
  for (int i = 0; i < n; ++i) {
    r.base[i] = -factor * grad[n + i];
    r.base[n + i] = factor * grad[i];
    ydot_h += p[n + i] * grad[n + i];
  }
  r.z = factor * (H_.value(p) - ydot_h);
  r.g = 0.0;
  return r;
}

// --- base flow -------------------------------------------------------------

Vec symplectic_vector_field(const AutonomousHamiltonian& H, const Vec& p) {
  const int n = H.dim();
  Vec grad = H.gradient(p);
  Vec field(2 * n);
  for (int i = 0; i < n; ++i) {
    field[i] = -grad[n + i];
    field[n + i] = grad[i];
  }
  return field;
}

Vec flow_map(const AutonomousHamiltonian& H, Vec p, double t, double step) {
  if (t == 0.0) return p;
  const int steps = even_step_count(std::abs(t), step);
  const double dt = t / steps;
  Vec k1, k2, k3, k4;
  for (int s = 0; s < steps; ++s) {
    k1 = symplectic_vector_field(H, p);
    k2 = symplectic_vector_field(H, p + 0.5 * dt * k1);
    k3 = symplectic_vector_field(H, p + 0.5 * dt * k2);
    k4 = symplectic_vector_field(H, p + dt * k3);
    p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

namespace {

struct BaseRun {
  std::vector<Vec> nodes;
  double energy_drift = 0.0;
};

BaseRun rk4_base_run(const AutonomousHamiltonian& H, const Vec& p0, double t,
                     double step) {
  const int steps = even_step_count(t, step);
  const double dt = t / steps;
  BaseRun run;
  run.nodes.reserve(steps + 1);
  run.nodes.push_back(p0);
  const double e0 = H.value(p0);
  Vec p = p0, k1, k2, k3, k4;
  for (int s = 0; s < steps; ++s) {
    k1 = symplectic_vector_field(H, p);
    k2 = symplectic_vector_field(H, p + 0.5 * dt * k1);
    k3 = symplectic_vector_field(H, p + 0.5 * dt * k2);
    k4 = symplectic_vector_field(H, p + dt * k3);
    p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    run.nodes.push_back(p);
    run.energy_drift = std::max(run.energy_drift, std::abs(H.value(p) - e0));
  }
  return run;
}

// One step of the generalized leapfrog for dH with full x-y coupling; the
// implicit stages are resolved by fixed-point iteration, which contracts for
// step * |Hess| well below 1.
Vec stormer_verlet_step(const AutonomousHamiltonian& H, const Vec& p, double dt) {
  const int n = H.dim();
  auto grad_at = [&H, n](const Vec& x, const Vec& y) {
    Vec q(2 * n);
    q.head(n) = x;
    q.tail(n) = y;
    return H.gradient(q);
  };
  auto solve = [n](const std::function<Vec(const Vec&)>& map, Vec guess) {
    for (int it = 0; it < 200; ++it) {
      Vec next = map(guess);
      const double delta = (next - guess).lpNorm<Eigen::Infinity>();
      guess = next;
      if (delta <= 1e-14 * (1.0 + guess.lpNorm<Eigen::Infinity>())) return guess;
    }
    throw AccuracyError(
        "implicit leapfrog stage failed to converge; reduce the step size");
  };

  const Vec x0 = p.head(n), y0 = p.tail(n);
  Vec xh = solve(
      [&](const Vec& u) { return (x0 - 0.5 * dt * grad_at(u, y0).tail(n)).eval(); },
      x0);
  const Vec gx_half = grad_at(xh, y0).head(n);
  Vec y1 = solve(
      [&](const Vec& v) {
        return (y0 + 0.5 * dt * (gx_half + grad_at(xh, v).head(n))).eval();
      },
      y0);
  Vec out(2 * n);
  out.head(n) = xh - 0.5 * dt * grad_at(xh, y1).tail(n);
  out.tail(n) = y1;
  return out;
}

BaseRun sv_base_run(const AutonomousHamiltonian& H, const Vec& p0, double t,
                    double step) {
  const int steps = even_step_count(t, step);
  const double dt = t / steps;
  BaseRun run;
  run.nodes.reserve(steps + 1);
  run.nodes.push_back(p0);
  const double e0 = H.value(p0);
  Vec p = p0;
  for (int s = 0; s < steps; ++s) {
    p = stormer_verlet_step(H, p, dt);
    run.nodes.push_back(p);
    run.energy_drift = std::max(run.energy_drift, std::abs(H.value(p) - e0));
  }
  return run;
}

BaseRun base_run(const AutonomousHamiltonian& H, const Vec& p0, double t,
                 const IntegratorSpec& spec) {
  return spec.scheme == Scheme::RK4 ? rk4_base_run(H, p0, t, spec.step)
                                    : sv_base_run(H, p0, t, spec.step);
}

}  // namespace

FlowResult integrate_symplectic(const AutonomousHamiltonian& H, const Vec& p0,
                                double t, const IntegratorSpec& spec,
                                bool error_check) {
  if (p0.size() != H.phase_dim())
    throw std::invalid_argument("start point has the wrong dimension");
  require_finite(p0, "flow start point");
  if (t < 0) throw std::invalid_argument("flow time must be non-negative");

  FlowResult result;
  if (t == 0.0) {
    result.endpoint = p0;
    return result;
  }
  BaseRun run = base_run(H, p0, t, spec);
  result.endpoint = run.nodes.back();
  result.energy_drift = run.energy_drift;

  if (error_check) {
    IntegratorSpec half = spec;
    half.step = spec.step / 2.0;
    BaseRun fine = base_run(H, p0, t, half);
    const double gap = (fine.nodes.back() - result.endpoint).norm();
    // Richardson factor for the scheme order: RK4 is 4th, leapfrog 2nd.
    const double factor = spec.scheme == Scheme::RK4 ? 16.0 / 15.0 : 4.0 / 3.0;
    result.richardson_error = gap * factor;
    if (result.richardson_error > 1e-5) {
      std::ostringstream msg;
      msg << "step-halving estimates an endpoint error of "
          << result.richardson_error << " (tolerance 1e-5); reduce the step";
      throw AccuracyError(msg.str());
    }
  }
  return result;
}

double reeb_shift(const AutonomousHamiltonian& H, const Vec& p0, double t,
                  double step) {
  if (p0.size() != H.phase_dim())
    throw std::invalid_argument("start point has the wrong dimension");
  if (t == 0.0) return 0.0;
  if (t < 0) throw std::invalid_argument("shift time must be non-negative");
  BaseRun run = rk4_base_run(H, p0, t, step);
  std::vector<double> samples(run.nodes.size());
  for (std::size_t k = 0; k < run.nodes.size(); ++k) {
    samples[k] = lambda_of_field(run.nodes[k], H.gradient(run.nodes[k]));
  }
  const double dt = t / static_cast<double>(run.nodes.size() - 1);
  return simpson_uniform(samples, dt) + t * H.value(p0);
}

// --- contact lift ----------------------------------------------------------

double Trajectory::energy_drift() const {
  if (!has_energy || energy.empty()) return 0.0;
  double drift = 0.0;
  for (double e : energy) drift = std::max(drift, std::abs(e - energy.front()));
  return drift;
}

double Trajectory::max_conformal() const {
  double m = 0.0;
  for (double g : conformal) m = std::max(m, std::abs(g));
  return m;
}

ContactFieldValue contact_vector_field(const ContactPathSpec& path, double t,
                                       const CylinderPoint& point, bool verify) {
  ContactPathSpec::Rates r = path.rates(t, point.base, point.fiber);
#ifndef NDEBUG
  verify = true;  // debug builds re-derive the field at every call
#endif
  if (verify) {
    const double gap = verify_contact_field(path, t, point);
    const double scale = 1.0 + r.base.lpNorm<Eigen::Infinity>();
    if (gap > 1e-5 * scale) {
      std::ostringstream msg;
      msg << "contact field assembly disagrees with the finite-difference "
             "route by "
          << gap;
      throw IntegrityError(msg.str());
    }
  }
  ContactFieldValue out;
  out.base = std::move(r.base);
  out.z_rate = r.z;
  out.g_rate = r.g;
  return out;
}

double verify_contact_field(const ContactPathSpec& path, double t,
                            const CylinderPoint& point) {
  const int n = path.dim();
  const Vec& p = point.base;
  const double z = point.fiber;
  const double h = 1e-6 * (1.0 + p.lpNorm<Eigen::Infinity>());

  Vec grad(2 * n);
  Vec q = p;
  for (int i = 0; i < 2 * n; ++i) {
    const double save = q[i];
    q[i] = save + h;
    const double fp = path.value(t, q, z);
    q[i] = save - h;
    const double fm = path.value(t, q, z);
    q[i] = save;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  const double hz = (path.value(t, p, wrap_unit(z + h)) -
                     path.value(t, p, wrap_unit(z - h))) /
                    (2.0 * h);
  const double hval = path.value(t, p, z);

  ContactPathSpec::Rates fd;
  fd.base = Vec::Zero(2 * n);
  double ydot_h = 0.0;
  for (int i = 0; i < n; ++i) {
    fd.base[i] = -grad[n + i];
    fd.base[n + i] = grad[i] + hz * p[n + i];
    ydot_h += p[n + i] * grad[n + i];
  }
  fd.z = hval - ydot_h;
  fd.g = hz;

  ContactPathSpec::Rates an = path.rates(t, p, z);
  double gap = (an.base - fd.base).lpNorm<Eigen::Infinity>();
  gap = std::max(gap, std::abs(an.z - fd.z));
  gap = std::max(gap, std::abs(an.g - fd.g));
  return gap;
}

Trajectory integrate_contact(const ContactPathSpec& path,
                             const CylinderPoint& start,
                             const IntegratorSpec& spec, bool cross_check) {
  const int n = path.dim();
  if (start.base.size() != 2 * n)
    throw std::invalid_argument("start point has the wrong dimension");
  require_finite(start.base, "contact start point");
  const double T = path.horizon();
  const int steps = even_step_count(T, spec.step);
  const double dt = T / steps;

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.base.reserve(steps + 1);
  traj.z_lift.reserve(steps + 1);
  traj.conformal.reserve(steps + 1);
  const AutonomousHamiltonian* base_h = path.base_hamiltonian();
  traj.has_energy = base_h != nullptr;

  if (spec.scheme == Scheme::StormerVerlet) {
    if (!path.plain_autonomous())
      throw std::invalid_argument(
          "the leapfrog scheme is limited to plain autonomous paths");
    BaseRun run = sv_base_run(*base_h, start.base, T, spec.step);
    std::vector<double> zdot(run.nodes.size());
    for (std::size_t k = 0; k < run.nodes.size(); ++k) {
      const Vec& p = run.nodes[k];
      zdot[k] = base_h->value(p) + lambda_of_field(p, base_h->gradient(p));
    }
    std::vector<double> zacc = cumulative_integral(zdot, dt);
    for (std::size_t k = 0; k < run.nodes.size(); ++k) {
      traj.times.push_back(dt * static_cast<double>(k));
      traj.base.push_back(run.nodes[k]);
      traj.z_lift.push_back(start.fiber + zacc[k]);
      traj.conformal.push_back(0.0);
      traj.energy.push_back(base_h->value(run.nodes[k]));
    }
  } else {
    // Joint RK4 on (p, z, g).
    Vec p = start.base;
    double z = start.fiber, g = 0.0;
    auto push = [&](double tk) {
      traj.times.push_back(tk);
      traj.base.push_back(p);
      traj.z_lift.push_back(z);
      traj.conformal.push_back(g);
      if (traj.has_energy) traj.energy.push_back(base_h->value(p));
    };
    push(0.0);
    for (int s = 0; s < steps; ++s) {
      const double t0 = dt * s;
      auto eval = [&path](double tt, const Vec& pp, double zz) {
        return path.rates(tt, pp, zz);
      };
      ContactPathSpec::Rates k1 = eval(t0, p, z);
      ContactPathSpec::Rates k2 =
          eval(t0 + 0.5 * dt, p + 0.5 * dt * k1.base, z + 0.5 * dt * k1.z);
      ContactPathSpec::Rates k3 =
          eval(t0 + 0.5 * dt, p + 0.5 * dt * k2.base, z + 0.5 * dt * k2.z);
      ContactPathSpec::Rates k4 = eval(t0 + dt, p + dt * k3.base, z + dt * k3.z);
      p += dt / 6.0 * (k1.base + 2.0 * k2.base + 2.0 * k3.base + k4.base);
      z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
      g += dt / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
      push(t0 + dt);
    }
  }

  if (cross_check) {
    if (path.z_independent() && traj.max_conformal() > 1e-8) {
      std::ostringstream msg;
      msg << "conformal exponent reached " << traj.max_conformal()
          << " for a fiberwise-constant Hamiltonian (expected 0 within 1e-8)";
      throw IntegrityError(msg.str());
    }
    const double lifted = traj.z_lift.back() - traj.z_lift.front();
    if (path.plain_autonomous()) {
      const double direct = reeb_shift(*base_h, start.base, T, spec.step);
      if (std::abs(lifted - direct) > 1e-6) {
        std::ostringstream msg;
        msg << "fiber shift mismatch: lift integration gives " << lifted
            << " but the action quadrature gives " << direct;
        throw IntegrityError(msg.str());
      }
    } else if (path.is_scheduled()) {
      // z(T) - z(0) = (a(T)-a(0)) H(p0) + int a'(s) lambda(X_H)(p_s) ds.
      const Schedule& sch = *path.schedule();
      std::vector<double> samples(traj.base.size());
      for (std::size_t k = 0; k < traj.base.size(); ++k) {
        samples[k] = sch.da(traj.times[k]) *
                     lambda_of_field(traj.base[k], base_h->gradient(traj.base[k]));
      }
      const double direct = (sch.a(T) - sch.a(0.0)) * base_h->value(start.base) +
                            simpson_uniform(samples, dt);
      if (std::abs(lifted - direct) > 1e-6) {
        std::ostringstream msg;
        msg << "fiber shift mismatch on scheduled path: lift gives " << lifted
            << " but the profile quadrature gives " << direct;
        throw IntegrityError(msg.str());
      }
    }
  }
  return traj;
}

}  // namespace contactlab
