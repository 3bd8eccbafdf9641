#pragma once

// Hamiltonian flows on the base R^{2n} and their strict contact lifts to
// R^{2n} x S^1.
//
// Base dynamics (omega = sum dx_i ^ dy_i, contraction X . omega = -dH):
//     dx_i/dt = -dH/dy_i,    dy_i/dt = +dH/dx_i.
// For a time-dependent contact Hamiltonian h(t, p, z) the contact field for
// the form  dz - sum y_i dx_i  solves
//     alpha(X) = h,    d(alpha)(X, .) = (dh/dz) alpha - dh,
// which in coordinates reads
//     dx_i/dt = -h_{y_i},
//     dy_i/dt = +h_{x_i} + (dh/dz) y_i,
//     dz/dt   = h - sum_i y_i h_{y_i},
// and the conformal exponent g_t of (phi^t)* alpha = e^{g_t} alpha evolves by
//     dg/dt = (dh/dz) along the trajectory.
// For z-independent h = H the fiber shift over [0,t] has the closed form
//     F^t(p) = integral_0^t (lambda(X_H))(psi^s p) ds + t H(p),
// with lambda = sum y_i dx_i, used as an independent cross-check of the
// integrated lift.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

enum class Scheme { RK4, StormerVerlet };

struct IntegratorSpec {
  Scheme scheme = Scheme::RK4;
  double step = 1e-3;
};

// Time reparametrization profile a: [0,1] -> R with a(0)=0, a(1)=1.
struct Schedule {
  std::string name;
  std::function<double(double)> a;
  std::function<double(double)> da;
  bool monotone = true;
};

// Built-in schedule family used by the geodesic audits: entries 0..7 are
// monotone, the rest wiggle back and forth (da changes sign).
std::vector<Schedule> standard_schedule_family();

// A path of contactomorphisms described by its time-dependent Hamiltonian.
class ContactPathSpec {
 public:
  struct GeneralData {
    // h(t, p, z) with z in [0,1); gradient returns the 2n base partials and
    // the z partial.  A null gradient falls back to finite differences.
    std::function<double(double, const Vec&, double)> value;
    std::function<void(double, const Vec&, double, Vec&, double&)> gradient;
    bool z_independent = false;
    double fd_step = 1e-6;
  };

  static ContactPathSpec autonomous(AutonomousHamiltonian H, double horizon = 1.0);
  static ContactPathSpec scheduled(AutonomousHamiltonian H, Schedule schedule,
                                   double horizon = 1.0);
  static ContactPathSpec general(int n, GeneralData data, SupportBox box,
                                 double horizon = 1.0);

  // Path generated by  -k^{1-t}  (the pointwise inverse path).
  static ContactPathSpec inverse_of(const ContactPathSpec& spec);

  int dim() const { return n_; }
  int phase_dim() const { return 2 * n_; }
  double horizon() const { return horizon_; }
  const SupportBox& support() const { return box_; }
  bool z_independent() const;
  bool plain_autonomous() const { return kind_ == Kind::Autonomous; }
  bool is_scheduled() const { return kind_ == Kind::Scheduled; }
  const AutonomousHamiltonian* base_hamiltonian() const;
  const Schedule* schedule() const;

  double value(double t, const Vec& p, double z) const;

  struct Rates {
    Vec base;      // 2n components
    double z = 0;  // fiber lift rate
    double g = 0;  // conformal exponent rate
  };
  Rates rates(double t, const Vec& p, double z) const;

 private:
  enum class Kind { Autonomous, Scheduled, General };
  Kind kind_ = Kind::Autonomous;
  int n_ = 0;
  double horizon_ = 1.0;
  SupportBox box_;
  AutonomousHamiltonian H_;
  Schedule schedule_;
  GeneralData general_;
  bool inverted_ = false;  // evaluate as -k^{horizon - t}
};

// --- base flow -------------------------------------------------------------

// X_H = J grad H in the convention above.
Vec symplectic_vector_field(const AutonomousHamiltonian& H, const Vec& p);

struct FlowResult {
  Vec endpoint;
  double energy_drift = 0.0;      // max |H - H(p0)| along the trajectory
  double richardson_error = 0.0;  // step-halving endpoint estimate
};

// Autonomous base flow over [0, t], t >= 0.  When `error_check` is set the
// run is repeated at half step and an estimated endpoint error above 1e-5
// raises AccuracyError.
FlowResult integrate_symplectic(const AutonomousHamiltonian& H, const Vec& p0,
                                double t, const IntegratorSpec& spec = {},
                                bool error_check = true);

// Bare RK4 endpoint map (no checks); workhorse for scans.
Vec flow_map(const AutonomousHamiltonian& H, Vec p, double t, double step);

// Closed-form fiber shift F^t(p) computed by Simpson quadrature on the flow
// samples plus the t*H(p) term.
double reeb_shift(const AutonomousHamiltonian& H, const Vec& p0, double t,
                  double step = 1e-3);

// --- contact lift ----------------------------------------------------------

struct ContactFieldValue {
  Vec base;
  double z_rate = 0.0;
  double g_rate = 0.0;
};

// The contact vector field at (point, t).  With verify=true the assembly is
// re-derived from finite differences of the scalar evaluator and the two
// defining relations are checked (IntegrityError on mismatch).
ContactFieldValue contact_vector_field(const ContactPathSpec& path, double t,
                                       const CylinderPoint& point,
                                       bool verify = false);

// Maximum discrepancy of the two routes above (returned, not thrown).
double verify_contact_field(const ContactPathSpec& path, double t,
                            const CylinderPoint& point);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> base;
  std::vector<double> z_lift;     // real lift of the fiber coordinate
  std::vector<double> conformal;  // g_t along the trajectory
  std::vector<double> energy;     // H(base) for (scheduled) autonomous paths
  bool has_energy = false;

  double energy_drift() const;
  double max_conformal() const;
  CylinderPoint endpoint() const {
    return CylinderPoint(base.back(), wrap_unit(z_lift.back()));
  }
};

// Integrates the contact lift over [0, horizon].  For z-independent paths and
// cross_check=true, verifies g == 0 within 1e-8 and the independent fiber
// quadrature within 1e-6 (IntegrityError otherwise).
Trajectory integrate_contact(const ContactPathSpec& path,
                             const CylinderPoint& start,
                             const IntegratorSpec& spec = {},
                             bool cross_check = true);

}  // namespace contactlab
