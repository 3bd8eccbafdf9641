#include "contactlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "contactlab/hessian.hpp"
#include "contactlab/numerics.hpp"
#include "contactlab/translated.hpp"

namespace contactlab {
namespace {

constexpr double kSignTol = 1e-9;

int resolve_time_nodes(const ContactPathSpec& path, int requested) {
  if (requested > 0) {
    // Simpson needs an even interval count; the node count must be odd.
    return requested % 2 == 0 ? requested + 1 : requested;
  }
  // Closed-form spatial extrema make dense quadrature free for (scheduled)
  // autonomous paths; general paths pay a grid sweep per node.
  return path.base_hamiltonian() != nullptr ? 1025 : 201;
}

double not_a_number() { return std::numeric_limits<double>::quiet_NaN(); }

CertifiedValue certified(double v) {
  CertifiedValue c;
  c.value = v;
  c.certified = true;
  return c;
}

CertifiedValue uncertified(const std::string& reason) {
  CertifiedValue c;
  c.value = not_a_number();
  c.certified = false;
  c.reason = reason;
  return c;
}

}  // namespace

PathSample sample_path_extrema(const ContactPathSpec& path, int time_nodes,
                               int grid_resolution) {
  const int nodes = resolve_time_nodes(path, time_nodes);
  const double T = path.horizon();
  PathSample out;
  out.times.resize(nodes);
  out.max_values.assign(nodes, 0.0);
  out.min_values.assign(nodes, 0.0);
  for (int k = 0; k < nodes; ++k)
    out.times[k] = T * static_cast<double>(k) / (nodes - 1);

  const AutonomousHamiltonian* H = path.base_hamiltonian();
  if (H != nullptr) {
    const FieldExtrema ex = field_extrema(*H, grid_resolution);
    const Schedule* sch = path.schedule();
    for (int k = 0; k < nodes; ++k) {
      const double factor = sch != nullptr ? sch->da(out.times[k]) : 1.0;
      // max over all of R^{2n} of factor*H, exterior included: the positive
      // branch comes from max H when the factor is positive, from min H when
      // it is negative, and never drops below 0.
      out.max_values[k] = factor >= 0 ? factor * ex.max_value : factor * ex.min_value;
      out.min_values[k] = factor >= 0 ? factor * ex.min_value : factor * ex.max_value;
    }
    return out;
  }

  // General time-dependent Hamiltonian: sweep the support box and a fiber
  // sample set at every time node.
  if (grid_resolution <= 0) grid_resolution = default_grid_resolution(path.dim());
  const PhaseGrid grid(path.support(), grid_resolution);
  const int fiber_samples = path.z_independent() ? 1 : 16;
  for (int k = 0; k < nodes; ++k) {
    double mx = 0.0, mn = 0.0;
    for (std::size_t f = 0; f < grid.node_count(); ++f) {
      const Vec p = grid.node(f);
      for (int zi = 0; zi < fiber_samples; ++zi) {
        const double z = static_cast<double>(zi) / fiber_samples;
        const double v = path.value(out.times[k], p, z);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
      }
    }
    out.max_values[k] = mx;
    out.min_values[k] = mn;
  }
  return out;
}

double shelukhin_length(const ContactPathSpec& path, int grid_resolution,
                        int time_nodes) {
  const PathSample sample = sample_path_extrema(path, time_nodes, grid_resolution);
  const int nodes = static_cast<int>(sample.times.size());
  std::vector<double> integrand(nodes);
  for (int k = 0; k < nodes; ++k)
    integrand[k] = std::max(sample.max_values[k], -sample.min_values[k]);
  const double dt = sample.times[1] - sample.times[0];
  return simpson_uniform(integrand, dt);
}

double t_zero(const AutonomousHamiltonian& H, int resolution) {
  const AdmissibilityReport adm = admissibility_check(H, resolution);
  if (!adm.admissible) {
    std::ostringstream msg;
    msg << "t_zero needs the small-Hessian hypothesis; the bound is "
        << adm.bound;
    throw HypothesisError(msg.str());
  }
  if (!regular_zero_check(H, resolution)) {
    throw HypothesisError(
        "t_zero needs 0 to be a regular value of H inside its support");
  }
  const FieldExtrema ex = field_extrema(H, resolution);
  const double peak = std::max(ex.max_value, -ex.min_value);
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / peak;
}

DiscriminantLength discriminant_length_autonomous(const AutonomousHamiltonian& H,
                                                  int resolution) {
  DiscriminantLength out;
  if (H.is_zero()) {
    // Constant path: 1/t_zero = 0, conventional value floor(0)+1 = 1, and no
    // discriminant point is ever crossed.
    out.value = 1.0;
    out.degenerate = true;
    return out;
  }
  const double t0 = t_zero(H, resolution);
  if (t0 == 0.0) {
    out.infinite = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = static_cast<double>(snapped_floor(1.0 / t0) + 1);
  return out;
}

NormReport norm_report(const AutonomousHamiltonian& H, int resolution) {
  NormReport rep;

  const AdmissibilityReport adm = admissibility_check(H, resolution);
  rep.hypotheses.admissible = adm.admissible;
  rep.hypotheses.hessian_bound = adm.bound;
  rep.hypotheses.regular_zero = regular_zero_check(H, resolution);

  const FieldExtrema ex = field_extrema(H, resolution);
  rep.max_h = ex.max_value;
  rep.min_h = ex.min_value;
  const double scale = std::max(1.0, std::max(ex.max_value, -ex.min_value));
  const bool nonneg = ex.min_value >= -kSignTol * scale;
  const bool nonpos = ex.max_value <= kSignTol * scale;
  rep.hypotheses.sign = nonneg   ? SignClass::NonNegative
                        : nonpos ? SignClass::NonPositive
                                 : SignClass::Mixed;

  if (H.is_zero() || (nonneg && nonpos)) {
    // Identity: every norm vanishes and there is nothing to gate.
    rep.identity = true;
    rep.shelukhin_length = 0.0;
    rep.shelukhin_norm = certified(0.0);
    rep.fpr_norm = certified(0.0);
    rep.discriminant_norm = certified(0.0);
    rep.oscillation_norm = certified(0.0);
    rep.discriminant_length.value = 0.0;
    rep.discriminant_length.degenerate = true;
    return rep;
  }

  rep.shelukhin_length = shelukhin_length(ContactPathSpec::autonomous(H), resolution);

  std::ostringstream hess_reason;
  hess_reason << "Hessian bound " << adm.bound << " is not below 2*pi";
  const double peak = std::max(ex.max_value, -ex.min_value);

  if (adm.admissible) {
    rep.shelukhin_norm = certified(peak);
    rep.fpr_norm = certified(static_cast<double>(
        std::max(snapped_ceil(ex.max_value), snapped_ceil(-ex.min_value))));
  } else {
    rep.shelukhin_norm = uncertified(hess_reason.str());
    rep.fpr_norm = uncertified(hess_reason.str());
  }

  if (adm.admissible && rep.hypotheses.regular_zero) {
    rep.discriminant_norm =
        certified(static_cast<double>(snapped_floor(peak) + 1));
    rep.discriminant_length = discriminant_length_autonomous(H, resolution);
  } else {
    const std::string why = adm.admissible
                                ? "0 is not a regular value inside the support"
                                : hess_reason.str();
    rep.discriminant_norm = uncertified(why);
    rep.discriminant_length.value = not_a_number();
    rep.discriminant_length.degenerate = false;
  }

  if (adm.admissible && rep.hypotheses.regular_zero &&
      rep.hypotheses.sign != SignClass::Mixed) {
    const double side = rep.hypotheses.sign == SignClass::NonNegative
                            ? ex.max_value
                            : -ex.min_value;
    rep.oscillation_norm =
        certified(static_cast<double>(snapped_floor(side) + 1));
  } else if (rep.hypotheses.sign == SignClass::Mixed) {
    rep.oscillation_norm = uncertified("sign-indefinite Hamiltonian");
  } else {
    rep.oscillation_norm = rep.discriminant_norm.certified
                               ? rep.discriminant_norm
                               : uncertified(rep.discriminant_norm.reason);
  }
  return rep;
}

SelectorBoundReport selector_lower_bound_audit(const ContactPathSpec& path,
                                               double c_value,
                                               double c_inverse_value,
                                               int grid_resolution,
                                               int time_nodes,
                                               double tolerance) {
  SelectorBoundReport rep;
  rep.c_value = c_value;
  rep.c_inverse_value = c_inverse_value;
  rep.tolerance = tolerance;

  const PathSample sample =
      sample_path_extrema(path, time_nodes, grid_resolution);
  const int nodes = static_cast<int>(sample.times.size());
  const double dt = sample.times[1] - sample.times[0];
  std::vector<double> upper(nodes), lower(nodes);
  for (int k = 0; k < nodes; ++k) {
    upper[k] = sample.max_values[k];
    lower[k] = sample.min_values[k];
  }
  rep.integral_max = simpson_uniform(upper, dt);
  rep.integral_neg_min = -simpson_uniform(lower, dt);

  rep.slack = rep.integral_max - c_value;
  rep.slack_inverse = rep.integral_neg_min - c_inverse_value;
  rep.equality = std::abs(rep.slack) <= tolerance;
  rep.equality_inverse = std::abs(rep.slack_inverse) <= tolerance;

  if (rep.slack < -tolerance || rep.slack_inverse < -tolerance) {
    std::ostringstream msg;
    msg << "selector lower bound violated: c = " << c_value
        << " vs int max = " << rep.integral_max << ", c_inv = "
        << c_inverse_value << " vs -int min = " << rep.integral_neg_min;
    throw IntegrityError(msg.str());
  }
  return rep;
}

FloorBoundReport floor_lower_bound_audit(const AutonomousHamiltonian& H,
                                         int resolution) {
  FloorBoundReport rep;
  if (H.is_zero()) {
    rep.degenerate = true;
    rep.equality = true;
    return rep;
  }
  const NormReport norms = norm_report(H, resolution);
  if (norms.identity) {
    rep.degenerate = true;
    rep.equality = true;
    return rep;
  }
  if (!norms.discriminant_norm.certified) {
    throw HypothesisError(
        "floor bound audit needs a certified discriminant norm: " +
        norms.discriminant_norm.reason);
  }
  rep.c_value = translation_selector(H, 1.0, resolution);
  rep.c_inverse_value = translation_selector_inverse(H, 1.0, resolution);
  rep.lhs = static_cast<double>(std::max(snapped_floor(rep.c_value) + 1,
                                         snapped_floor(rep.c_inverse_value) + 1));
  rep.rhs = norms.discriminant_norm.value;
  if (rep.lhs > rep.rhs) {
    std::ostringstream msg;
    msg << "floor lower bound violated: max{floor(c)+1, floor(c_inv)+1} = "
        << rep.lhs << " exceeds the discriminant norm " << rep.rhs;
    throw IntegrityError(msg.str());
  }
  rep.equality = rep.lhs == rep.rhs;
  if (!rep.equality) {
    std::ostringstream msg;
    msg << "floor bound is strict (" << rep.lhs << " < " << rep.rhs
        << ") on a class where equality is guaranteed";
    throw IntegrityError(msg.str());
  }
  return rep;
}

}  // namespace contactlab
