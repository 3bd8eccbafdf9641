#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "contactlab/critical.hpp"
#include "contactlab/hamiltonian.hpp"
#include "contactlab/hessian.hpp"
#include "contactlab/numerics.hpp"
#include "contactlab/serialize.hpp"
#include "contactlab/types.hpp"

using namespace contactlab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Deterministic sample points inside a support box.
std::vector<Vec> sample_points(const SupportBox& box, int count,
                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Vec> pts;
  for (int k = 0; k < count; ++k) {
    Vec p(box.dim());
    for (int i = 0; i < box.dim(); ++i)
      p[i] = rng.uniform(box.lo[i], box.hi[i]);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("bump profile closed-form values") {
  // f_B(x) = exp(-B^2 / (x^2 - B)^2); at B = 1, x = 1/2 the exponent is
  // -1 / (3/4)^2 = -16/9.
  CHECK(eval_bump_profile(1.0, 0.5) ==
        doctest::Approx(std::exp(-16.0 / 9.0)).epsilon(1e-14));
  CHECK(eval_bump_profile(1.0, 0.5) ==
        doctest::Approx(0.1690133154060661).epsilon(1e-13));
  // Peak value e^{-1} for every B.
  for (double B : {0.5, 1.0, 2.5, 7.0})
    CHECK(eval_bump_profile(B, 0.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // Identically zero from the support edge outward.
  CHECK(eval_bump_profile(2.5, std::sqrt(2.5)) == 0.0);
  CHECK(eval_bump_profile(2.5, 2.0) == 0.0);
  CHECK_THROWS_AS(eval_bump_profile(0.0, 0.1), std::domain_error);
}

TEST_CASE("smooth step and plateau") {
  CHECK(smooth_step(-1.0).s == 0.0);
  CHECK(smooth_step(0.0).s == 0.0);
  CHECK(smooth_step(1.0).s == 1.0);
  CHECK(smooth_step(2.0).s == 1.0);
  CHECK(smooth_step(0.5).s == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double s = smooth_step(k / 40.0).s;
    CHECK(s >= prev);
    prev = s;
  }
  // Derivative against finite differences at a few interior points.
  for (double t : {0.2, 0.45, 0.8}) {
    const double h = 1e-6;
    const double fd = (smooth_step(t + h).s - smooth_step(t - h).s) / (2 * h);
    CHECK(smooth_step(t).ds == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(plateau(0.0, -1.0, 1.0, 0.5).s == 1.0);
  CHECK(plateau(1.0, -1.0, 1.0, 0.5).s == 1.0);
  CHECK(plateau(1.6, -1.0, 1.0, 0.5).s == 0.0);
  CHECK(plateau(-1.25, -1.0, 1.0, 0.5).s ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("radial bump normalization and support") {
  const auto H = make_radial_bump(2.5, 2.5, 1);
  CHECK(H.value(v2(0, 0)) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(H.gradient(v2(0, 0)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  const double r = std::sqrt(2.5);
  CHECK(H.support().lo[0] == doctest::Approx(-r));
  CHECK(H.support().hi[1] == doctest::Approx(r));
  CHECK(H.value(v2(r + 0.01, 0)) == 0.0);
  CHECK(H.value(v2(1.2, 1.2)) == 0.0);  // corner of the box, radius > sqrt(B)
  CHECK(H.value(v2(0.7, 0.3)) > 0.0);

  const auto S = make_radial_bump(2.5, 2.5, 1, Vec(), -2.0);
  CHECK(S.value(v2(0, 0)) == doctest::Approx(-5.0).epsilon(1e-14));

  Vec c = v2(3.0, -1.0);
  const auto Hc = make_radial_bump(2.5, 1.0, 1, c);
  CHECK(Hc.value(c) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Hc.value(v2(0, 0)) == 0.0);
}

TEST_CASE("quadratic core is exactly harmonic inside the cutoff") {
  const double a = 2.0;
  const auto H = make_quadratic_core(a, 3.0, 1.0, 1);
  for (const Vec& p : {v2(1, 0), v2(0.3, -0.7), v2(-2, 1.5)}) {
    CHECK(H.value(p) == doctest::Approx(0.5 * a * p.squaredNorm()).epsilon(1e-14));
    CHECK((H.gradient(p) - a * p).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((H.hessian(p) - a * Mat::Identity(2, 2)).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(H.value(v2(4.1, 0)) == 0.0);  // beyond cutoff + width
  CHECK(H.support().hi[0] == doctest::Approx(4.0));
}

TEST_CASE("ring bump vanishes on the inner disk inside its own support") {
  const auto H = make_ring_bump(0.5, 1.5, 1.0, 1);
  CHECK(H.value(v2(0, 0)) == 0.0);
  CHECK(H.value(v2(0.2, 0.1)) == 0.0);
  // Peak value A on the circle r^2 = (r_inner^2 + r_outer^2)/2.
  CHECK(H.value(v2(std::sqrt(1.25), 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(H.value(v2(1.0, 0)) ==
        doctest::Approx(std::exp(-1.0 / 15.0)).epsilon(1e-12));
  CHECK(H.value(v2(1.6, 0)) == 0.0);
  CHECK(H.support().contains(v2(0, 0)));  // the zero disk is in the box
  // 0 is consequently not a regular value inside the support...
  CHECK_FALSE(regular_zero_check(H));
  // ... while for a definite bump it is.
  CHECK(regular_zero_check(make_radial_bump(2.5, 2.5, 1)));
}

TEST_CASE("shear values and frozen extrema") {
  ShearParams sp;
  sp.n = 1;
  sp.c = 1.25;
  sp.core_lo = v2(-2.25, -1.0);
  sp.core_hi = v2(1.0, 1.0);
  sp.width = v2(4.0, 4.0);
  const auto H = make_shear(sp);
  // Exactly c * y_1 on the core.
  CHECK(H.value(v2(0, 0.5)) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(H.value(v2(-2.0, -1.0)) == doctest::Approx(-1.25).epsilon(1e-14));
  CHECK(H.value(v2(6.0, 0.5)) == 0.0);
  // The y-profile is symmetric, so the field is odd in y.
  const auto ex = field_extrema(H);
  CHECK(ex.max_value == doctest::Approx(2.394802).epsilon(2e-4));
  CHECK(ex.min_value == doctest::Approx(-ex.max_value).epsilon(1e-10));
}

TEST_CASE("sum of signed bumps attains the component peaks") {
  const auto plus = make_radial_bump(2.5, 1.0, 1, v2(-4, 0));
  const auto minus = make_radial_bump(5.0, 1.0, 1, v2(4, 0), -2.0);
  const auto H = make_sum({plus, minus});
  CHECK(H.value(v2(-4, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(H.value(v2(4, 0)) == doctest::Approx(-2.0).epsilon(1e-14));
  const auto ex = field_extrema(H);
  CHECK(ex.max_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ex.min_value == doctest::Approx(-2.0).epsilon(1e-9));
  // Hull support box.
  CHECK(H.support().lo[0] == doctest::Approx(-4 - std::sqrt(2.5)));
  CHECK(H.support().hi[0] == doctest::Approx(4 + std::sqrt(5.0)));
}

TEST_CASE("zero Hamiltonian") {
  const auto H = make_zero(1);
  CHECK(H.is_zero());
  CHECK(H.value(v2(0.3, 0.4)) == 0.0);
  CHECK(H.gradient(v2(1, 1)).norm() == 0.0);
  const auto ex = field_extrema(H);
  CHECK(ex.max_value == 0.0);
  CHECK(ex.min_value == 0.0);
  CHECK(global_hessian_bound(H).bound == 0.0);
}

TEST_CASE("analytic derivatives match finite differences") {
  std::vector<AutonomousHamiltonian> family;
  family.push_back(make_radial_bump(2.5, 2.5, 1));
  family.push_back(make_radial_bump(5.0, 1.0, 1, v2(0.5, -0.25), -1.5));
  family.push_back(make_quadratic_core(2.0, 2.0, 1.5, 1));
  family.push_back(make_ring_bump(0.5, 1.5, 1.0, 1));
  {
    ShearParams sp;
    sp.n = 1;
    sp.c = 1.25;
    sp.core_lo = v2(-2.25, -1.0);
    sp.core_hi = v2(1.0, 1.0);
    sp.width = v2(4.0, 4.0);
    family.push_back(make_shear(sp));
  }
  family.push_back(make_sum({family[0], family[1]}));

  std::uint64_t seed = 11;
  for (const auto& H : family) {
    CAPTURE(H.label());
    for (const Vec& p : sample_points(H.support(), 12, seed++)) {
      const auto f = [&H](const Vec& q) { return H.value(q); };
      const Vec g = H.gradient(p);
      const Vec g_fd = fd_gradient(f, p, 1e-5);
      CHECK((g - g_fd).norm() <= 2e-5 * (1.0 + g.norm()));
      const Mat h = H.hessian(p);
      const Mat h_fd = fd_hessian(f, p, 1e-4);
      CHECK((h - h_fd).norm() <= 5e-4 * (1.0 + h.norm()));
      CHECK((h - h.transpose()).norm() <= 1e-12 * (1.0 + h.norm()));
    }
  }
}

TEST_CASE("critical points of a bump: interior maximum plus frozen exterior") {
  const auto H = make_radial_bump(5.7739, 2.5, 1);
  const auto rep = critical_points(H);
  bool found_max = false;
  bool found_exterior = false;
  for (const auto& cp : rep.points) {
    if (cp.exterior_rep) {
      found_exterior = true;
      CHECK(cp.value == 0.0);
      // The constant exterior is flat: all-zero inertia.
      CHECK(cp.hessian_signature[0] == 0);
      CHECK(cp.hessian_signature[1] == 2);
      CHECK(cp.hessian_signature[2] == 0);
      continue;
    }
    if (std::abs(cp.value - 2.5) < 1e-6) {
      found_max = true;
      CHECK(cp.location.norm() < 1e-6);
      CHECK(cp.gradient_residual < 1e-8);
      // Negative definite Hessian at the peak: inertia (0, 0, 2).
      CHECK(cp.hessian_signature[0] == 0);
      CHECK(cp.hessian_signature[1] == 0);
      CHECK(cp.hessian_signature[2] == 2);
    }
  }
  CHECK(found_max);
  CHECK(found_exterior);
}

TEST_CASE("Hessian bound of the bump family scales as A/B") {
  // For the normalized radial bump the Hessian operator norm scales exactly
  // like A/B: sup |Hess| = C * A / B with a single profile constant C.
  const double C = 14.509051;
  for (double B : {2.0, 4.0, 8.0}) {
    const auto H = make_radial_bump(B, 1.0, 1);
    const double b = global_hessian_bound(H).bound;
    CHECK(b * B == doctest::Approx(C).epsilon(5e-4));
  }
  const auto H = make_radial_bump(4.0, 3.0, 1);
  CHECK(global_hessian_bound(H).bound ==
        doctest::Approx(C * 3.0 / 4.0).epsilon(5e-4));
}

TEST_CASE("admissibility gate and minimal width B0") {
  struct Row {
    double A, B0;
  };
  // Frozen reference values; B0(A) is linear in A because of the A/B scaling.
  for (const Row row : {Row{0.5, 1.15532}, Row{1.0, 2.30962},
                        Row{2.5, 5.77405}, Row{7.3, 16.86328}}) {
    const double B0 = compute_B0(row.A, 1);
    CHECK(B0 == doctest::Approx(row.B0).epsilon(5e-3));
    const auto adm = admissibility_check(make_radial_bump(B0, row.A, 1));
    CHECK(adm.admissible);
    CHECK(adm.bound < kTwoPi);
    // Slightly narrower fails the gate.
    CHECK_FALSE(
        admissibility_check(make_radial_bump(0.97 * B0, row.A, 1)).admissible);
  }
}

TEST_CASE("quadratic core with a steep slope is rejected by the gate") {
  const auto H = make_quadratic_core(7.0, 2.0, 4.0, 1);
  const auto adm = admissibility_check(H);
  CHECK_FALSE(adm.admissible);
  CHECK(adm.bound == doctest::Approx(46.3124).epsilon(2e-3));
  CHECK(adm.bound >= 7.0);  // at least the core curvature
}

TEST_CASE("Hamiltonians from JSON agree with the factories") {
  using nlohmann::json;
  const json specs = json::parse(R"([
    {"kind": "zero", "n": 1},
    {"kind": "radial_bump", "n": 1, "B": 2.5, "A": 2.5},
    {"kind": "radial_bump", "n": 1, "B": 5.0, "A": 1.0,
     "center": [4.0, 0.0], "scale": -2.0},
    {"kind": "quadratic_core", "n": 1, "a": 2.0, "cutoff_radius": 3.0,
     "transition_width": 1.0},
    {"kind": "ring_bump", "n": 1, "r_inner": 0.5, "r_outer": 1.5, "A": 1.0},
    {"kind": "shear", "n": 1, "c": 1.25, "core_lo": [-2.25, -1.0],
     "core_hi": [1.0, 1.0], "width": 4.0},
    {"kind": "sum", "terms": [
      {"kind": "radial_bump", "n": 1, "B": 2.5, "A": 1.0, "center": [-4.0, 0.0]},
      {"kind": "radial_bump", "n": 1, "B": 5.0, "A": 1.0,
       "center": [4.0, 0.0], "scale": -2.0}]}
  ])");

  std::vector<AutonomousHamiltonian> direct;
  direct.push_back(make_zero(1));
  direct.push_back(make_radial_bump(2.5, 2.5, 1));
  direct.push_back(make_radial_bump(5.0, 1.0, 1, v2(4, 0), -2.0));
  direct.push_back(make_quadratic_core(2.0, 3.0, 1.0, 1));
  direct.push_back(make_ring_bump(0.5, 1.5, 1.0, 1));
  {
    ShearParams sp;
    sp.n = 1;
    sp.c = 1.25;
    sp.core_lo = v2(-2.25, -1.0);
    sp.core_hi = v2(1.0, 1.0);
    sp.width = v2(4.0, 4.0);
    direct.push_back(make_shear(sp));
  }
  direct.push_back(make_sum({make_radial_bump(2.5, 1.0, 1, v2(-4, 0)),
                             make_radial_bump(5.0, 1.0, 1, v2(4, 0), -2.0)}));

  REQUIRE(specs.size() == direct.size());
  SplitMix64 rng(77);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto H = hamiltonian_from_json(specs[k]);
    CAPTURE(k);
    for (int s = 0; s < 20; ++s) {
      const Vec p = v2(rng.uniform(-6, 6), rng.uniform(-3, 3));
      CHECK(H.value(p) == doctest::Approx(direct[k].value(p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("JSON Hamiltonian parsing rejects malformed specs") {
  using nlohmann::json;
  CHECK_THROWS_AS(hamiltonian_from_json(json::parse(R"({"n": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      hamiltonian_from_json(json::parse(R"({"kind": "pyramid", "n": 1})")),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      hamiltonian_from_json(json::parse(
          R"({"kind": "radial_bump", "n": 1, "B": 2.5, "A": 1.0, "extra": 3})")),
      doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_AS(hamiltonian_from_json(json::parse(
                      R"({"kind": "radial_bump", "n": 1, "B": -2.5, "A": 1.0})")),
                  std::domain_error);
  CHECK_THROWS_AS(hamiltonian_from_json(json::parse(
                      R"({"kind": "radial_bump", "n": 1, "B": "wide", "A": 1.0})")),
                  std::invalid_argument);
}
