#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "contactlab/capacity.hpp"
#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

using namespace contactlab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Shear translating its core at rate -1.25; clears the r = 0.5 cylinder at
// the origin by a quarter unit at time 1.
AutonomousHamiltonian small_shear() {
  ShearParams sp;
  sp.n = 1;
  sp.c = 1.25;
  sp.core_lo = v2(-2.25, -1.0);
  sp.core_hi = v2(1.0, 1.0);
  sp.width = v2(4.0, 4.0);
  return make_shear(sp);
}

// Stronger shear with enough room for the r = 1 cylinder and a wide enough
// taper to stay below the Hessian gate.
AutonomousHamiltonian big_shear() {
  ShearParams sp;
  sp.n = 1;
  sp.c = 2.5;
  sp.core_lo = v2(-4.0, -1.5);
  sp.core_hi = v2(1.5, 1.5);
  sp.width = v2(4.0, 6.0);
  return make_shear(sp);
}

// Same translation with a brutal taper: still displaces, no certificate.
AutonomousHamiltonian steep_shear() {
  ShearParams sp;
  sp.n = 1;
  sp.c = 2.5;
  sp.core_lo = v2(-4.0, -1.5);
  sp.core_hi = v2(1.5, 1.5);
  sp.width = v2(1.0, 1.0);
  return make_shear(sp);
}

}  // namespace

TEST_CASE("cylinder capacity") {
  CHECK(cylinder_capacity(DomainSpec::ball_cylinder(0.5, Vec::Zero(2))) ==
        doctest::Approx(kTwoPi / 8.0).epsilon(1e-14));  // pi/4
  CHECK(cylinder_capacity(DomainSpec::ball_cylinder(1.0, Vec::Zero(2))) ==
        doctest::Approx(kTwoPi / 2.0).epsilon(1e-14));  // pi
  DomainSpec box = DomainSpec::box_cylinder(SupportBox(v2(0, 0), v2(1, 1)));
  CHECK_THROWS_AS(cylinder_capacity(box), std::invalid_argument);
}

TEST_CASE("shear displaces the small cylinder by a quarter unit") {
  const auto U = DomainSpec::ball_cylinder(0.5, Vec::Zero(2));
  const auto rep = displacement_check(small_shear(), U);
  CHECK(rep.displaced);
  CHECK(rep.min_separation == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(rep.certified);
  CHECK(rep.min_separation > rep.margin_required);
  CHECK(rep.base_samples > 0);
  CHECK(rep.fiber_samples > 0);
}

TEST_CASE("the zero flow displaces nothing") {
  const auto U = DomainSpec::ball_cylinder(0.5, Vec::Zero(2));
  const auto rep = displacement_check(make_zero(1), U);
  CHECK_FALSE(rep.displaced);
  CHECK_FALSE(rep.certified);
}

TEST_CASE("capacity-energy audit on the small cylinder") {
  const auto U = DomainSpec::ball_cylinder(0.5, Vec::Zero(2));
  const auto rep = capacity_energy_audit(small_shear(), U);
  CHECK(rep.capacity == doctest::Approx(kTwoPi / 8.0).epsilon(1e-12));
  CHECK(rep.ceil_capacity == 1.0);
  CHECK_FALSE(rep.hypothesis_gap);
  CHECK(rep.all_ok);
  CHECK(rep.displacement.certified);

  // The shear is odd in y: the oscillation norm is withheld, the other
  // three certified norms enter the audit.
  REQUIRE(rep.slacks.size() == 3);
  for (const auto& s : rep.slacks) {
    CHECK(s.required == 0.5);
    CHECK(s.norm_ceil >= s.required);
    CHECK(s.slack == s.norm_ceil - s.required);
  }
  CHECK(rep.slacks[0].name == "shelukhin");
  CHECK(rep.slacks[0].norm_ceil == 3.0);  // ceil(2.3948)

  CHECK(rep.c_value == doctest::Approx(2.394802).epsilon(2e-4));
  CHECK(rep.c_inverse_value == doctest::Approx(2.394802).epsilon(2e-4));
  CHECK(rep.sandon_lhs == 1.0);
  CHECK(rep.sandon_rhs == 6.0);
  CHECK(rep.sandon_ok);
}

TEST_CASE("capacity-energy audit on the unit cylinder") {
  const auto H = big_shear();
  const auto U = DomainSpec::ball_cylinder(1.0, Vec::Zero(2));

  const auto disp = displacement_check(H, U);
  CHECK(disp.displaced);
  CHECK(disp.min_separation == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(disp.certified);

  const auto rep = capacity_energy_audit(H, U);
  CHECK(rep.ceil_capacity == 4.0);  // ceil(pi)
  CHECK_FALSE(rep.hypothesis_gap);
  CHECK(rep.all_ok);
  REQUIRE(rep.slacks.size() == 3);
  for (const auto& s : rep.slacks) {
    CHECK(s.required == 2.0);
    CHECK(s.norm_ceil >= 2.0);
  }
  CHECK(rep.sandon_lhs == 4.0);
  CHECK(rep.sandon_ok);
}

TEST_CASE("audit refuses a non-displacing flow") {
  const auto U = DomainSpec::ball_cylinder(0.5, Vec::Zero(2));
  CHECK_THROWS_AS(capacity_energy_audit(make_zero(1), U), HypothesisError);
  // A bump centered on the cylinder just stirs it.
  CHECK_THROWS_AS(capacity_energy_audit(make_radial_bump(5.7739, 2.5, 1), U),
                  HypothesisError);
}

TEST_CASE("displacing but inadmissible: the gap is reported, not hidden") {
  const auto H = steep_shear();
  const auto U = DomainSpec::ball_cylinder(0.5, Vec::Zero(2));
  const auto rep = capacity_energy_audit(H, U);
  CHECK(rep.hypothesis_gap);
  CHECK(rep.all_ok);  // nothing asserted, nothing violated
  CHECK(rep.slacks.empty());
  CHECK(rep.displacement.displaced);
  CHECK_FALSE(rep.norms.hypotheses.admissible);
  CHECK(rep.norms.shelukhin_length > 0.0);
}
