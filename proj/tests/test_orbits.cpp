#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "contactlab/hamiltonian.hpp"
#include "contactlab/numerics.hpp"
#include "contactlab/orbits.hpp"
#include "contactlab/types.hpp"

using namespace contactlab;

namespace {

// Closed loop gamma(k/N), k = 0..N, from trigonometric coefficient pairs
// (cos, sin) per frequency and coordinate; zero-mean derivative and exact
// endpoint closure by construction.
std::vector<Vec> trig_loop(const std::vector<std::vector<double>>& cos_coef,
                           const std::vector<std::vector<double>>& sin_coef,
                           int samples) {
  const int d = static_cast<int>(cos_coef.size());
  std::vector<Vec> out;
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    Vec p = Vec::Zero(d);
    for (int i = 0; i < d; ++i)
      for (std::size_t m = 0; m < cos_coef[i].size(); ++m) {
        const double w = kTwoPi * static_cast<double>(m + 1) * t;
        p[i] += cos_coef[i][m] * std::cos(w) + sin_coef[i][m] * std::sin(w);
      }
    out.push_back(p);
  }
  out.back() = out.front();
  return out;
}

}  // namespace

TEST_CASE("power-of-two helper") {
  CHECK(is_power_of_two(128));
  CHECK(is_power_of_two(256));
  CHECK_FALSE(is_power_of_two(100));
  CHECK_FALSE(is_power_of_two(0));
}

TEST_CASE("loop inequality: equality on a single-mode circle") {
  const auto loop = trig_loop({{1.0}, {0.0}}, {{0.0}, {1.0}}, 256);
  const auto rep = loop_parseval_check(loop);
  CHECK(rep.ok);
  CHECK(rep.velocity_norm == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(std::abs(rep.margin) <= 1e-9);
}

TEST_CASE("loop inequality: strict slack with a second harmonic") {
  const auto loop =
      trig_loop({{1.0, 0.5}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.5}}, 256);
  const auto rep = loop_parseval_check(loop);
  CHECK(rep.ok);
  CHECK(rep.margin > 0.1);
}

TEST_CASE("loop inequality holds for random trigonometric loops") {
  SplitMix64 rng(424242);
  for (int trial = 0; trial < 20; ++trial) {
    const int degree = 1 + static_cast<int>(rng.next_u64() % 8);
    std::vector<std::vector<double>> c(2), s(2);
    for (int i = 0; i < 2; ++i)
      for (int m = 1; m <= degree; ++m) {
        c[i].push_back(rng.gaussian() / (1.0 + m));
        s[i].push_back(rng.gaussian() / (1.0 + m));
      }
    const auto rep = loop_parseval_check(trig_loop(c, s, 512));
    CAPTURE(trial);
    CHECK(rep.velocity_norm <= rep.bound + 1e-9);
    CHECK(rep.ok);
  }
}

TEST_CASE("loop inequality rejects bad sampling") {
  auto loop = trig_loop({{1.0}, {0.0}}, {{0.0}, {1.0}}, 100);
  CHECK_THROWS_AS(loop_parseval_check(loop), std::domain_error);
  loop = trig_loop({{1.0}, {0.0}}, {{0.0}, {1.0}}, 256);
  loop.back()[0] += 1e-6;  // break the closure
  CHECK_THROWS_AS(loop_parseval_check(loop), std::domain_error);
}

TEST_CASE("no short orbits below the resonance slope") {
  // a = 6 rotates slower than one turn per unit time everywhere, and the
  // wide transition keeps the tail slower than the core.
  const auto H = make_quadratic_core(6.0, 2.0, 4.0, 1);
  const auto rep = find_periodic_orbits(H, 1.0, 48, 128);
  CHECK(rep.orbits.empty());
  CHECK(rep.unresolved.empty());
}

TEST_CASE("core orbits at a = 7 have period 2 pi / 7") {
  const auto H = make_quadratic_core(7.0, 2.0, 4.0, 1);
  const auto rep = find_periodic_orbits(H, 1.0, 48, 128);
  REQUIRE(!rep.orbits.empty());
  CHECK(rep.unresolved.empty());
  const double T_core = kTwoPi / 7.0;
  bool found_core = false;
  for (const auto& o : rep.orbits) {
    CHECK(o.nonconstant);
    CHECK(o.closure_residual <= 2e-7 * (1.0 + o.seed.norm()));
    CHECK(o.period >= T_core - 1e-6);  // nothing rotates faster than the core
    CHECK(o.period <= 1.0 + 1e-9);
    if (std::abs(o.period - T_core) <= 1e-4) {
      found_core = true;
      CHECK(o.max_displacement > 0.5);  // genuine loop, not a drifting point
    }
  }
  CHECK(found_core);
}

TEST_CASE("slope just past one turn per unit time") {
  const double a = kTwoPi + 0.2;
  const auto H = make_quadratic_core(a, 2.0, 4.0, 1);
  const auto rep = find_periodic_orbits(H, 1.0, 48, 128);
  REQUIRE(!rep.orbits.empty());
  bool found = false;
  for (const auto& o : rep.orbits)
    if (std::abs(o.period - kTwoPi / a) <= 1e-4) found = true;
  CHECK(found);
}

TEST_CASE("small-Hessian certificate on an admissible bump") {
  const auto H = make_radial_bump(5.7739, 2.5, 1);
  const auto cert = hessian_period_certificate(H, 48, 128);
  CHECK(cert.bound < kTwoPi);
  CHECK(cert.orbits_found == 0);
  CHECK(cert.consistent);
  CHECK(cert.search.orbits.empty());
}

TEST_CASE("certificate stays consistent above the threshold") {
  // Bound >= 2 pi promises nothing: finding orbits is consistent.
  const auto H = make_quadratic_core(7.0, 2.0, 4.0, 1);
  const auto cert = hessian_period_certificate(H, 48, 128);
  CHECK(cert.bound >= kTwoPi);
  CHECK(cert.orbits_found >= 1);
  CHECK(cert.consistent);
}
