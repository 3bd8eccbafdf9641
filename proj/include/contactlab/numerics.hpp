#pragma once

// Small numerical utilities shared by the library: composite Simpson
// quadrature, a radix-2 FFT, compass-search local refinement, deterministic
// random numbers, integer snapping, and uniform phase-space grids with a
// boundary flood fill used to separate the numerical support of a Hamiltonian
// from the zero region that is connected to the box boundary.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "contactlab/types.hpp"

namespace contactlab {

// ---------------------------------------------------------------------------
// Quadrature

// Composite Simpson rule over uniformly spaced samples (even interval count).
double simpson_uniform(const std::vector<double>& samples, double dt);

// Composite Simpson rule for a callable; n_intervals is rounded up to even.
double simpson(const std::function<double(double)>& f, double a, double b,
               int n_intervals);

// ---------------------------------------------------------------------------
// FFT (iterative radix-2, in place).  size must be a power of two.

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);
bool is_power_of_two(std::size_t n);

// ---------------------------------------------------------------------------
// Derivative-free local refinement (compass search).

struct RefineResult {
  Vec argmax;
  double value;
  int evaluations = 0;
};

// Maximizes f near `start`, clamped to [lo, hi] when the box is non-empty.
// Steps shrink from `initial_step` down to `min_step`.
RefineResult refine_maximum(const std::function<double(const Vec&)>& f,
                            const Vec& start, double initial_step,
                            double min_step, const SupportBox& clamp_box);

// ---------------------------------------------------------------------------
// Finite differences for scalar fields (central stencils; the Hessian is
// symmetric by construction).

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& p,
                double step);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& p,
               double step);

// ---------------------------------------------------------------------------
// Integer snapping: floor/ceil that treat values within `tol` of an integer
// as that integer, so formulas with integer parts are robust at boundaries.

long snapped_floor(double v, double tol = 1e-9);
long snapped_ceil(double v, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Deterministic random numbers (identical across platforms and runs).

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double gaussian();                      // standard normal (Box-Muller)

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Uniform grid over a phase-space box with res cells (res+1 nodes) per axis.

struct PhaseGrid {
  Vec lo, hi;
  int res = 0;  // cells per axis; nodes per axis = res + 1
  int d = 0;    // phase dimension (2n)

  PhaseGrid() = default;
  PhaseGrid(const SupportBox& box, int resolution);

  std::size_t nodes_per_axis() const { return static_cast<std::size_t>(res) + 1; }
  std::size_t node_count() const;
  double axis_spacing(int axis) const { return (hi[axis] - lo[axis]) / res; }
  double max_spacing() const;

  void to_multi(std::size_t flat, int* idx) const;
  std::size_t to_flat(const int* idx) const;
  Vec node(std::size_t flat) const;
  Vec node_multi(const int* idx) const;
  bool on_boundary(const int* idx) const;
  std::size_t nearest_node(const Vec& p) const;
};

// Marks every grid node whose |H| <= threshold and which is connected to the
// box boundary through nodes with |H| <= threshold (face-adjacent steps).
// Returned mask: 1 = "exterior zero region", 0 = otherwise.
std::vector<std::uint8_t> exterior_zero_mask(
    const std::function<double(const Vec&)>& value, const PhaseGrid& grid,
    double threshold);

}  // namespace contactlab
