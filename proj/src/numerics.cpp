#include "contactlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace contactlab {

double simpson_uniform(const std::vector<double>& samples, double dt) {
  const std::size_t n = samples.size();
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument(
        "simpson_uniform: need an odd sample count >= 3 (even intervals)");
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i + 1 < n; i += 2) odd += samples[i];
  for (std::size_t i = 2; i + 1 < n; i += 2) even += samples[i];
  return dt / 3.0 * (samples.front() + samples.back() + 4.0 * odd + 2.0 * even);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_intervals) {
  if (n_intervals < 2) n_intervals = 2;
  if (n_intervals % 2 != 0) ++n_intervals;
  const double h = (b - a) / n_intervals;
  std::vector<double> s(static_cast<std::size_t>(n_intervals) + 1);
  for (int i = 0; i <= n_intervals; ++i) s[i] = f(a + h * i);
  return simpson_uniform(s, h);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("fft_inplace: size must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

RefineResult refine_maximum(const std::function<double(const Vec&)>& f,
                            const Vec& start, double initial_step,
                            double min_step, const SupportBox& clamp_box) {
  RefineResult r;
  r.argmax = start;
  r.value = f(start);
  r.evaluations = 1;
  const int d = static_cast<int>(start.size());
  double step = initial_step;
  auto clamp = [&](Vec p) {
    if (!clamp_box.empty())
      for (int i = 0; i < d; ++i)
        p[i] = std::clamp(p[i], clamp_box.lo[i], clamp_box.hi[i]);
    return p;
  };
  int guard = 0;
  while (step > min_step && guard++ < 20000) {
    bool improved = false;
    for (int axis = 0; axis < d; ++axis) {
      for (double sgn : {1.0, -1.0}) {
        Vec trial = r.argmax;
        trial[axis] += sgn * step;
        trial = clamp(trial);
        const double v = f(trial);
        ++r.evaluations;
        if (v > r.value) {
          r.value = v;
          r.argmax = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return r;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& p,
                double step) {
  const int d = static_cast<int>(p.size());
  Vec g(d);
  Vec q = p;
  for (int i = 0; i < d; ++i) {
    q[i] = p[i] + step;
    const double fp = f(q);
    q[i] = p[i] - step;
    const double fm = f(q);
    q[i] = p[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& p,
               double step) {
  const int d = static_cast<int>(p.size());
  Mat h(d, d);
  const double f0 = f(p);
  Vec q = p;
  for (int i = 0; i < d; ++i) {
    q[i] = p[i] + step;
    const double fp = f(q);
    q[i] = p[i] - step;
    const double fm = f(q);
    q[i] = p[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      q = p;
      q[i] += step; q[j] += step;
      const double fpp = f(q);
      q[j] -= 2.0 * step;
      const double fpm = f(q);
      q[i] -= 2.0 * step;
      const double fmm = f(q);
      q[j] += 2.0 * step;
      const double fmp = f(q);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

long snapped_floor(double v, double tol) {
  const double r = std::round(v);
  if (std::abs(v - r) <= tol) return static_cast<long>(r);
  return static_cast<long>(std::floor(v));
}

long snapped_ceil(double v, double tol) {
  const double r = std::round(v);
  if (std::abs(v - r) <= tol) return static_cast<long>(r);
  return static_cast<long>(std::ceil(v));
}

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9E3779B97f4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  // 53 random bits into [0,1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double SplitMix64::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do { u1 = uniform(); } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

PhaseGrid::PhaseGrid(const SupportBox& box, int resolution) {
  if (box.empty())
    throw std::invalid_argument("PhaseGrid: empty support box");
  if (resolution < 2)
    throw std::invalid_argument("PhaseGrid: resolution must be >= 2");
  lo = box.lo;
  hi = box.hi;
  res = resolution;
  d = static_cast<int>(lo.size());
}

std::size_t PhaseGrid::node_count() const {
  std::size_t c = 1;
  for (int i = 0; i < d; ++i) c *= nodes_per_axis();
  return c;
}

double PhaseGrid::max_spacing() const {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s = std::max(s, axis_spacing(i));
  return s;
}

void PhaseGrid::to_multi(std::size_t flat, int* idx) const {
  const std::size_t npa = nodes_per_axis();
  for (int i = d - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % npa);
    flat /= npa;
  }
}

std::size_t PhaseGrid::to_flat(const int* idx) const {
  const std::size_t npa = nodes_per_axis();
  std::size_t flat = 0;
  for (int i = 0; i < d; ++i) flat = flat * npa + static_cast<std::size_t>(idx[i]);
  return flat;
}

Vec PhaseGrid::node_multi(const int* idx) const {
  Vec p(d);
  for (int i = 0; i < d; ++i) p[i] = lo[i] + axis_spacing(i) * idx[i];
  return p;
}

Vec PhaseGrid::node(std::size_t flat) const {
  int idx[8];
  to_multi(flat, idx);
  return node_multi(idx);
}

bool PhaseGrid::on_boundary(const int* idx) const {
  for (int i = 0; i < d; ++i)
    if (idx[i] == 0 || idx[i] == res) return true;
  return false;
}

std::size_t PhaseGrid::nearest_node(const Vec& p) const {
  int idx[8];
  for (int i = 0; i < d; ++i) {
    const double u = (p[i] - lo[i]) / axis_spacing(i);
    idx[i] = std::clamp(static_cast<int>(std::lround(u)), 0, res);
  }
  return to_flat(idx);
}

std::vector<std::uint8_t> exterior_zero_mask(
    const std::function<double(const Vec&)>& value, const PhaseGrid& grid,
    double threshold) {
  const std::size_t count = grid.node_count();
  std::vector<std::uint8_t> zero(count, 0), visited(count, 0);
  for (std::size_t f = 0; f < count; ++f)
    zero[f] = std::abs(value(grid.node(f))) <= threshold ? 1 : 0;

  std::deque<std::size_t> queue;
  int idx[8];
  for (std::size_t f = 0; f < count; ++f) {
    if (!zero[f]) continue;
    grid.to_multi(f, idx);
    if (grid.on_boundary(idx)) {
      visited[f] = 1;
      queue.push_back(f);
    }
  }
  while (!queue.empty()) {
    const std::size_t f = queue.front();
    queue.pop_front();
    grid.to_multi(f, idx);
    for (int axis = 0; axis < grid.d; ++axis) {
      for (int delta : {-1, 1}) {
        const int old = idx[axis];
        const int next = old + delta;
        if (next < 0 || next > grid.res) continue;
        idx[axis] = next;
        const std::size_t nf = grid.to_flat(idx);
        idx[axis] = old;
        if (zero[nf] && !visited[nf]) {
          visited[nf] = 1;
          queue.push_back(nf);
        }
      }
    }
  }
  return visited;
}

}  // namespace contactlab
