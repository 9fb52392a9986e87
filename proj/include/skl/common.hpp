#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace skl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy; the CLI maps each class to a distinct exit code.
struct schema_error : std::runtime_error {        // exit 2
  using std::runtime_error::runtime_error;
};
struct measure_error : std::runtime_error {       // exit 3
  using std::runtime_error::runtime_error;
};
struct degeneration_error : std::runtime_error {  // exit 4
  using std::runtime_error::runtime_error;
};
struct not_in_range_error : std::runtime_error {  // exit 5
  using std::runtime_error::runtime_error;
};

// Neumaier compensated accumulator. All inner products and moment sums in the
// library go through this; plain += is reserved for error-insensitive tallies.
struct neumaier {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline double csum(const Vec& v) {
  neumaier a;
  for (Eigen::Index i = 0; i < v.size(); ++i) a.add(v[i]);
  return a.value();
}

inline double cdot(const Vec& a, const Vec& b) {
  neumaier acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

inline double cdot3(const Vec& a, const Vec& b, const Vec& c) {
  neumaier acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc.add(a[i] * b[i] * c[i]);
  return acc.value();
}

// Deterministic RNG: splitmix64 bits with hand-rolled transforms, so streams
// are identical across standard libraries (std::normal_distribution is not).
struct rng64 {
  explicit rng64(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {
    for (int i = 0; i < 8; ++i) next();  // warm up
  }
  std::uint64_t next() {
    // splitmix64 step; deterministic and fully portable
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // (0,1)
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u = uniform(), v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double th = 6.283185307179586476925286766559 * v;
    spare = r * std::sin(th);
    have_spare = true;
    return r * std::cos(th);
  }
  Vec unit_vector(int dim) {
    Vec x(dim);
    double n2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) x[i] = normal();
      n2 = x.squaredNorm();
    } while (n2 < 1e-300);
    return x / std::sqrt(n2);
  }
  std::uint64_t state;
  bool have_spare = false;
  double spare = 0.0;
};

inline constexpr double kSqrt2 = 1.4142135623730950488016887242097;

}  // namespace skl
