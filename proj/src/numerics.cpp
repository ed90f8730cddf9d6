#include "tgflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgflow::numerics {

std::vector<double> gradient(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> g(n, 0.0);
  if (n < 2) return g;
  g[0] = (f[1] - f[0]) / h;
  g[n - 1] = (f[n - 1] - f[n - 2]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  return g;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
  if (x.size() != f.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  }
  return s;
}

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double signal_norm(std::span<const double> f, double dt, NormIndex p) {
  switch (p) {
    case NormIndex::Linf:
      return max_abs(f);
    case NormIndex::L1: {
      std::vector<double> a(f.size());
      std::transform(f.begin(), f.end(), a.begin(),
                     [](double v) { return std::abs(v); });
      return trapezoid(a, dt);
    }
    case NormIndex::L2: {
      std::vector<double> a(f.size());
      std::transform(f.begin(), f.end(), a.begin(),
                     [](double v) { return v * v; });
      return std::sqrt(trapezoid(a, dt));
    }
  }
  return 0.0;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace tgflow::numerics
