#pragma once

#include <span>
#include <vector>

namespace tgflow::numerics {

// Derivative on a uniform grid: central differences inside, first-order
// one-sided differences at both ends.
std::vector<double> gradient(std::span<const double> f, double h);

// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> f, double h);

// Composite trapezoid rule on arbitrary abscissae.
double trapezoid(std::span<const double> x, std::span<const double> f);

enum class NormIndex { L1, L2, Linf };

// Temporal norm of a uniformly sampled signal; L1 and L2 by trapezoid rule.
double signal_norm(std::span<const double> f, double dt, NormIndex p);

double max_abs(std::span<const double> f);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tgflow::numerics
