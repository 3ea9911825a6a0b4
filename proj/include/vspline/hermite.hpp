#pragma once

#include "vspline/time_grid.hpp"

namespace vspline {

// The four cubic Hermite basis functions on one interval: h00/h01 carry unit
// value at the left/right endpoint, h10/h11 carry unit slope.
enum class HermiteKind { H00, H10, H01, H11 };

// Value (order 0) or first/second derivative of the interval-local basis
// function at local coordinate s = (t - t_i)/dt, without any membership test.
double hermite_local(HermiteKind kind, double s, double dt, int order);

// Same, as a function on the whole line: identically zero outside
// [t_i, t_{i+1}). The last interval also includes its right endpoint t_n.
double hermite_basis(HermiteKind kind, const TimeGrid& grid, int interval,
                     double t, int order);

}  // namespace vspline
