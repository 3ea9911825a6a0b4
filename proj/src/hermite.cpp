#include "vspline/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace vspline {

double hermite_local(HermiteKind kind, double s, double dt, int order) {
    if (order < 0 || order > 2)
        throw std::invalid_argument("hermite_local: derivative order must be 0, 1 or 2");
    switch (kind) {
    case HermiteKind::H00:
        // 2s^3 - 3s^2 + 1
        if (order == 0) return (2.0 * s - 3.0) * s * s + 1.0;
        if (order == 1) return (6.0 * s - 6.0) * s / dt;
        return (12.0 * s - 6.0) / (dt * dt);
    case HermiteKind::H10:
        // dt * (s^3 - 2s^2 + s)
        if (order == 0) return dt * s * ((s - 2.0) * s + 1.0);
        if (order == 1) return (3.0 * s - 4.0) * s + 1.0;
        return (6.0 * s - 4.0) / dt;
    case HermiteKind::H01:
        // -2s^3 + 3s^2
        if (order == 0) return (3.0 - 2.0 * s) * s * s;
        if (order == 1) return (6.0 - 6.0 * s) * s / dt;
        return (6.0 - 12.0 * s) / (dt * dt);
    case HermiteKind::H11:
        // dt * (s^3 - s^2)
        if (order == 0) return dt * s * s * (s - 1.0);
        if (order == 1) return (3.0 * s - 2.0) * s;
        return (6.0 * s - 2.0) / dt;
    }
    throw std::invalid_argument("hermite_local: unknown basis kind");
}

double hermite_basis(HermiteKind kind, const TimeGrid& grid, int interval,
                     double t, int order) {
    if (interval < 0 || interval >= grid.interval_count())
        throw std::out_of_range("hermite_basis: interval out of range");
    if (!std::isfinite(t))
        throw std::invalid_argument("hermite_basis: t must be finite");
    if (order < 0 || order > 2)
        throw std::invalid_argument("hermite_basis: derivative order must be 0, 1 or 2");

    const double t0 = grid.time(interval);
    const double t1 = grid.time(interval + 1);
    const bool last = interval == grid.interval_count() - 1;
    if (t < t0 || t > t1 || (t == t1 && !last)) return 0.0;
    const double dt = t1 - t0;
    return hermite_local(kind, (t - t0) / dt, dt, order);
}

}  // namespace vspline
