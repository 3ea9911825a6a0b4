#include "vspline/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vspline {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2)
        throw std::invalid_argument("TimeGrid requires at least two knots");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]))
            throw std::invalid_argument("TimeGrid: knot times must be finite");
        if (i > 0 && times_[i] <= times_[i - 1])
            throw std::invalid_argument("TimeGrid: knot times must be strictly increasing");
    }
}

int TimeGrid::locate(double t) const {
    if (t <= times_.front()) return 0;
    if (t >= times_.back()) return interval_count() - 1;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<int>(it - times_.begin()) - 1;
}

}  // namespace vspline
