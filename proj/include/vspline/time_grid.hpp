#pragma once

#include <vector>

namespace vspline {

// Strictly increasing knot times t_1 < ... < t_n, n >= 2.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    int size() const { return static_cast<int>(times_.size()); }
    int interval_count() const { return size() - 1; }
    double time(int i) const { return times_[i]; }
    double dt(int i) const { return times_[i + 1] - times_[i]; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }

    // Index of the interval whose half-open span [t_i, t_{i+1}) contains t;
    // the last interval also claims t_n. Times outside [t_1, t_n] clamp to
    // the boundary interval.
    int locate(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> times_;
};

}  // namespace vspline
