#pragma once

#include <Eigen/Dense>

#include "vspline/time_grid.hpp"

namespace vspline {

// Paired position/velocity observations on a common grid, one column per
// spatial dimension.
struct ObservationSet {
    TimeGrid grid;
    Eigen::MatrixXd positions;   // n x d
    Eigen::MatrixXd velocities;  // n x d

    ObservationSet(TimeGrid g, Eigen::MatrixXd pos, Eigen::MatrixXd vel);

    int size() const { return grid.size(); }
    int dims() const { return static_cast<int>(positions.cols()); }

    // Single-dimension view (copies the column).
    ObservationSet dimension(int alpha) const;
};

}  // namespace vspline
