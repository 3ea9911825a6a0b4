#include "vspline/observation_set.hpp"

#include <stdexcept>

namespace vspline {

ObservationSet::ObservationSet(TimeGrid g, Eigen::MatrixXd pos, Eigen::MatrixXd vel)
    : grid(std::move(g)), positions(std::move(pos)), velocities(std::move(vel)) {
    if (positions.rows() != grid.size() || velocities.rows() != grid.size())
        throw std::invalid_argument("ObservationSet: row count must equal the grid size");
    if (positions.cols() < 1 || positions.cols() != velocities.cols())
        throw std::invalid_argument("ObservationSet: position/velocity dimension mismatch");
    if (!positions.allFinite() || !velocities.allFinite())
        throw std::invalid_argument("ObservationSet: observations must be finite");
}

ObservationSet ObservationSet::dimension(int alpha) const {
    if (alpha < 0 || alpha >= dims())
        throw std::out_of_range("ObservationSet: dimension index out of range");
    return ObservationSet(grid, positions.col(alpha), velocities.col(alpha));
}

}  // namespace vspline
