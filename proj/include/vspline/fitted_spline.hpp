#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "vspline/time_grid.hpp"

namespace vspline {

// Fitted V-spline. Coefficients are interleaved per knot: row 2k holds the
// value and row 2k+1 the first derivative at knot k, one column per spatial
// dimension. The curve is piecewise cubic on [t_1, t_n] and extends linearly
// outside using the boundary value and slope.
struct FittedVSpline {
    TimeGrid grid;
    Eigen::MatrixXd theta;        // 2n x d
    double gamma = 0.0;
    std::vector<double> lambdas;  // n-1 per-interval penalties

    FittedVSpline(TimeGrid g, Eigen::MatrixXd coeffs, double gamma_value,
                  std::vector<double> interval_lambdas);

    int dims() const { return static_cast<int>(theta.cols()); }

    // Value (order 0) or first/second derivative at t, all dimensions.
    Eigen::VectorXd evaluate(double t, int order) const;
    double evaluate_dim(double t, int order, int alpha) const;

    nlohmann::json to_json() const;
    static FittedVSpline from_json(const nlohmann::json& j);
};

struct SampleRow {
    double t;
    Eigen::VectorXd f, df, d2f;
};

// Uniform samples over [t_1, t_n] inclusive; resolution >= 2 points.
std::vector<SampleRow> sample_spline(const FittedVSpline& spline, int resolution);

}  // namespace vspline
