#include "vspline/fitted_spline.hpp"

#include <cmath>
#include <stdexcept>

#include "vspline/hermite.hpp"

namespace vspline {

FittedVSpline::FittedVSpline(TimeGrid g, Eigen::MatrixXd coeffs, double gamma_value,
                             std::vector<double> interval_lambdas)
    : grid(std::move(g)),
      theta(std::move(coeffs)),
      gamma(gamma_value),
      lambdas(std::move(interval_lambdas)) {
    if (theta.rows() != 2 * grid.size() || theta.cols() < 1)
        throw std::invalid_argument("FittedVSpline: coefficient matrix must be 2n x d");
    if (static_cast<int>(lambdas.size()) != grid.interval_count())
        throw std::invalid_argument("FittedVSpline: lambda count must equal the interval count");
    if (!theta.allFinite())
        throw std::invalid_argument("FittedVSpline: coefficients must be finite");
}

Eigen::VectorXd FittedVSpline::evaluate(double t, int order) const {
    if (!std::isfinite(t))
        throw std::invalid_argument("FittedVSpline: evaluation time must be finite");
    if (order < 0 || order > 2)
        throw std::invalid_argument("FittedVSpline: derivative order must be 0, 1 or 2");

    const int d = dims();
    Eigen::VectorXd out(d);

    // Linear extrapolation outside the knot span.
    if (t < grid.front() || t > grid.back()) {
        const int k = (t < grid.front()) ? 0 : grid.size() - 1;
        const double tk = grid.time(k);
        for (int a = 0; a < d; ++a) {
            const double value = theta(2 * k, a);
            const double slope = theta(2 * k + 1, a);
            out[a] = order == 0 ? value + slope * (t - tk) : (order == 1 ? slope : 0.0);
        }
        return out;
    }

    const int i = grid.locate(t);
    const double dt = grid.dt(i);
    const double s = (t - grid.time(i)) / dt;
    const double b00 = hermite_local(HermiteKind::H00, s, dt, order);
    const double b10 = hermite_local(HermiteKind::H10, s, dt, order);
    const double b01 = hermite_local(HermiteKind::H01, s, dt, order);
    const double b11 = hermite_local(HermiteKind::H11, s, dt, order);
    for (int a = 0; a < d; ++a) {
        out[a] = b00 * theta(2 * i, a) + b10 * theta(2 * i + 1, a) +
                 b01 * theta(2 * i + 2, a) + b11 * theta(2 * i + 3, a);
    }
    return out;
}

double FittedVSpline::evaluate_dim(double t, int order, int alpha) const {
    if (alpha < 0 || alpha >= dims())
        throw std::out_of_range("FittedVSpline: dimension index out of range");
    return evaluate(t, order)[alpha];
}

nlohmann::json FittedVSpline::to_json() const {
    nlohmann::json j;
    j["grid"] = grid.times();
    j["gamma"] = gamma;
    j["lambdas"] = lambdas;
    j["dims"] = dims();
    std::vector<double> flat;
    flat.reserve(theta.size());
    for (int r = 0; r < theta.rows(); ++r)
        for (int c = 0; c < theta.cols(); ++c) flat.push_back(theta(r, c));
    j["theta"] = flat;
    return j;
}

FittedVSpline FittedVSpline::from_json(const nlohmann::json& j) {
    TimeGrid grid(j.at("grid").get<std::vector<double>>());
    const int d = j.at("dims").get<int>();
    const auto flat = j.at("theta").get<std::vector<double>>();
    if (d < 1 || flat.size() != static_cast<std::size_t>(2 * grid.size() * d))
        throw std::invalid_argument("FittedVSpline: theta size does not match grid and dims");
    Eigen::MatrixXd theta(2 * grid.size(), d);
    std::size_t pos = 0;
    for (int r = 0; r < theta.rows(); ++r)
        for (int c = 0; c < d; ++c) theta(r, c) = flat[pos++];
    return FittedVSpline(std::move(grid), std::move(theta), j.at("gamma").get<double>(),
                         j.at("lambdas").get<std::vector<double>>());
}

std::vector<SampleRow> sample_spline(const FittedVSpline& spline, int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("sample_spline: resolution must be at least 2");
    const double a = spline.grid.front();
    const double b = spline.grid.back();
    std::vector<SampleRow> rows;
    rows.reserve(resolution);
    for (int j = 0; j < resolution; ++j) {
        const double t = j + 1 == resolution ? b : a + (b - a) * j / (resolution - 1);
        rows.push_back({t, spline.evaluate(t, 0), spline.evaluate(t, 1), spline.evaluate(t, 2)});
    }
    return rows;
}

}  // namespace vspline
