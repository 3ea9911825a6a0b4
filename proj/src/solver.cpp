#include "vspline/solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vspline/hermite.hpp"
#include "vspline/penalty.hpp"

namespace vspline {

namespace {

void validate_inputs(const ObservationSet& obs, double gamma,
                     const std::vector<double>& lambdas) {
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("fit: gamma must be finite and nonnegative");
    if (static_cast<int>(lambdas.size()) != obs.grid.interval_count())
        throw std::invalid_argument("fit: lambda count must equal the interval count");
    for (double lam : lambdas)
        if (!std::isfinite(lam) || lam <= 0.0)
            throw std::invalid_argument("fit: interval penalties must be positive");
}

[[noreturn]] void throw_not_positive_definite(double pivot) {
    std::ostringstream msg;
    msg << "fit: system matrix is not positive definite (smallest pivot " << pivot << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace

PrecisionPair PrecisionPair::identity(int n) {
    return {Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n)};
}

bool PrecisionPair::is_diagonal() const {
    return w1.isDiagonal(0.0) && w2.isDiagonal(0.0);
}

VsplineSystem::VsplineSystem(const ObservationSet& obs, double gamma,
                             const std::vector<double>& lambdas, double penalty_scale,
                             const PrecisionPair* weights, FitInfo* info)
    : obs_(obs), gamma_(gamma), lambdas_(lambdas) {
    validate_inputs(obs_, gamma_, lambdas_);
    const int n = obs_.size();
    const int dim = 2 * n;

    if (weights != nullptr) {
        if (weights->w1.rows() != n || weights->w1.cols() != n ||
            weights->w2.rows() != n || weights->w2.cols() != n)
            throw std::invalid_argument("fit: precision matrices must be n x n");
        if (!weights->w1.allFinite() || !weights->w2.allFinite())
            throw std::invalid_argument("fit: precision matrices must be finite");
        dense_path_ = !weights->is_diagonal();
        if (!dense_path_) {
            w1d_ = weights->w1.diagonal();
            w2d_ = weights->w2.diagonal();
            if ((w1d_.array() <= 0.0).any() || (w2d_.array() <= 0.0).any())
                throw std::invalid_argument("fit: precision diagonals must be positive");
        } else {
            w1m_ = weights->w1;
            w2m_ = weights->w2;
        }
    } else {
        w1d_ = Eigen::VectorXd::Ones(n);
        w2d_ = Eigen::VectorXd::Ones(n);
    }

    const BandedSymmetric omega = assemble_omega(obs_.grid, lambdas_);

    if (!dense_path_) {
        BandedSymmetric g(dim, omega.bandwidth());
        g.data() = penalty_scale * omega.data();
        for (int k = 0; k < n; ++k) {
            g.at(2 * k, 2 * k) += w1d_[k];
            g.at(2 * k + 1, 2 * k + 1) += gamma_ * w2d_[k];
        }
        band_.emplace(g);
        if (!band_->ok()) {
            // gamma = 0 can leave slope coordinates weakly determined on
            // degenerate grids; a tiny ridge restores definiteness.
            const double ridge = 1e-12 * g.trace() / dim;
            for (int j = 0; j < dim; ++j) g.at(j, j) += ridge;
            band_.emplace(g);
            if (info != nullptr) {
                info->ridge_applied = true;
                info->ridge = ridge;
                info->warnings.push_back("added ridge to restore positive definiteness");
            }
            if (!band_->ok()) throw_not_positive_definite(band_->smallest_pivot());
        }
        g_.emplace(std::move(g));
    } else {
        Eigen::MatrixXd g = penalty_scale * omega.dense();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                g(2 * i, 2 * j) += w1m_(i, j);
                g(2 * i + 1, 2 * j + 1) += gamma_ * w2m_(i, j);
            }
        dense_.compute(g);
        double min_pivot = dense_.vectorD().minCoeff();
        if (dense_.info() != Eigen::Success || min_pivot <= 0.0) {
            const double ridge = 1e-12 * g.trace() / dim;
            g.diagonal().array() += ridge;
            dense_.compute(g);
            min_pivot = dense_.vectorD().minCoeff();
            if (info != nullptr) {
                info->ridge_applied = true;
                info->ridge = ridge;
                info->warnings.push_back("added ridge to restore positive definiteness");
            }
            if (dense_.info() != Eigen::Success || min_pivot <= 0.0)
                throw_not_positive_definite(min_pivot);
        }
    }
}

Eigen::VectorXd VsplineSystem::refined_solve(const Eigen::VectorXd& rhs) const {
    // One step of iterative refinement; penalties many orders above the data
    // terms otherwise cost several digits.
    Eigen::VectorXd x = band_->solve(rhs);
    x += band_->solve(rhs - g_->multiply(x));
    return x;
}

FittedVSpline VsplineSystem::fit() const {
    const int n = obs_.size();
    const int d = obs_.dims();
    Eigen::MatrixXd theta(2 * n, d);
    Eigen::VectorXd rhs(2 * n);
    for (int a = 0; a < d; ++a) {
        if (!dense_path_) {
            for (int k = 0; k < n; ++k) {
                rhs[2 * k] = w1d_[k] * obs_.positions(k, a);
                rhs[2 * k + 1] = gamma_ * (w2d_[k] * obs_.velocities(k, a));
            }
            theta.col(a) = refined_solve(rhs);
        } else {
            const Eigen::VectorXd wy = w1m_ * obs_.positions.col(a);
            const Eigen::VectorXd wv = w2m_ * obs_.velocities.col(a);
            for (int k = 0; k < n; ++k) {
                rhs[2 * k] = wy[k];
                rhs[2 * k + 1] = gamma_ * wv[k];
            }
            theta.col(a) = dense_.solve(rhs);
        }
    }
    return FittedVSpline(obs_.grid, std::move(theta), gamma_, lambdas_);
}

SmootherDiagonals VsplineSystem::diagonals() const {
    const int n = obs_.size();
    SmootherDiagonals out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
                          Eigen::VectorXd(n)};
    if (!dense_path_) {
        const BandedSymmetric z = band_->selected_inverse();
        for (int k = 0; k < n; ++k) {
            out.s[k] = z.coeff(2 * k, 2 * k) * w1d_[k];
            out.t[k] = z.coeff(2 * k, 2 * k + 1) * w2d_[k];
            out.u[k] = z.coeff(2 * k + 1, 2 * k) * w1d_[k];
            out.v[k] = z.coeff(2 * k + 1, 2 * k + 1) * w2d_[k];
        }
    } else {
        const Eigen::MatrixXd z =
            dense_.solve(Eigen::MatrixXd::Identity(2 * n, 2 * n));
        for (int k = 0; k < n; ++k) {
            double s = 0.0, t = 0.0, u = 0.0, v = 0.0;
            for (int j = 0; j < n; ++j) {
                s += z(2 * k, 2 * j) * w1m_(j, k);
                t += z(2 * k, 2 * j + 1) * w2m_(j, k);
                u += z(2 * k + 1, 2 * j) * w1m_(j, k);
                v += z(2 * k + 1, 2 * j + 1) * w2m_(j, k);
            }
            out.s[k] = s;
            out.t[k] = t;
            out.u[k] = u;
            out.v[k] = v;
        }
    }
    return out;
}

FittedVSpline fit(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas,
                  const PrecisionPair* weights, FitInfo* info) {
    return VsplineSystem(obs, gamma, lambdas, obs.size(), weights, info).fit();
}

SmootherDiagonals smoother_diagonals(const ObservationSet& obs, double gamma,
                                     const std::vector<double>& lambdas,
                                     const PrecisionPair* weights) {
    return VsplineSystem(obs, gamma, lambdas, obs.size(), weights).diagonals();
}

double objective_value(const ObservationSet& obs, const FittedVSpline& spline, double gamma,
                       const std::vector<double>& lambdas) {
    if (!(spline.grid == obs.grid))
        throw std::invalid_argument("objective_value: spline and observations use different grids");
    if (spline.dims() != obs.dims())
        throw std::invalid_argument("objective_value: dimension mismatch");
    validate_inputs(obs, gamma, lambdas);

    const int n = obs.size();
    const int d = obs.dims();
    double pos = 0.0, vel = 0.0, pen = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int k = 0; k < n; ++k) {
            const double ry = obs.positions(k, a) - spline.theta(2 * k, a);
            const double rv = obs.velocities(k, a) - spline.theta(2 * k + 1, a);
            pos += ry * ry;
            vel += rv * rv;
        }
    }
    const BandedSymmetric omega = assemble_omega(obs.grid, lambdas);
    for (int a = 0; a < d; ++a) pen += omega.quadratic_form(spline.theta.col(a));
    return pos / n + gamma * vel / n + pen;
}

std::vector<double> second_derivative_jumps(const FittedVSpline& spline) {
    const int n = spline.grid.size();
    const int d = spline.dims();
    std::vector<double> jumps;
    jumps.reserve(std::max(0, n - 2));
    for (int k = 1; k + 1 < n; ++k) {
        const double dtl = spline.grid.dt(k - 1);
        const double dtr = spline.grid.dt(k);
        double sq = 0.0;
        for (int a = 0; a < d; ++a) {
            const double left =
                hermite_local(HermiteKind::H00, 1.0, dtl, 2) * spline.theta(2 * k - 2, a) +
                hermite_local(HermiteKind::H10, 1.0, dtl, 2) * spline.theta(2 * k - 1, a) +
                hermite_local(HermiteKind::H01, 1.0, dtl, 2) * spline.theta(2 * k, a) +
                hermite_local(HermiteKind::H11, 1.0, dtl, 2) * spline.theta(2 * k + 1, a);
            const double right =
                hermite_local(HermiteKind::H00, 0.0, dtr, 2) * spline.theta(2 * k, a) +
                hermite_local(HermiteKind::H10, 0.0, dtr, 2) * spline.theta(2 * k + 1, a) +
                hermite_local(HermiteKind::H01, 0.0, dtr, 2) * spline.theta(2 * k + 2, a) +
                hermite_local(HermiteKind::H11, 0.0, dtr, 2) * spline.theta(2 * k + 3, a);
            sq += (right - left) * (right - left);
        }
        jumps.push_back(std::sqrt(sq));
    }
    return jumps;
}

}  // namespace vspline
