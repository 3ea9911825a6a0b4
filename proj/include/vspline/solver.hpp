#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vspline/banded.hpp"
#include "vspline/fitted_spline.hpp"
#include "vspline/observation_set.hpp"

namespace vspline {

// Known observation-error precision matrices; identity when omitted. Diagonal
// pairs keep the O(n) banded path; general matrices fall back to a dense
// factorization.
struct PrecisionPair {
    Eigen::MatrixXd w1, w2;  // n x n symmetric positive definite

    static PrecisionPair identity(int n);
    bool is_diagonal() const;
};

struct FitInfo {
    bool ridge_applied = false;
    double ridge = 0.0;
    std::vector<std::string> warnings;
};

// Per-knot diagonals of the four smoother matrices mapping (y, v) to fitted
// values and derivatives. t and u coincide in the unweighted case.
struct SmootherDiagonals {
    Eigen::VectorXd s, t, u, v;
};

// Assembled and factorized ridge system G = B'W1 B + gamma C'W2 C +
// penalty_scale * Omega_lambda. One factorization serves every spatial
// dimension and both the coefficient solve and the leverage extraction.
class VsplineSystem {
public:
    VsplineSystem(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas,
                  double penalty_scale, const PrecisionPair* weights = nullptr,
                  FitInfo* info = nullptr);

    FittedVSpline fit() const;
    SmootherDiagonals diagonals() const;

private:
    Eigen::VectorXd refined_solve(const Eigen::VectorXd& rhs) const;

    ObservationSet obs_;
    double gamma_;
    std::vector<double> lambdas_;
    Eigen::VectorXd w1d_, w2d_;  // diagonal weights (banded path)
    Eigen::MatrixXd w1m_, w2m_;  // dense weights
    bool dense_path_ = false;
    std::optional<BandedSymmetric> g_;  // assembled banded system, for refinement
    std::optional<BandedLDLT> band_;
    Eigen::LDLT<Eigen::MatrixXd> dense_;
};

// Minimizer of the penalized objective: coefficients G^{-1}(B'W1 y + gamma
// C'W2 v) per dimension, with the standard penalty scale n.
FittedVSpline fit(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas,
                  const PrecisionPair* weights = nullptr, FitInfo* info = nullptr);

SmootherDiagonals smoother_diagonals(const ObservationSet& obs, double gamma,
                                     const std::vector<double>& lambdas,
                                     const PrecisionPair* weights = nullptr);

// Objective value: mean squared position residual + gamma-weighted mean
// squared velocity residual + the exact curvature penalty theta' Omega theta.
double objective_value(const ObservationSet& obs, const FittedVSpline& spline, double gamma,
                       const std::vector<double>& lambdas);

// |f''(t_i+) - f''(t_i-)| at interior knots (Euclidean norm across
// dimensions); empty for n = 2.
std::vector<double> second_derivative_jumps(const FittedVSpline& spline);

}  // namespace vspline
