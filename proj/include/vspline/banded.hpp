#pragma once

#include <Eigen/Dense>

namespace vspline {

// Symmetric band matrix in lower band storage: data()(k, j) holds A(j+k, j)
// for 0 <= k <= bandwidth.
class BandedSymmetric {
public:
    BandedSymmetric(int n, int bandwidth);

    int size() const { return n_; }
    int bandwidth() const { return bw_; }

    // Lower-triangle access, requires i >= j and i - j <= bandwidth.
    double& at(int i, int j) { return band_(i - j, j); }

    // Read access anywhere; zero outside the band.
    double coeff(int i, int j) const;

    Eigen::MatrixXd& data() { return band_; }
    const Eigen::MatrixXd& data() const { return band_; }

    Eigen::MatrixXd dense() const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    double quadratic_form(const Eigen::VectorXd& x) const;
    double trace() const { return band_.row(0).sum(); }

private:
    int n_, bw_;
    Eigen::MatrixXd band_;  // (bw+1) x n
};

// LDL^T factorization of a banded symmetric positive definite matrix, plus
// the band of its inverse. The inverse band (Takahashi recursion) costs
// O(n * bandwidth^2), which is what makes exact leave-one-out leverages
// affordable on long tracks.
class BandedLDLT {
public:
    explicit BandedLDLT(const BandedSymmetric& a);

    bool ok() const { return ok_; }
    double smallest_pivot() const { return min_pivot_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    // Band of A^{-1} in the same lower band layout.
    BandedSymmetric selected_inverse() const;

private:
    int n_, bw_;
    Eigen::MatrixXd lband_;  // unit lower factor
    Eigen::VectorXd d_;
    bool ok_ = false;
    double min_pivot_;
};

}  // namespace vspline
