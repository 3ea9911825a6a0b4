#include "vspline/banded.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace vspline {

BandedSymmetric::BandedSymmetric(int n, int bandwidth)
    : n_(n), bw_(bandwidth), band_(Eigen::MatrixXd::Zero(bandwidth + 1, n)) {
    if (n < 1 || bandwidth < 0)
        throw std::invalid_argument("BandedSymmetric: invalid dimensions");
}

double BandedSymmetric::coeff(int i, int j) const {
    if (i < j) std::swap(i, j);
    return (i - j > bw_) ? 0.0 : band_(i - j, j);
}

Eigen::MatrixXd BandedSymmetric::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j) {
        for (int k = 0; k <= bw_ && j + k < n_; ++k) {
            m(j + k, j) = band_(k, j);
            m(j, j + k) = band_(k, j);
        }
    }
    return m;
}

Eigen::VectorXd BandedSymmetric::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j) {
        y[j] += band_(0, j) * x[j];
        for (int k = 1; k <= bw_ && j + k < n_; ++k) {
            y[j + k] += band_(k, j) * x[j];
            y[j] += band_(k, j) * x[j + k];
        }
    }
    return y;
}

double BandedSymmetric::quadratic_form(const Eigen::VectorXd& x) const {
    double q = 0.0;
    for (int j = 0; j < n_; ++j) {
        q += band_(0, j) * x[j] * x[j];
        for (int k = 1; k <= bw_ && j + k < n_; ++k)
            q += 2.0 * band_(k, j) * x[j + k] * x[j];
    }
    return q;
}

BandedLDLT::BandedLDLT(const BandedSymmetric& a)
    : n_(a.size()),
      bw_(a.bandwidth()),
      lband_(Eigen::MatrixXd::Zero(bw_ + 1, n_)),
      d_(n_),
      min_pivot_(std::numeric_limits<double>::infinity()) {
    for (int j = 0; j < n_; ++j) {
        for (int i = j; i <= std::min(j + bw_, n_ - 1); ++i) {
            double sum = a.coeff(i, j);
            for (int k = std::max(0, i - bw_); k < j; ++k)
                sum -= lband_(i - k, k) * lband_(j - k, k) * d_[k];
            if (i == j) {
                d_[j] = sum;
                min_pivot_ = std::min(min_pivot_, sum);
                if (!(sum > 0.0)) return;  // leaves ok_ = false
                lband_(0, j) = 1.0;
            } else {
                lband_(i - j, j) = sum / d_[j];
            }
        }
    }
    ok_ = true;
}

Eigen::VectorXd BandedLDLT::solve(const Eigen::VectorXd& b) const {
    if (!ok_) throw std::logic_error("BandedLDLT: factorization failed");
    Eigen::VectorXd x = b;
    for (int i = 0; i < n_; ++i) {
        double s = x[i];
        for (int k = std::max(0, i - bw_); k < i; ++k) s -= lband_(i - k, k) * x[k];
        x[i] = s;
    }
    for (int i = 0; i < n_; ++i) x[i] /= d_[i];
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k)
            s -= lband_(k - i, i) * x[k];
        x[i] = s;
    }
    return x;
}

BandedSymmetric BandedLDLT::selected_inverse() const {
    if (!ok_) throw std::logic_error("BandedLDLT: factorization failed");
    BandedSymmetric z(n_, bw_);
    // Z_ij = delta_ij / d_i - sum_{k>i} L_ki Z_kj for i <= j; sweeping columns
    // backward keeps every referenced entry inside the already-computed band.
    for (int j = n_ - 1; j >= 0; --j) {
        for (int i = j; i >= std::max(0, j - bw_); --i) {
            double s = (i == j) ? 1.0 / d_[i] : 0.0;
            for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k)
                s -= lband_(k - i, i) * z.coeff(k, j);
            z.at(j, i) = s;
        }
    }
    return z;
}

}  // namespace vspline
