#include "tpds/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tpds {

int numerical_rank(const Eigen::VectorXd& s, Eigen::Index rows, Eigen::Index cols, double scale) {
    if (s.size() == 0 || s(0) <= 0.0) {
        return 0;
    }
    const double tol = static_cast<double>(std::max(rows, cols)) * std::max(s(0), scale) * kRankTol;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) {
            ++rank;
        }
    }
    return rank;
}

int numerical_rank(const RealMatrix& m, double scale) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<RealMatrix> svd(m);
    return numerical_rank(svd.singularValues(), m.rows(), m.cols(), scale);
}

int numerical_rank(const ComplexMatrix& m, double scale) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return numerical_rank(svd.singularValues(), m.rows(), m.cols(), scale);
}

namespace {

template <typename Mat>
Mat pinv_impl(const Mat& m) {
    if (m.size() == 0) {
        return Mat::Zero(m.cols(), m.rows());
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const int rank = numerical_rank(s, m.rows(), m.cols());
    Mat out = Mat::Zero(m.cols(), m.rows());
    for (int i = 0; i < rank; ++i) {
        out += (1.0 / s(i)) * svd.matrixV().col(i) * svd.matrixU().col(i).adjoint();
    }
    return out;
}

}  // namespace

RealMatrix pinv(const RealMatrix& m) { return pinv_impl(m); }
ComplexMatrix pinv(const ComplexMatrix& m) { return pinv_impl(m); }

bool eigenvalue_precedes(const std::complex<double>& a, const std::complex<double>& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) {
        return ma > mb;
    }
    if (a.real() != b.real()) {
        return a.real() > b.real();
    }
    return a.imag() > b.imag();
}

void sort_eigenvalues(std::vector<std::complex<double>>& v) {
    std::stable_sort(v.begin(), v.end(), eigenvalue_precedes);
}

std::vector<std::complex<double>> ordered_eigenvalues(const ComplexMatrix& m) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    std::vector<std::complex<double>> v(es.eigenvalues().begin(), es.eigenvalues().end());
    sort_eigenvalues(v);
    return v;
}

double spectral_radius(const ComplexMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const RealMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<RealMatrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

RealMatrix null_space(const RealMatrix& m) {
    if (m.rows() == 0) {
        return RealMatrix::Identity(m.cols(), m.cols());
    }
    // Column-pivoted QR of m^T: the trailing columns of Q span null(m).
    const RealMatrix mt = m.transpose();
    Eigen::ColPivHouseholderQR<RealMatrix> qr(mt);
    qr.setThreshold(static_cast<double>(std::max(m.rows(), m.cols())) * kRankTol);
    const Eigen::Index rank = qr.rank();
    const RealMatrix q = qr.householderQ();
    return q.rightCols(m.cols() - rank);
}

}  // namespace tpds
