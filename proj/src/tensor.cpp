#include "tpds/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpds/errors.hpp"
#include "tpds/fourier.hpp"

namespace tpds {

namespace {

std::string shape(const Tensor3& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "x" +
           std::to_string(t.depth());
}

void require_same_shape(const Tensor3& a, const Tensor3& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.depth() != b.depth()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
    }
}

}  // namespace

Tensor3::Tensor3(std::size_t rows, std::size_t cols, std::size_t depth)
    : rows_(rows), cols_(cols), depth_(depth), data_(rows * cols * depth, 0.0) {}

Tensor3::Tensor3(std::size_t rows, std::size_t cols, std::size_t depth, std::vector<double> data)
    : rows_(rows), cols_(cols), depth_(depth), data_(std::move(data)) {
    if (data_.size() != rows * cols * depth) {
        throw DimensionError("Tensor3: data length " + std::to_string(data_.size()) +
                             " does not match " + shape(*this));
    }
}

Tensor3 Tensor3::from_slices(const std::vector<RealMatrix>& slices) {
    if (slices.empty()) {
        return {};
    }
    const auto n = static_cast<std::size_t>(slices.front().rows());
    const auto m = static_cast<std::size_t>(slices.front().cols());
    Tensor3 t(n, m, slices.size());
    for (std::size_t k = 0; k < slices.size(); ++k) {
        t.set_slice(k, slices[k]);
    }
    return t;
}

Tensor3 Tensor3::identity(std::size_t n, std::size_t depth) {
    Tensor3 t(n, n, depth);
    for (std::size_t i = 0; i < n; ++i) {
        t(i, i, 0) = 1.0;
    }
    return t;
}

RealMatrix Tensor3::slice(std::size_t k) const {
    RealMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            m(i, j) = (*this)(i, j, k);
        }
    }
    return m;
}

void Tensor3::set_slice(std::size_t k, const RealMatrix& m) {
    if (static_cast<std::size_t>(m.rows()) != rows_ || static_cast<std::size_t>(m.cols()) != cols_ ||
        k >= depth_) {
        throw DimensionError("Tensor3::set_slice: slice does not fit " + shape(*this));
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            (*this)(i, j, k) = m(i, j);
        }
    }
}

double Tensor3::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) {
        s += v * v;
    }
    return std::sqrt(s);
}

double Tensor3::max_abs() const {
    double s = 0.0;
    for (double v : data_) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    for (double& v : data_) {
        v *= s;
    }
    return *this;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
    require_same_shape(a, b, "max_abs_diff");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    }
    return d;
}

RealMatrix bcirc(const Tensor3& t) {
    const auto n = static_cast<Eigen::Index>(t.rows());
    const auto m = static_cast<Eigen::Index>(t.cols());
    const std::size_t r = t.depth();
    RealMatrix out(n * static_cast<Eigen::Index>(r), m * static_cast<Eigen::Index>(r));
    std::vector<RealMatrix> slices;
    slices.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
        slices.push_back(t.slice(k));
    }
    for (std::size_t p = 0; p < r; ++p) {
        for (std::size_t q = 0; q < r; ++q) {
            out.block(static_cast<Eigen::Index>(p) * n, static_cast<Eigen::Index>(q) * m, n, m) =
                slices[(p + r - q) % r];
        }
    }
    return out;
}

RealMatrix unfold(const Tensor3& t) {
    const auto n = static_cast<Eigen::Index>(t.rows());
    RealMatrix out(n * static_cast<Eigen::Index>(t.depth()), static_cast<Eigen::Index>(t.cols()));
    for (std::size_t k = 0; k < t.depth(); ++k) {
        out.middleRows(static_cast<Eigen::Index>(k) * n, n) = t.slice(k);
    }
    return out;
}

Tensor3 fold(const RealMatrix& m, std::size_t slice_rows, std::size_t depth) {
    if (depth == 0 || static_cast<std::size_t>(m.rows()) != slice_rows * depth) {
        throw DimensionError("fold: matrix has " + std::to_string(m.rows()) + " rows, expected " +
                             std::to_string(slice_rows) + " x " + std::to_string(depth));
    }
    Tensor3 t(slice_rows, static_cast<std::size_t>(m.cols()), depth);
    for (std::size_t k = 0; k < depth; ++k) {
        t.set_slice(k, m.middleRows(static_cast<Eigen::Index>(k * slice_rows),
                                    static_cast<Eigen::Index>(slice_rows)));
    }
    return t;
}

Tensor3 from_bcirc(const RealMatrix& m, std::size_t depth, CirculantCheck check) {
    if (depth == 0 || m.rows() % static_cast<Eigen::Index>(depth) != 0 ||
        m.cols() % static_cast<Eigen::Index>(depth) != 0) {
        throw DimensionError("from_bcirc: " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " is not divisible into " +
                             std::to_string(depth) + " blocks");
    }
    const Eigen::Index n = m.rows() / static_cast<Eigen::Index>(depth);
    const Eigen::Index c = m.cols() / static_cast<Eigen::Index>(depth);
    Tensor3 t = fold(m.leftCols(c), static_cast<std::size_t>(n), depth);
    if (check == CirculantCheck::Strict) {
        for (std::size_t p = 0; p < depth; ++p) {
            for (std::size_t q = 1; q < depth; ++q) {
                const RealMatrix expected = t.slice((p + depth - q) % depth);
                if (m.block(static_cast<Eigen::Index>(p) * n, static_cast<Eigen::Index>(q) * c, n, c) !=
                    expected) {
                    throw DimensionError("from_bcirc: block (" + std::to_string(p + 1) + ", " +
                                         std::to_string(q + 1) + ") breaks the circulant pattern");
                }
            }
        }
    }
    return t;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
    if (a.cols() != b.rows() || a.depth() != b.depth()) {
        throw DimensionError("tprod: cannot multiply " + shape(a) + " by " + shape(b));
    }
    const std::size_t r = a.depth();
    std::vector<RealMatrix> as, bs;
    for (std::size_t k = 0; k < r; ++k) {
        as.push_back(a.slice(k));
        bs.push_back(b.slice(k));
    }
    std::vector<RealMatrix> cs(r, RealMatrix::Zero(static_cast<Eigen::Index>(a.rows()),
                                                   static_cast<Eigen::Index>(b.cols())));
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t q = 0; q < r; ++q) {
            cs[k].noalias() += as[(k + r - q) % r] * bs[q];
        }
    }
    Tensor3 out(a.rows(), b.cols(), r);
    for (std::size_t k = 0; k < r; ++k) {
        out.set_slice(k, cs[k]);
    }
    return out;
}

Tensor3 ttranspose(const Tensor3& t) {
    const std::size_t r = t.depth();
    Tensor3 out(t.cols(), t.rows(), r);
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t src = (r - k) % r;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            for (std::size_t j = 0; j < t.cols(); ++j) {
                out(j, i, k) = t(i, j, src);
            }
        }
    }
    return out;
}

Tensor3 tinverse(const Tensor3& t) {
    if (t.rows() != t.cols()) {
        throw DimensionError("tinverse: tensor " + shape(t) + " is not square in modes 1-2");
    }
    FourierBlocks fb = to_fourier(t);
    const double n = static_cast<double>(t.rows());
    for (std::size_t j = 0; j < fb.blocks.size(); ++j) {
        Eigen::JacobiSVD<ComplexMatrix> svd(fb.blocks[j]);
        const auto& s = svd.singularValues();
        if (s.size() == 0 || s(s.size() - 1) <= n * s(0) * 1e-12) {
            throw SingularTensorError("tinverse: Fourier block " + std::to_string(j + 1) +
                                      " is singular");
        }
        fb.blocks[j] = fb.blocks[j].inverse().eval();
    }
    return from_fourier(symmetrize(fb));
}

Tensor3 block_row(const Tensor3& a, const Tensor3& b) {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    if (a.rows() != b.rows() || a.depth() != b.depth()) {
        throw DimensionError("block_row: cannot concatenate " + shape(a) + " and " + shape(b));
    }
    Tensor3 out(a.rows(), a.cols() + b.cols(), a.depth());
    for (std::size_t k = 0; k < a.depth(); ++k) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                out(i, j, k) = a(i, j, k);
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, a.cols() + j, k) = b(i, j, k);
            }
        }
    }
    return out;
}

Tensor3 block_col(const Tensor3& a, const Tensor3& b) {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    if (a.cols() != b.cols() || a.depth() != b.depth()) {
        throw DimensionError("block_col: cannot concatenate " + shape(a) + " and " + shape(b));
    }
    Tensor3 out(a.rows() + b.rows(), a.cols(), a.depth());
    for (std::size_t k = 0; k < a.depth(); ++k) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t i = 0; i < a.rows(); ++i) {
                out(i, j, k) = a(i, j, k);
            }
            for (std::size_t i = 0; i < b.rows(); ++i) {
                out(a.rows() + i, j, k) = b(i, j, k);
            }
        }
    }
    return out;
}

}  // namespace tpds
