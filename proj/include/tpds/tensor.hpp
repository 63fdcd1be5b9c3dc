#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tpds {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/**
 * Dense real third-order tensor of shape rows x cols x depth.
 *
 * Frontal slice k (0-based here, 1-based in every file format and user
 * facing message) is the rows x cols matrix obtained by fixing the third
 * index. Storage is slice-major with row-major slices, so
 * (i, j, k) lives at k*rows*cols + i*cols + j.
 *
 * A tensor with a zero extent is "empty"; it is only useful as the neutral
 * element of block concatenation.
 */
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(std::size_t rows, std::size_t cols, std::size_t depth);
    Tensor3(std::size_t rows, std::size_t cols, std::size_t depth, std::vector<double> data);

    static Tensor3 from_slices(const std::vector<RealMatrix>& slices);
    // T-identity: first slice I_n, remaining slices zero.
    static Tensor3 identity(std::size_t n, std::size_t depth);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t depth() const { return depth_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(k * rows_ + i) * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(k * rows_ + i) * cols_ + j];
    }

    RealMatrix slice(std::size_t k) const;
    void set_slice(std::size_t k, const RealMatrix& m);

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    double frobenius_norm() const;
    double max_abs() const;

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s);

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t depth_ = 0;
    std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);

// Largest entrywise |a - b|; shapes must agree.
double max_abs_diff(const Tensor3& a, const Tensor3& b);

/// Block-circulant matrix psi(t), (rows*r) x (cols*r); block (p, q) is slice (p - q) mod r.
RealMatrix bcirc(const Tensor3& t);

/// Vertical stacking of the frontal slices, (rows*r) x cols.
RealMatrix unfold(const Tensor3& t);

/// Inverse of unfold: m must have depth * slice_rows rows.
Tensor3 fold(const RealMatrix& m, std::size_t slice_rows, std::size_t depth);

enum class CirculantCheck {
    Strict,            // reject matrices that are not block circulant
    FirstBlockColumn,  // fold the first block column, ignore the rest
};

/// Inverse of bcirc. With CirculantCheck::Strict every block is compared
/// exactly against the first block column.
Tensor3 from_bcirc(const RealMatrix& m, std::size_t depth,
                   CirculantCheck check = CirculantCheck::Strict);

/// T-product: circular convolution of frontal slices along mode 3.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);

Tensor3 ttranspose(const Tensor3& t);

/// T-inverse, computed block-wise in the Fourier domain. Throws
/// SingularTensorError when a block has sigma_min <= n * sigma_max * 1e-12.
Tensor3 tinverse(const Tensor3& t);

/// Concatenation along mode 2: [a b].
Tensor3 block_row(const Tensor3& a, const Tensor3& b);
/// Concatenation along mode 1: [a; b].
Tensor3 block_col(const Tensor3& a, const Tensor3& b);

}  // namespace tpds
