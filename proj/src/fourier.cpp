#include "tpds/fourier.hpp"

#include <algorithm>
#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

#include "tpds/errors.hpp"

namespace tpds {

namespace {

using cplx = std::complex<double>;

double max_entry(const FourierBlocks& fb) {
    double s = 0.0;
    for (const auto& b : fb.blocks) {
        if (b.size() > 0) {
            s = std::max(s, b.cwiseAbs().maxCoeff());
        }
    }
    return s;
}

}  // namespace

std::size_t unique_block_count(std::size_t depth) { return depth == 0 ? 0 : depth / 2 + 1; }

std::size_t mirror_index(std::size_t j, std::size_t depth) { return (depth - j) % depth; }

bool is_self_conjugate(std::size_t j, std::size_t depth) { return mirror_index(j, depth) == j; }

FourierBlocks to_fourier(const Tensor3& t) {
    const std::size_t r = t.depth();
    FourierBlocks fb;
    fb.rows = t.rows();
    fb.cols = t.cols();
    fb.blocks.assign(r, ComplexMatrix::Zero(static_cast<Eigen::Index>(t.rows()),
                                            static_cast<Eigen::Index>(t.cols())));
    if (r == 1) {
        fb.blocks[0] = t.slice(0).cast<cplx>();
        return fb;
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> tube(r);
    std::vector<cplx> spectrum(r);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            for (std::size_t k = 0; k < r; ++k) {
                tube[k] = t(i, j, k);
            }
            fft.fwd(spectrum, tube);
            for (std::size_t k = 0; k < r; ++k) {
                fb.blocks[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spectrum[k];
            }
        }
    }
    return fb;
}

Tensor3 from_fourier(const FourierBlocks& fb, double* imag_residue) {
    const std::size_t r = fb.depth();
    const double scale = 1.0 + max_entry(fb);
    for (std::size_t j = 0; j < r; ++j) {
        const auto& b = fb.blocks[j];
        if (static_cast<std::size_t>(b.rows()) != fb.rows || static_cast<std::size_t>(b.cols()) != fb.cols) {
            throw DimensionError("from_fourier: block " + std::to_string(j + 1) + " has the wrong shape");
        }
        const std::size_t jm = mirror_index(j, r);
        if (jm < j) {
            continue;
        }
        const double dev = (b - fb.blocks[jm].conjugate()).cwiseAbs().maxCoeff();
        if (b.size() > 0 && dev > 1e-8 * scale) {
            throw ConjugateSymmetryError("from_fourier: blocks " + std::to_string(j + 1) + " and " +
                                         std::to_string(jm + 1) + " are not conjugate (deviation " +
                                         std::to_string(dev) + ")");
        }
    }

    Tensor3 t(fb.rows, fb.cols, r);
    double resid = 0.0;
    Eigen::FFT<double> fft;
    std::vector<cplx> spectrum(r);
    std::vector<cplx> tube(r);
    for (std::size_t i = 0; i < fb.rows; ++i) {
        for (std::size_t j = 0; j < fb.cols; ++j) {
            for (std::size_t k = 0; k < r; ++k) {
                spectrum[k] = fb.blocks[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            if (r == 1) {
                tube[0] = spectrum[0];
            } else {
                fft.inv(tube, spectrum);  // kissfft inverse already divides by r
            }
            for (std::size_t k = 0; k < r; ++k) {
                t(i, j, k) = tube[k].real();
                resid = std::max(resid, std::abs(tube[k].imag()));
            }
        }
    }
    if (imag_residue != nullptr) {
        *imag_residue = resid;
    }
    return t;
}

FourierBlocks symmetrize(const FourierBlocks& fb) {
    FourierBlocks out = fb;
    const std::size_t r = fb.depth();
    for (std::size_t j = 0; j < r; ++j) {
        out.blocks[j] = 0.5 * (fb.blocks[j] + fb.blocks[mirror_index(j, r)].conjugate());
    }
    return out;
}

FourierBlocks mirror_unique_blocks(std::vector<ComplexMatrix> unique, std::size_t depth) {
    const std::size_t u = unique_block_count(depth);
    if (unique.size() != u || unique.empty()) {
        throw DimensionError("mirror_unique_blocks: expected " + std::to_string(u) + " blocks, got " +
                             std::to_string(unique.size()));
    }
    FourierBlocks fb;
    fb.rows = static_cast<std::size_t>(unique.front().rows());
    fb.cols = static_cast<std::size_t>(unique.front().cols());
    fb.blocks.resize(depth);
    for (std::size_t j = 0; j < depth; ++j) {
        if (j < u) {
            fb.blocks[j] = std::move(unique[j]);
            if (is_self_conjugate(j, depth)) {
                fb.blocks[j] = fb.blocks[j].real().cast<cplx>();
            }
        } else {
            fb.blocks[j] = fb.blocks[mirror_index(j, depth)].conjugate();
        }
    }
    return fb;
}

}  // namespace tpds
