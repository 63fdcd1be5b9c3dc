#pragma once

#include <cstddef>
#include <vector>

#include "tpds/tensor.hpp"

namespace tpds {

/**
 * Diagonal blocks of the DFT-conjugated block-circulant matrix of a tensor.
 *
 * Block j (0-based) is sum_k T_k * exp(-2*pi*i*j*k/r), i.e. the unnormalized
 * DFT of the slice sequence. The unitary convention would scale every block
 * by the same constant; ranks, definiteness, Riccati solutions and gains do
 * not depend on that choice. The inverse transform carries the 1/r.
 *
 * For a real tensor, block (r - j) mod r is the complex conjugate of block j.
 */
struct FourierBlocks {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<ComplexMatrix> blocks;

    std::size_t depth() const { return blocks.size(); }
};

// Number of frequencies a real signal of length r determines: floor(r/2) + 1.
std::size_t unique_block_count(std::size_t depth);
// 0-based index of the conjugate partner of block j.
std::size_t mirror_index(std::size_t j, std::size_t depth);
// Blocks 0 and (for even r) r/2 are real for real tensors.
bool is_self_conjugate(std::size_t j, std::size_t depth);

FourierBlocks to_fourier(const Tensor3& t);

/// Inverse DFT along the block index. Throws ConjugateSymmetryError when the
/// blocks are not conjugate symmetric within 1e-8 (relative to the largest
/// entry), since the result would not be real. The imaginary residue of the
/// inverse transform is truncated and reported through imag_residue.
Tensor3 from_fourier(const FourierBlocks& fb, double* imag_residue = nullptr);

/// Explicit repair: averages block j with conj(block (r-j) mod r).
FourierBlocks symmetrize(const FourierBlocks& fb);

/// Rebuilds all r blocks from the first unique_block_count(r) of them by
/// conjugate mirroring. Self-conjugate blocks keep only their real part.
FourierBlocks mirror_unique_blocks(std::vector<ComplexMatrix> unique, std::size_t depth);

}  // namespace tpds
