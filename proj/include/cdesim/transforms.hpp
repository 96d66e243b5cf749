#ifndef CDESIM_TRANSFORMS_HPP_
#define CDESIM_TRANSFORMS_HPP_

#include <Eigen/Dense>

#include "cdesim/errors.hpp"

namespace cdesim {

enum class TransformKind { dct, idct, dft, idft };

// Orthonormal/unitary N x N transform, materialized as a dense matrix.
// DCT/IDCT entries are real (stored with zero imaginary part); the DCT is the
// transpose of the IDCT so the pair is exactly inverse. DFT/IDFT use the
// unitary 1/sqrt(N) normalization in both directions.
struct TransformMatrix {
    int order = 0;
    TransformKind kind = TransformKind::dct;
    Eigen::MatrixXcd entries;
};

TransformMatrix idct_matrix(int n);
TransformMatrix dct_matrix(int n);
TransformMatrix dft_matrix(int n);
TransformMatrix idft_matrix(int n);

// Real-valued synthesis/analysis matrices (the complex entries above with the
// imaginary part dropped); convenient for the transmit chain.
Eigen::MatrixXd idct_matrix_real(int n);
Eigen::MatrixXd dct_matrix_real(int n);

}  // namespace cdesim

#endif  // CDESIM_TRANSFORMS_HPP_
