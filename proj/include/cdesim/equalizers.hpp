#ifndef CDESIM_EQUALIZERS_HPP_
#define CDESIM_EQUALIZERS_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cdesim/banded.hpp"
#include "cdesim/flops.hpp"
#include "cdesim/system.hpp"

namespace cdesim {

// A built equalizer: either a dense solution matrix or a banded block grid,
// with the configuration that produced it and its modeled flop cost (solution
// construction plus one application).
struct EqualizerSolution {
    EqualizerKind kind = EqualizerKind::lzf_cde;
    double alpha = 0.0;
    int tau = 0;  // bandwidth used; order N means unrestricted
    int n = 0;    // transform size
    int n_tx = 0;
    int n_rx = 0;
    Flops modeled_flops;

    std::optional<Eigen::MatrixXcd> dense;
    std::optional<BandedBlockMatrix> banded;

    Eigen::MatrixXcd matrix() const;
};

// Y = (Pi^H Pi)^-1 Pi^H on the cosine-domain composite.
EqualizerSolution lzf_cde(const CompositeMatrix& pi);

// Y = (Pi^H Pi + I/snr)^-1 Pi^H; snr is linear.
EqualizerSolution lmmse_cde(const CompositeMatrix& pi, double snr_linear);

// Frequency-domain variants: the composite is built around the DFT pair,
// equalized there, and composed with the per-stream back conversion (inverse
// DFT, then forward DCT) so the output is directly comparable to the
// cosine-domain equalizers.
EqualizerSolution lzf_fde(const ChannelRealization& realization, int n, int ncp);
EqualizerSolution lmmse_fde(const ChannelRealization& realization, int n, int ncp,
                            double snr_linear);

// Band-limited recursive 2x2-quadrant block inversion. The grid must be
// 2^sigma x 2^sigma; every intermediate product and inverse is truncated to
// bandwidth 2*tau before use. Throws singular_matrix_error naming the failing
// depth and quadrant.
BandedBlockMatrix schur_block_invert(const BandedBlockMatrix& m, int tau, int sigma,
                                     OpCounter* counter = nullptr);

// How the banded equalizer carries out the inversion of the regularized
// normal matrix.
//   scheduled_truncation: every intermediate product and inverse is truncated
//     to bandwidth 2*tau (the discipline the complexity model charges for).
//   exact_inverse: the normal matrix (itself exactly 2*tau banded) is
//     inverted exactly and the solution matrix kept dense. At desk scale the
//     scheduled truncation of the inverse loses too much accuracy on
//     frequency-selective channels (the working bandwidth would need to
//     approach N), so this is the default for BER work; modeled flop counts
//     always report the analytic model of the scheduled construction.
enum class JlPolicy { scheduled_truncation, exact_inverse };

// The proposed equalizer: Y = (mu^H mu + alpha I)^-1 mu^H on the band-limited
// composite.
EqualizerSolution jlcrlzf_cde(const BandedBlockMatrix& mu, double alpha, int tau,
                              JlPolicy policy = JlPolicy::exact_inverse);

// Band-limit every composite block to bandwidth tau.
BandedBlockMatrix band_limit_composite(const CompositeMatrix& pi, int tau);

// X_hat = Y * received, split into per-transmit-antenna estimates.
std::vector<Eigen::VectorXcd> equalize(const EqualizerSolution& solution,
                                       const Eigen::VectorXcd& received);

}  // namespace cdesim

#endif  // CDESIM_EQUALIZERS_HPP_
