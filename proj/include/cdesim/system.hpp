#ifndef CDESIM_SYSTEM_HPP_
#define CDESIM_SYSTEM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cdesim/channel.hpp"
#include "cdesim/rng.hpp"

namespace cdesim {

// Cosine-domain MIMO composite: an n_rx x n_tx grid of N x N blocks, where
// block (a,b) maps transmit-antenna-b symbols to receive-antenna-a samples
// after the full modulate / CP / channel / CP-remove / demodulate chain.
struct CompositeMatrix {
    int n_rx = 0;
    int n_tx = 0;
    int n = 0;
    std::vector<Eigen::MatrixXcd> blocks;

    const Eigen::MatrixXcd& block(int rx, int tx) const { return blocks[rx * n_tx + tx]; }
    Eigen::MatrixXcd& block(int rx, int tx) { return blocks[rx * n_tx + tx]; }
    Eigen::MatrixXcd stacked() const;
};

// Polar NRZ: bit 1 -> +1, bit 0 -> -1.
Eigen::VectorXd modulate_bits(const std::vector<std::uint8_t>& bits);

// Hard decision on the real part; exactly zero maps to bit 1.
std::vector<std::uint8_t> detect_bits(const Eigen::VectorXcd& equalized);

// The (N+Ncp)-to-N core of one composite block: CP removal, hybrid channel
// operator, CP insertion.
Eigen::MatrixXcd cp_windowed_block(const Eigen::MatrixXcd& lambda, int n, int ncp);

// One composite block: forward DCT of the CP-windowed hybrid operator applied
// around the inverse DCT.
Eigen::MatrixXcd composite_block(const Eigen::MatrixXcd& lambda, int n, int ncp);

CompositeMatrix assemble_mimo(const ChannelRealization& realization, int n, int ncp);

// Stacked noisy receive vector: pi * symbols + rho, with rho the cosine-domain
// image of per-antenna complex AWGN of per-entry variance noise_power. All
// noise comes from the given stream, so a stream rebuilt with the same key
// reproduces the same draw (scaled by the new noise power).
Eigen::VectorXcd transmit(const std::vector<Eigen::VectorXd>& symbols,
                          const CompositeMatrix& pi, double noise_power,
                          RandomStream& noise_stream);

}  // namespace cdesim

#endif  // CDESIM_SYSTEM_HPP_
