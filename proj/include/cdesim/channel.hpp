#ifndef CDESIM_CHANNEL_HPP_
#define CDESIM_CHANNEL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cdesim/errors.hpp"
#include "cdesim/rng.hpp"

namespace cdesim {

// One Rayleigh tap vector together with the power-delay profile it was drawn
// from (linear powers, summing to 1).
struct ChannelTaps {
    Eigen::VectorXcd taps;
    Eigen::VectorXd profile;

    int length() const { return static_cast<int>(taps.size()); }
};

struct CfoValue {
    double epsilon = 0.0;  // frequency shift normalized by subcarrier spacing
};

// Per antenna-pair taps and CFO for one block-fading draw. Pairs are indexed
// (rx, tx) over a complete n_rx x n_tx grid.
struct ChannelRealization {
    int n_rx = 0;
    int n_tx = 0;
    std::vector<ChannelTaps> taps;
    std::vector<CfoValue> cfo;

    const ChannelTaps& taps_at(int rx, int tx) const { return taps[rx * n_tx + tx]; }
    ChannelTaps& taps_at(int rx, int tx) { return taps[rx * n_tx + tx]; }
    const CfoValue& cfo_at(int rx, int tx) const { return cfo[rx * n_tx + tx]; }
    CfoValue& cfo_at(int rx, int tx) { return cfo[rx * n_tx + tx]; }
    bool complete() const {
        return n_rx >= 1 && n_tx >= 1 &&
               taps.size() == static_cast<std::size_t>(n_rx) * n_tx &&
               cfo.size() == static_cast<std::size_t>(n_rx) * n_tx;
    }
};

// (N+Ncp) x N selector prepending the last Ncp entries of a block.
Eigen::MatrixXd cp_add_matrix(int n, int ncp);

// N x (N+Ncp) selector keeping the last N entries; exact left-inverse of
// cp_add_matrix.
Eigen::MatrixXd cp_remove_matrix(int n, int ncp);

// Lower-triangular Toeplitz impulse-response matrix of the given size.
Eigen::MatrixXcd channel_irm(const ChannelTaps& taps, int size);

// Diagonal phase-ramp operator for a normalized CFO over a block of length
// N+Ncp; entry m is exp(i 2 pi epsilon m / N).
Eigen::MatrixXcd cfo_matrix(const CfoValue& epsilon, int n, int ncp);

CfoValue normalized_cfo(double f_hz, double delta_f_hz);

// Independent circularly-symmetric Gaussian taps with per-tap variance given
// by the profile (block fading: a fresh draw per call).
ChannelTaps draw_rayleigh_taps(const Eigen::VectorXd& profile, RandomStream& stream);

// Uniform on [-epsilon_max, +epsilon_max].
CfoValue draw_cfo(double epsilon_max, RandomStream& stream);

// Psi * H, the combined CFO-plus-channel operator.
Eigen::MatrixXcd hybrid_matrix(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& irm);

// Named power-delay profiles: "veha6" is the six-tap vehicular profile with
// relative powers [0, -1, -9, -10, -15, -20] dB normalized to unit total;
// "single" is one unit-power tap.
Eigen::VectorXd channel_profile(const std::string& id);

ChannelRealization draw_realization(int n_rx, int n_tx, const Eigen::VectorXd& profile,
                                    double epsilon_max, std::uint64_t master_seed,
                                    std::uint64_t iteration);

}  // namespace cdesim

#endif  // CDESIM_CHANNEL_HPP_
