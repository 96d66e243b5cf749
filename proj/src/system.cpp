#include "cdesim/system.hpp"

#include <string>

#include "cdesim/transforms.hpp"

namespace cdesim {

Eigen::MatrixXcd CompositeMatrix::stacked() const {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(n_rx) * n, static_cast<Eigen::Index>(n_tx) * n);
    for (int rx = 0; rx < n_rx; ++rx) {
        for (int tx = 0; tx < n_tx; ++tx) {
            out.block(rx * n, tx * n, n, n) = block(rx, tx);
        }
    }
    return out;
}

Eigen::VectorXd modulate_bits(const std::vector<std::uint8_t>& bits) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) s(static_cast<Eigen::Index>(i)) = bits[i] ? 1.0 : -1.0;
    return s;
}

std::vector<std::uint8_t> detect_bits(const Eigen::VectorXcd& equalized) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(equalized.size()));
    for (Eigen::Index i = 0; i < equalized.size(); ++i) {
        bits[static_cast<std::size_t>(i)] = equalized(i).real() >= 0.0 ? 1 : 0;
    }
    return bits;
}

Eigen::MatrixXcd cp_windowed_block(const Eigen::MatrixXcd& lambda, int n, int ncp) {
    if (lambda.rows() != n + ncp || lambda.cols() != n + ncp) {
        throw invalid_dimension_error("hybrid operator must be (N+Ncp) x (N+Ncp)");
    }
    // P_cp- picks the last N rows; lambda * P_cp+ duplicates the tail columns
    // into the prefix positions.
    Eigen::MatrixXcd core = lambda.bottomRightCorner(n, n);
    core.rightCols(ncp) += lambda.bottomLeftCorner(n, ncp);
    return core;
}

Eigen::MatrixXcd composite_block(const Eigen::MatrixXcd& lambda, int n, int ncp) {
    const Eigen::MatrixXd dct = dct_matrix_real(n);
    const Eigen::MatrixXd idct = idct_matrix_real(n);
    return dct * cp_windowed_block(lambda, n, ncp) * idct;
}

CompositeMatrix assemble_mimo(const ChannelRealization& realization, int n, int ncp) {
    if (!realization.complete()) {
        throw invalid_dimension_error("channel realization grid is incomplete");
    }
    CompositeMatrix pi;
    pi.n_rx = realization.n_rx;
    pi.n_tx = realization.n_tx;
    pi.n = n;
    pi.blocks.reserve(static_cast<std::size_t>(pi.n_rx) * pi.n_tx);
    const Eigen::MatrixXd dct = dct_matrix_real(n);
    const Eigen::MatrixXd idct = idct_matrix_real(n);
    for (int rx = 0; rx < pi.n_rx; ++rx) {
        for (int tx = 0; tx < pi.n_tx; ++tx) {
            const Eigen::MatrixXcd psi = cfo_matrix(realization.cfo_at(rx, tx), n, ncp);
            const Eigen::MatrixXcd irm = channel_irm(realization.taps_at(rx, tx), n + ncp);
            const Eigen::MatrixXcd lambda = hybrid_matrix(psi, irm);
            pi.blocks.push_back(dct * cp_windowed_block(lambda, n, ncp) * idct);
        }
    }
    return pi;
}

Eigen::VectorXcd transmit(const std::vector<Eigen::VectorXd>& symbols,
                          const CompositeMatrix& pi, double noise_power,
                          RandomStream& noise_stream) {
    if (static_cast<int>(symbols.size()) != pi.n_tx) {
        throw invalid_dimension_error("need one symbol vector per transmit antenna");
    }
    Eigen::VectorXcd x(static_cast<Eigen::Index>(pi.n_tx) * pi.n);
    for (int tx = 0; tx < pi.n_tx; ++tx) {
        if (symbols[static_cast<std::size_t>(tx)].size() != pi.n) {
            throw invalid_dimension_error("symbol vector " + std::to_string(tx) +
                                          " has the wrong length");
        }
        x.segment(tx * pi.n, pi.n) =
            symbols[static_cast<std::size_t>(tx)].cast<std::complex<double>>();
    }

    Eigen::VectorXcd received = pi.stacked() * x;
    if (noise_power > 0.0) {
        const Eigen::MatrixXd dct = dct_matrix_real(pi.n);
        Eigen::VectorXcd z(pi.n);
        for (int rx = 0; rx < pi.n_rx; ++rx) {
            // Only the last N noise samples of an (N+Ncp) block survive CP
            // removal, so just N samples are drawn per antenna.
            for (int i = 0; i < pi.n; ++i) z(i) = noise_stream.complex_gaussian(noise_power);
            received.segment(rx * pi.n, pi.n) += dct * z;
        }
    } else if (noise_power < 0.0) {
        throw invalid_parameter_error("noise power must be >= 0");
    }
    return received;
}

}  // namespace cdesim
