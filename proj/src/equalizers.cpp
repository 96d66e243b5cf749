#include "cdesim/equalizers.hpp"

#include <cmath>
#include <sstream>

#include "cdesim/transforms.hpp"

namespace cdesim {

namespace {

// Dense ridge solve (A + alpha I)^-1 B with a condition guard matching
// banded_invert's threshold.
Eigen::MatrixXcd ridge_solve(const Eigen::MatrixXcd& normal, double alpha,
                             const Eigen::MatrixXcd& rhs, const char* what) {
    Eigen::MatrixXcd a = normal;
    a.diagonal().array() += alpha;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
    const double cond = a.cwiseAbs().colwise().sum().maxCoeff() *
                        inv.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(cond) || cond > 1e12) {
        std::ostringstream os;
        os << what << ": normal matrix is singular or ill-conditioned (cond est " << cond << ")";
        throw singular_matrix_error(os.str());
    }
    return inv * rhs;
}

int antenna_exponent(int count, const char* what) {
    int sigma = 0;
    while ((1 << sigma) < count) ++sigma;
    if ((1 << sigma) != count) {
        throw invalid_dimension_error(std::string(what) + ": antenna count must be a power of 2");
    }
    return sigma;
}

// Quadrant of a block grid: qr, qc in {0, 1}.
BandedBlockMatrix grid_quadrant(const BandedBlockMatrix& m, int qr, int qc) {
    const int half = m.block_rows() / 2;
    BandedBlockMatrix out(half, half, m.order(), m.bandwidth());
    for (int r = 0; r < half; ++r) {
        for (int c = 0; c < half; ++c) out.set_block(r, c, m.block(qr * half + r, qc * half + c));
    }
    return out;
}

BandedBlockMatrix grid_multiply(const BandedBlockMatrix& a, const BandedBlockMatrix& b,
                                int limit, OpCounter* counter) {
    BandedBlockMatrix out(a.block_rows(), b.block_cols(), a.order(),
                          std::min(limit, a.order() - 1));
    for (int r = 0; r < a.block_rows(); ++r) {
        for (int c = 0; c < b.block_cols(); ++c) {
            BandedMatrix acc = banded_multiply(a.block(r, 0), b.block(0, c), limit, counter);
            for (int k = 1; k < a.block_cols(); ++k) {
                acc = banded_add(
                    acc, banded_multiply(a.block(r, k), b.block(k, c), limit, counter), 1,
                    counter);
            }
            out.set_block(r, c, std::move(acc));
        }
    }
    return out;
}

BandedBlockMatrix grid_addsub(const BandedBlockMatrix& a, const BandedBlockMatrix& b, int sign,
                              OpCounter* counter) {
    BandedBlockMatrix out(a.block_rows(), a.block_cols(), a.order(),
                          std::max(a.bandwidth(), b.bandwidth()));
    for (int r = 0; r < a.block_rows(); ++r) {
        for (int c = 0; c < a.block_cols(); ++c) {
            out.set_block(r, c, banded_add(a.block(r, c), b.block(r, c), sign, counter));
        }
    }
    return out;
}

BandedBlockMatrix grid_negate(const BandedBlockMatrix& a) {
    BandedBlockMatrix out(a.block_rows(), a.block_cols(), a.order(), a.bandwidth());
    for (int r = 0; r < a.block_rows(); ++r) {
        for (int c = 0; c < a.block_cols(); ++c) out.set_block(r, c, a.block(r, c).negated());
    }
    return out;
}

// Recursive quadrant inversion. depth counts down to the single-block base
// case; limit is the bandwidth every intermediate is truncated to.
BandedBlockMatrix grid_invert(const BandedBlockMatrix& m, int limit, int depth,
                              OpCounter* counter) {
    if (m.block_rows() == 1) {
        try {
            BandedBlockMatrix out(1, 1, m.order(), std::min(limit, m.order() - 1));
            out.set_block(0, 0, banded_invert(m.block(0, 0), limit));
            return out;
        } catch (const singular_matrix_error& e) {
            throw singular_matrix_error(std::string("base block: ") + e.what());
        }
    }

    const auto l1 = grid_quadrant(m, 0, 0);
    const auto l2 = grid_quadrant(m, 0, 1);
    const auto l3 = grid_quadrant(m, 1, 0);
    const auto l4 = grid_quadrant(m, 1, 1);

    BandedBlockMatrix l4inv;
    try {
        l4inv = grid_invert(l4, limit, depth - 1, counter);
    } catch (const singular_matrix_error& e) {
        std::ostringstream os;
        os << "depth " << depth << ", quadrant lambda4: " << e.what();
        throw singular_matrix_error(os.str());
    }

    // Schur complement of the bottom-right quadrant.
    const auto t = grid_multiply(l2, l4inv, limit, counter);            // lambda2 lambda4^-1
    const auto s = grid_addsub(l1, grid_multiply(t, l3, limit, counter), -1, counter);

    BandedBlockMatrix phi;
    try {
        phi = grid_invert(s, limit, depth - 1, counter);
    } catch (const singular_matrix_error& e) {
        std::ostringstream os;
        os << "depth " << depth << ", Schur complement: " << e.what();
        throw singular_matrix_error(os.str());
    }

    const auto u = grid_multiply(l4inv, l3, limit, counter);            // lambda4^-1 lambda3
    const auto w = grid_multiply(u, phi, limit, counter);               // lambda4^-1 lambda3 phi
    const auto top_right = grid_negate(grid_multiply(phi, t, limit, counter));
    const auto bottom_right =
        grid_addsub(l4inv, grid_multiply(w, t, limit, counter), 1, counter);

    const int half = m.block_rows() / 2;
    BandedBlockMatrix out(m.block_rows(), m.block_cols(), m.order(),
                          std::min(limit, m.order() - 1));
    for (int r = 0; r < half; ++r) {
        for (int c = 0; c < half; ++c) {
            out.set_block(r, c, phi.block(r, c));
            out.set_block(r, half + c, top_right.block(r, c));
            out.set_block(half + r, c, w.block(r, c).negated());
            out.set_block(half + r, half + c, bottom_right.block(r, c));
        }
    }
    return out;
}

// Block-diagonal stack of i copies of an N x N operator.
Eigen::MatrixXcd stack_per_stream(const Eigen::MatrixXcd& op, int copies) {
    const int n = static_cast<int>(op.rows());
    Eigen::MatrixXcd out =
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(copies) * n,
                               static_cast<Eigen::Index>(copies) * n);
    for (int k = 0; k < copies; ++k) out.block(k * n, k * n, n, n) = op;
    return out;
}

EqualizerSolution fde_solution(const ChannelRealization& realization, int n, int ncp,
                               double alpha, EqualizerKind kind) {
    if (!realization.complete()) {
        throw invalid_dimension_error("channel realization grid is incomplete");
    }
    const Eigen::MatrixXcd f = dft_matrix(n).entries;
    const Eigen::MatrixXcd fh = f.adjoint();

    // Composite around the DFT pair instead of the DCT pair.
    Eigen::MatrixXcd pif(static_cast<Eigen::Index>(realization.n_rx) * n,
                         static_cast<Eigen::Index>(realization.n_tx) * n);
    for (int rx = 0; rx < realization.n_rx; ++rx) {
        for (int tx = 0; tx < realization.n_tx; ++tx) {
            const Eigen::MatrixXcd psi = cfo_matrix(realization.cfo_at(rx, tx), n, ncp);
            const Eigen::MatrixXcd irm = channel_irm(realization.taps_at(rx, tx), n + ncp);
            pif.block(rx * n, tx * n, n, n) =
                f * cp_windowed_block(hybrid_matrix(psi, irm), n, ncp) * fh;
        }
    }

    const Eigen::MatrixXcd yf =
        ridge_solve(pif.adjoint() * pif, alpha, pif.adjoint(),
                    kind == EqualizerKind::lzf_fde ? "lzf_fde" : "lmmse_fde");

    // Back conversion: received cosine-domain samples are re-expanded to the
    // frequency domain on the way in, and the estimates are converted back to
    // the cosine domain per stream on the way out.
    const Eigen::MatrixXd dct = dct_matrix_real(n);
    const Eigen::MatrixXcd to_freq = f * dct.transpose().cast<std::complex<double>>();
    const Eigen::MatrixXcd to_cosine = dct.cast<std::complex<double>>() * fh;

    EqualizerSolution sol;
    sol.kind = kind;
    sol.alpha = alpha;
    sol.tau = n;
    sol.n = n;
    sol.n_tx = realization.n_tx;
    sol.n_rx = realization.n_rx;
    sol.dense = stack_per_stream(to_cosine, realization.n_tx) * yf *
                stack_per_stream(to_freq, realization.n_rx);
    sol.modeled_flops =
        flops_equalizer(kind, antenna_exponent(realization.n_tx, "fde"), n, n - 1).flops;
    return sol;
}

}  // namespace

Eigen::MatrixXcd EqualizerSolution::matrix() const {
    if (dense) return *dense;
    if (banded) return banded->stacked();
    throw invalid_parameter_error("empty equalizer solution");
}

EqualizerSolution lzf_cde(const CompositeMatrix& pi) {
    const Eigen::MatrixXcd p = pi.stacked();
    EqualizerSolution sol;
    sol.kind = EqualizerKind::lzf_cde;
    sol.alpha = 0.0;
    sol.tau = pi.n;
    sol.n = pi.n;
    sol.n_tx = pi.n_tx;
    sol.n_rx = pi.n_rx;
    sol.dense = ridge_solve(p.adjoint() * p, 0.0, p.adjoint(), "lzf_cde");
    sol.modeled_flops =
        flops_equalizer(EqualizerKind::lzf_cde, antenna_exponent(pi.n_tx, "lzf_cde"), pi.n,
                        pi.n - 1)
            .flops;
    return sol;
}

EqualizerSolution lmmse_cde(const CompositeMatrix& pi, double snr_linear) {
    if (!(snr_linear > 0.0)) throw invalid_parameter_error("snr must be > 0");
    const Eigen::MatrixXcd p = pi.stacked();
    EqualizerSolution sol;
    sol.kind = EqualizerKind::lmmse_cde;
    sol.alpha = 1.0 / snr_linear;
    sol.tau = pi.n;
    sol.n = pi.n;
    sol.n_tx = pi.n_tx;
    sol.n_rx = pi.n_rx;
    sol.dense = ridge_solve(p.adjoint() * p, sol.alpha, p.adjoint(), "lmmse_cde");
    sol.modeled_flops =
        flops_equalizer(EqualizerKind::lmmse_cde, antenna_exponent(pi.n_tx, "lmmse_cde"), pi.n,
                        pi.n - 1)
            .flops;
    return sol;
}

EqualizerSolution lzf_fde(const ChannelRealization& realization, int n, int ncp) {
    return fde_solution(realization, n, ncp, 0.0, EqualizerKind::lzf_fde);
}

EqualizerSolution lmmse_fde(const ChannelRealization& realization, int n, int ncp,
                            double snr_linear) {
    if (!(snr_linear > 0.0)) throw invalid_parameter_error("snr must be > 0");
    return fde_solution(realization, n, ncp, 1.0 / snr_linear, EqualizerKind::lmmse_fde);
}

BandedBlockMatrix schur_block_invert(const BandedBlockMatrix& m, int tau, int sigma,
                                     OpCounter* counter) {
    if (sigma < 1) throw invalid_parameter_error("schur_block_invert needs sigma >= 1");
    if (m.block_rows() != m.block_cols() || m.block_rows() != (1 << sigma)) {
        throw invalid_dimension_error("schur_block_invert: grid must be 2^sigma x 2^sigma");
    }
    if (tau < 0) throw invalid_parameter_error("tau must be >= 0");
    const int limit = std::min(2 * tau, m.order() - 1);
    return grid_invert(m, limit, sigma, counter);
}

BandedBlockMatrix band_limit_composite(const CompositeMatrix& pi, int tau) {
    const int bw = std::min(tau, pi.n - 1);
    BandedBlockMatrix mu(pi.n_rx, pi.n_tx, pi.n, bw);
    for (int rx = 0; rx < pi.n_rx; ++rx) {
        for (int tx = 0; tx < pi.n_tx; ++tx) {
            mu.set_block(rx, tx, band_limit(pi.block(rx, tx), bw));
        }
    }
    return mu;
}

EqualizerSolution jlcrlzf_cde(const BandedBlockMatrix& mu, double alpha, int tau,
                              JlPolicy policy) {
    if (alpha < 0.0) throw invalid_parameter_error("alpha must be >= 0");
    if (tau < 0 || tau > mu.order() - 1) {
        throw invalid_parameter_error("tau must lie in [0, N-1]");
    }
    const int n = mu.order();
    const int limit = std::min(2 * tau, n - 1);
    const int n_rx = mu.block_rows();
    const int n_tx = mu.block_cols();
    const int sigma = antenna_exponent(n_tx, "jlcrlzf_cde");
    if (n_rx != n_tx) {
        throw invalid_dimension_error("jlcrlzf_cde expects a square antenna configuration");
    }

    // Normal matrix mu^H mu, block by block. A product of two tau-banded
    // blocks is at most 2*tau banded, so the truncation here is lossless.
    BandedBlockMatrix normal(n_tx, n_tx, n, limit);
    for (int a = 0; a < n_tx; ++a) {
        for (int b = 0; b < n_tx; ++b) {
            BandedMatrix acc =
                banded_multiply(mu.block(0, a).adjoint(), mu.block(0, b), limit, nullptr);
            for (int k = 1; k < n_rx; ++k) {
                acc = banded_add(
                    acc, banded_multiply(mu.block(k, a).adjoint(), mu.block(k, b), limit, nullptr));
            }
            if (a == b) acc.add_to_diagonal(alpha);
            normal.set_block(a, b, std::move(acc));
        }
    }

    EqualizerSolution sol;
    sol.kind = EqualizerKind::jlcrlzf_cde;
    sol.alpha = alpha;
    sol.tau = tau;
    sol.n = n;
    sol.n_tx = n_tx;
    sol.n_rx = n_rx;
    sol.modeled_flops = flops_equalizer(EqualizerKind::jlcrlzf_cde, sigma, n, tau).flops;

    if (policy == JlPolicy::exact_inverse) {
        // Y = (mu^H mu + alpha I)^-1 mu^H with the inversion done exactly.
        const Eigen::MatrixXcd muh = mu.stacked().adjoint();
        try {
            sol.dense = ridge_solve(normal.stacked(), 0.0, muh, "jlcrlzf_cde");
        } catch (const singular_matrix_error& e) {
            if (alpha == 0.0) {
                throw singular_matrix_error(
                    std::string("jlcrlzf_cde: regularized normal matrix is singular at "
                                "alpha=0; use alpha > 0 (") +
                    e.what() + ")");
            }
            throw;
        }
        return sol;
    }

    BandedBlockMatrix inv;
    try {
        if (n_tx == 1) {
            inv = BandedBlockMatrix(1, 1, n, limit);
            inv.set_block(0, 0, banded_invert(normal.block(0, 0), limit));
        } else {
            inv = schur_block_invert(normal, tau, sigma);
        }
    } catch (const singular_matrix_error& e) {
        if (alpha == 0.0) {
            throw singular_matrix_error(
                std::string("jlcrlzf_cde: regularized normal matrix is singular at alpha=0; "
                            "use alpha > 0 (") +
                e.what() + ")");
        }
        throw;
    }

    // Y = inv * mu^H, truncated to the working band.
    BandedBlockMatrix y(n_tx, n_rx, n, limit);
    for (int a = 0; a < n_tx; ++a) {
        for (int b = 0; b < n_rx; ++b) {
            BandedMatrix acc =
                banded_multiply(inv.block(a, 0), mu.block(b, 0).adjoint(), limit, nullptr);
            for (int k = 1; k < n_tx; ++k) {
                acc = banded_add(
                    acc, banded_multiply(inv.block(a, k), mu.block(b, k).adjoint(), limit,
                                         nullptr));
            }
            y.set_block(a, b, std::move(acc));
        }
    }
    sol.banded = std::move(y);
    return sol;
}

std::vector<Eigen::VectorXcd> equalize(const EqualizerSolution& solution,
                                       const Eigen::VectorXcd& received) {
    if (received.size() != static_cast<Eigen::Index>(solution.n_rx) * solution.n) {
        throw invalid_dimension_error("equalize: received vector length mismatch");
    }
    Eigen::VectorXcd stacked;
    if (solution.banded) {
        stacked = solution.banded->apply(received);
    } else if (solution.dense) {
        stacked = *solution.dense * received;
    } else {
        throw invalid_parameter_error("empty equalizer solution");
    }
    std::vector<Eigen::VectorXcd> out;
    out.reserve(static_cast<std::size_t>(solution.n_tx));
    for (int a = 0; a < solution.n_tx; ++a) out.push_back(stacked.segment(a * solution.n, solution.n));
    return out;
}

}  // namespace cdesim
