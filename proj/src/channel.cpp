#include "cdesim/channel.hpp"

#include <cmath>

namespace cdesim {

namespace {

void check_cp_dims(int n, int ncp) {
    if (n < 1) throw invalid_dimension_error("block length must be >= 1");
    if (ncp < 0 || ncp > n) {
        throw invalid_dimension_error("CP length must lie in [0, N], got " +
                                      std::to_string(ncp));
    }
}

}  // namespace

Eigen::MatrixXd cp_add_matrix(int n, int ncp) {
    check_cp_dims(n, ncp);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + ncp, n);
    for (int r = 0; r < ncp; ++r) p(r, n - ncp + r) = 1.0;
    p.bottomRows(n).setIdentity();
    return p;
}

Eigen::MatrixXd cp_remove_matrix(int n, int ncp) {
    check_cp_dims(n, ncp);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n + ncp);
    p.rightCols(n).setIdentity();
    return p;
}

Eigen::MatrixXcd channel_irm(const ChannelTaps& taps, int size) {
    const int l = taps.length();
    if (l < 1) throw invalid_parameter_error("channel needs at least one tap");
    if (l > size) {
        throw invalid_dimension_error("tap count exceeds the matrix size (" +
                                      std::to_string(l) + " > " + std::to_string(size) + ")");
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
    for (int c = 0; c < size; ++c) {
        for (int w = 0; w < l && c + w < size; ++w) h(c + w, c) = taps.taps(w);
    }
    return h;
}

Eigen::MatrixXcd cfo_matrix(const CfoValue& epsilon, int n, int ncp) {
    check_cp_dims(n, ncp);
    const int size = n + ncp;
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(size, size);
    for (int m = 0; m < size; ++m) {
        const double phase = 2.0 * M_PI * epsilon.epsilon * m / n;
        psi(m, m) = std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return psi;
}

CfoValue normalized_cfo(double f_hz, double delta_f_hz) {
    if (!(delta_f_hz > 0.0)) {
        throw invalid_parameter_error("subcarrier spacing must be > 0");
    }
    return CfoValue{f_hz / delta_f_hz};
}

ChannelTaps draw_rayleigh_taps(const Eigen::VectorXd& profile, RandomStream& stream) {
    if (profile.size() < 1) throw invalid_parameter_error("empty power-delay profile");
    ChannelTaps t;
    t.profile = profile;
    t.taps.resize(profile.size());
    for (Eigen::Index w = 0; w < profile.size(); ++w) {
        t.taps(w) = stream.complex_gaussian(profile(w));
    }
    return t;
}

CfoValue draw_cfo(double epsilon_max, RandomStream& stream) {
    if (epsilon_max < 0.0) throw invalid_parameter_error("epsilon_max must be >= 0");
    return CfoValue{epsilon_max * stream.uniform_pm1()};
}

Eigen::MatrixXcd hybrid_matrix(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& irm) {
    if (psi.cols() != irm.rows()) {
        throw invalid_dimension_error("hybrid_matrix: non-conformable factors");
    }
    return psi * irm;
}

Eigen::VectorXd channel_profile(const std::string& id) {
    if (id == "single") {
        return Eigen::VectorXd::Ones(1);
    }
    if (id == "veha6") {
        Eigen::VectorXd db(6);
        db << 0.0, -1.0, -9.0, -10.0, -15.0, -20.0;
        Eigen::VectorXd lin = Eigen::pow(10.0, (db / 10.0).array());
        return lin / lin.sum();
    }
    throw invalid_parameter_error("unknown channel profile '" + id +
                                  "' (valid: veha6, single)");
}

ChannelRealization draw_realization(int n_rx, int n_tx, const Eigen::VectorXd& profile,
                                    double epsilon_max, std::uint64_t master_seed,
                                    std::uint64_t iteration) {
    ChannelRealization r;
    r.n_rx = n_rx;
    r.n_tx = n_tx;
    r.taps.reserve(static_cast<std::size_t>(n_rx) * n_tx);
    r.cfo.reserve(static_cast<std::size_t>(n_rx) * n_tx);
    for (int rx = 0; rx < n_rx; ++rx) {
        for (int tx = 0; tx < n_tx; ++tx) {
            const std::uint64_t lane = static_cast<std::uint64_t>(rx) * n_tx + tx;
            RandomStream tap_stream(master_seed, iteration, lane, StreamPurpose::channel_taps);
            RandomStream cfo_stream(master_seed, iteration, lane, StreamPurpose::cfo);
            r.taps.push_back(draw_rayleigh_taps(profile, tap_stream));
            r.cfo.push_back(draw_cfo(epsilon_max, cfo_stream));
        }
    }
    return r;
}

}  // namespace cdesim
