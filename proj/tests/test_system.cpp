#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cdesim/system.hpp"
#include "cdesim/transforms.hpp"

using namespace cdesim;

namespace {

ChannelTaps make_taps(const Eigen::VectorXcd& h) {
    ChannelTaps t;
    t.taps = h;
    t.profile = Eigen::VectorXd::Ones(h.size()) / static_cast<double>(h.size());
    return t;
}

ChannelRealization single_pair(const Eigen::VectorXcd& h, double eps) {
    ChannelRealization r;
    r.n_rx = 1;
    r.n_tx = 1;
    r.taps.push_back(make_taps(h));
    r.cfo.push_back(CfoValue{eps});
    return r;
}

Eigen::VectorXcd unit_taps_vec() {
    Eigen::VectorXcd h(1);
    h(0) = 1.0;
    return h;
}

ChannelRealization random_realization(int n_rx, int n_tx, int l, double eps_max,
                                      std::uint64_t seed) {
    return draw_realization(n_rx, n_tx, Eigen::VectorXd::Ones(l) / l, eps_max, seed, 0);
}

}  // namespace

TEST_CASE("polar NRZ mapping") {
    const Eigen::VectorXd s = modulate_bits({1, 0, 1, 1});
    CHECK(s(0) == 1.0);
    CHECK(s(1) == -1.0);
    CHECK(s(2) == 1.0);
    CHECK(s(3) == 1.0);
    CHECK(modulate_bits({0, 0, 0}).maxCoeff() == -1.0);
}

TEST_CASE("hard decision on the real part") {
    Eigen::VectorXcd v(2);
    v << std::complex<double>(0.9, 0.0), std::complex<double>(-0.2, 0.3);
    const auto bits = detect_bits(v);
    CHECK(bits[0] == 1);
    CHECK(bits[1] == 0);

    Eigen::VectorXcd tie(1);
    tie << std::complex<double>(0.0, 5.0);
    CHECK(detect_bits(tie)[0] == 1);
}

TEST_CASE("composite block of the ideal channel is the identity") {
    for (auto [n, ncp] : {std::pair{8, 3}, {16, 0}, {64, 16}}) {
        const Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Identity(n + ncp, n + ncp);
        const Eigen::MatrixXcd pi = composite_block(lambda, n, ncp);
        CHECK((pi - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("composite block equals the dense five-factor product") {
    const int n = 16, ncp = 4;
    const auto r = random_realization(1, 1, 3, 0.1, 77);
    const Eigen::MatrixXcd psi = cfo_matrix(r.cfo_at(0, 0), n, ncp);
    const Eigen::MatrixXcd irm = channel_irm(r.taps_at(0, 0), n + ncp);
    const Eigen::MatrixXcd lambda = hybrid_matrix(psi, irm);

    const Eigen::MatrixXcd oracle = dct_matrix_real(n).cast<std::complex<double>>() *
                                    cp_remove_matrix(n, ncp).cast<std::complex<double>>() *
                                    lambda *
                                    cp_add_matrix(n, ncp).cast<std::complex<double>>() *
                                    idct_matrix_real(n).cast<std::complex<double>>();
    CHECK((composite_block(lambda, n, ncp) - oracle).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(composite_block(Eigen::MatrixXcd::Identity(n, n), n, ncp),
                    invalid_dimension_error);
}

TEST_CASE("cfo-only composite interference decays along the row") {
    ChannelRealization r = single_pair(unit_taps_vec(), 0.1);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const Eigen::MatrixXcd& b = pi.block(0, 0);
    CHECK((b - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() > 1e-3);
    // row 25 (1-based) interference falls off with subcarrier distance
    const double d0 = std::abs(b(24, 24));
    const double d10 = std::abs(b(24, 34));
    const double d30 = std::abs(b(24, 54));
    CHECK(d0 > 10 * d10);
    CHECK(d10 > d30);
}

TEST_CASE("mimo assembly shapes") {
    CHECK(assemble_mimo(single_pair(unit_taps_vec(), 0.0), 64, 16)
              .stacked()
              .isIdentity(1e-12));

    const auto r22 = random_realization(2, 2, 4, 0.1, 5);
    const CompositeMatrix p22 = assemble_mimo(r22, 64, 16);
    CHECK(p22.stacked().rows() == 128);
    CHECK(p22.stacked().cols() == 128);
    CHECK(static_cast<int>(p22.blocks.size()) == 4);

    const auto r44 = random_realization(4, 4, 4, 0.1, 6);
    const CompositeMatrix p44 = assemble_mimo(r44, 64, 16);
    CHECK(p44.stacked().rows() == 256);
    CHECK(static_cast<int>(p44.blocks.size()) == 16);

    ChannelRealization broken = r22;
    broken.taps.pop_back();
    CHECK_THROWS_AS(assemble_mimo(broken, 64, 16), invalid_dimension_error);
}

TEST_CASE("noiseless transmit equals the dense product") {
    const auto r = random_realization(2, 2, 4, 0.1, 11);
    const CompositeMatrix pi = assemble_mimo(r, 32, 8);
    RandomStream bs(3);
    std::vector<Eigen::VectorXd> symbols;
    Eigen::VectorXcd stacked(64);
    for (int tx = 0; tx < 2; ++tx) {
        std::vector<std::uint8_t> bits(32);
        for (auto& b : bits) b = bs.bit();
        symbols.push_back(modulate_bits(bits));
        stacked.segment(tx * 32, 32) = symbols.back().cast<std::complex<double>>();
    }
    RandomStream noise(1);
    const Eigen::VectorXcd got = transmit(symbols, pi, 0.0, noise);
    CHECK((got - pi.stacked() * stacked).cwiseAbs().maxCoeff() < 1e-12);

    // identity composite passes symbols through
    const CompositeMatrix ideal = assemble_mimo(single_pair(unit_taps_vec(), 0.0), 32, 8);
    RandomStream noise2(1);
    const Eigen::VectorXcd thru = transmit({symbols[0]}, ideal, 0.0, noise2);
    CHECK((thru - symbols[0].cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cosine-domain noise stays white") {
    const int n = 16, ncp = 4, draws = 10000;
    const CompositeMatrix ideal = assemble_mimo(single_pair(unit_taps_vec(), 0.0), n, ncp);
    std::vector<Eigen::VectorXd> zero_syms{Eigen::VectorXd::Zero(n)};
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
    RandomStream noise(2024);
    for (int i = 0; i < draws; ++i) {
        const Eigen::VectorXcd rho = transmit(zero_syms, ideal, 1.0, noise);
        cov += rho * rho.adjoint();
    }
    cov /= draws;
    double max_off = 0.0;
    for (int r = 0; r < n; ++r) {
        CHECK(cov(r, r).real() == doctest::Approx(1.0).epsilon(0.05));
        for (int c = 0; c < n; ++c) {
            if (r != c) max_off = std::max(max_off, std::abs(cov(r, c)));
        }
    }
    CHECK(max_off < 0.05);
}

TEST_CASE("ideal chain round-trips bits exactly") {
    for (auto [n, ncp] : {std::pair{4, 0}, {4, 2}, {64, 16}}) {
        const CompositeMatrix ideal = assemble_mimo(single_pair(unit_taps_vec(), 0.0), n, ncp);
        RandomStream bs(n);
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (auto& b : bits) b = bs.bit();
        RandomStream noise(0);
        const Eigen::VectorXcd rx = transmit({modulate_bits(bits)}, ideal, 0.0, noise);
        CHECK(detect_bits(rx) == bits);
    }
}
