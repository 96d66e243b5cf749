#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cdesim/equalizers.hpp"
#include "cdesim/transforms.hpp"

using namespace cdesim;

namespace {

ChannelRealization random_realization(int n_rx, int n_tx, double eps_max, std::uint64_t seed) {
    return draw_realization(n_rx, n_tx, channel_profile("veha6"), eps_max, seed, 0);
}

CompositeMatrix identity_composite(int n) {
    ChannelRealization r;
    r.n_rx = 1;
    r.n_tx = 1;
    ChannelTaps t;
    t.taps = Eigen::VectorXcd::Ones(1);
    t.profile = Eigen::VectorXd::Ones(1);
    r.taps.push_back(t);
    r.cfo.push_back(CfoValue{0.0});
    return assemble_mimo(r, n, n / 4);
}

std::vector<Eigen::VectorXd> random_symbols(int n_tx, int n, std::uint64_t seed) {
    RandomStream s(seed);
    std::vector<Eigen::VectorXd> out;
    for (int tx = 0; tx < n_tx; ++tx) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (auto& b : bits) b = s.bit();
        out.push_back(modulate_bits(bits));
    }
    return out;
}

BandedBlockMatrix random_dd_grid(int grid, int n, int tau, std::uint64_t seed) {
    RandomStream s(seed);
    BandedBlockMatrix m(grid, grid, n, std::min(tau, n - 1));
    for (int r = 0; r < grid; ++r) {
        for (int c = 0; c < grid; ++c) {
            Eigen::MatrixXcd d(n, n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) d(i, j) = s.complex_gaussian(1.0);
            }
            BandedMatrix b = band_limit(d, tau);
            if (r == c) b.add_to_diagonal(4.0 * grid * (2.0 * tau + 1.0));
            m.set_block(r, c, std::move(b));
        }
    }
    return m;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("zero forcing left-inverts the composite") {
    const CompositeMatrix eye = identity_composite(16);
    CHECK(max_abs(lzf_cde(eye).matrix() - Eigen::MatrixXcd::Identity(16, 16)) < 1e-10);

    const auto r = random_realization(2, 2, 0.1, 13);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const EqualizerSolution y = lzf_cde(pi);
    CHECK(y.alpha == 0.0);
    CHECK(max_abs(y.matrix() * pi.stacked() - Eigen::MatrixXcd::Identity(128, 128)) < 1e-8);
}

TEST_CASE("noiseless zero forcing recovers every symbol over many draws") {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = random_realization(2, 2, 0.1, seed);
        const CompositeMatrix pi = assemble_mimo(r, 64, 16);
        const auto symbols = random_symbols(2, 64, seed + 1000);
        RandomStream noise(seed);
        const Eigen::VectorXcd rx = transmit(symbols, pi, 0.0, noise);
        const auto est = equalize(lzf_cde(pi), rx);
        for (int tx = 0; tx < 2; ++tx) {
            const auto det = detect_bits(est[static_cast<std::size_t>(tx)]);
            const auto want = detect_bits(
                symbols[static_cast<std::size_t>(tx)].cast<std::complex<double>>());
            if (det != want) ++failures;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("lmmse reduces to zero forcing at large snr") {
    const auto r = random_realization(2, 2, 0.1, 21);
    const CompositeMatrix pi = assemble_mimo(r, 32, 8);
    CHECK(max_abs(lmmse_cde(pi, 1e12).matrix() - lzf_cde(pi).matrix()) < 1e-6);

    const CompositeMatrix eye = identity_composite(8);
    CHECK(max_abs(lmmse_cde(eye, 1.0).matrix() - 0.5 * Eigen::MatrixXcd::Identity(8, 8)) <
          1e-10);

    // straightforward dense formula as the oracle
    const Eigen::MatrixXcd p = pi.stacked();
    const double snr = 31.6;
    const Eigen::MatrixXcd oracle =
        (p.adjoint() * p + (1.0 / snr) * Eigen::MatrixXcd::Identity(64, 64)).inverse() *
        p.adjoint();
    CHECK(max_abs(lmmse_cde(pi, snr).matrix() - oracle) < 1e-10);

    CHECK_THROWS_AS(lmmse_cde(pi, 0.0), invalid_parameter_error);
}

TEST_CASE("frequency-domain equalizers agree with cosine-domain ones") {
    // ideal channel: exact symbol recovery
    ChannelRealization ideal;
    ideal.n_rx = ideal.n_tx = 1;
    ChannelTaps t;
    t.taps = Eigen::VectorXcd::Ones(1);
    t.profile = Eigen::VectorXd::Ones(1);
    ideal.taps.push_back(t);
    ideal.cfo.push_back(CfoValue{0.0});
    const CompositeMatrix pi_ideal = assemble_mimo(ideal, 32, 8);
    const auto symbols = random_symbols(1, 32, 5);
    RandomStream quiet(0);
    const Eigen::VectorXcd rx = transmit(symbols, pi_ideal, 0.0, quiet);
    const auto est = equalize(lzf_fde(ideal, 32, 8), rx);
    CHECK((est[0] - symbols[0].cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);

    // zero CFO: the two zero-forcing routes give the same estimates
    auto r = random_realization(2, 2, 0.0, 31);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const auto syms2 = random_symbols(2, 64, 6);
    RandomStream noise(3);
    const Eigen::VectorXcd rx2 = transmit(syms2, pi, 0.01, noise);
    const auto est_fde = equalize(lzf_fde(r, 64, 16), rx2);
    const auto est_cde = equalize(lzf_cde(pi), rx2);
    for (int tx = 0; tx < 2; ++tx) {
        CHECK((est_fde[static_cast<std::size_t>(tx)] - est_cde[static_cast<std::size_t>(tx)])
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }

    // with CFO and regularization the composed routes still coincide
    // algebraically (unitary transforms, isotropic ridge)
    auto r3 = random_realization(2, 2, 0.1, 41);
    const CompositeMatrix pi3 = assemble_mimo(r3, 32, 8);
    CHECK(max_abs(lmmse_fde(r3, 32, 8, 10.0).matrix() - lmmse_cde(pi3, 10.0).matrix()) < 1e-9);

    CHECK(lzf_fde(r3, 32, 8).kind == EqualizerKind::lzf_fde);
    CHECK(lmmse_fde(r3, 32, 8, 10.0).alpha == doctest::Approx(0.1));
}

TEST_CASE("schur block inversion matches the dense inverse without truncation") {
    // identity blocks
    BandedBlockMatrix eye(2, 2, 8, 0);
    eye.set_block(0, 0, BandedMatrix::identity(8));
    eye.set_block(1, 1, BandedMatrix::identity(8));
    const BandedBlockMatrix inv_eye = schur_block_invert(eye, 7, 1);
    CHECK(inv_eye.stacked().isIdentity(1e-12));

    const int n = 8;
    for (int sigma : {1, 2, 3}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const BandedBlockMatrix m = random_dd_grid(1 << sigma, n, n - 1, 100 * sigma + seed);
            const BandedBlockMatrix inv = schur_block_invert(m, n - 1, sigma);
            const Eigen::MatrixXcd dense_inv = m.stacked().inverse();
            CHECK(max_abs(inv.stacked() - dense_inv) < (sigma == 1 ? 1e-8 : 1e-7));
        }
    }

    // dimension and depth validation
    const BandedBlockMatrix odd(3, 3, 4, 1);
    CHECK_THROWS_AS(schur_block_invert(odd, 1, 2), invalid_dimension_error);
    CHECK_THROWS_AS(schur_block_invert(eye, 7, 0), invalid_parameter_error);
}

TEST_CASE("schur failures name the depth and quadrant") {
    BandedBlockMatrix m(2, 2, 4, 0);
    m.set_block(0, 0, BandedMatrix::identity(4));
    m.set_block(1, 1, BandedMatrix(4, 0));  // singular bottom-right quadrant
    CHECK_THROWS_WITH_AS(schur_block_invert(m, 3, 1), doctest::Contains("lambda4"),
                         singular_matrix_error);

    BandedBlockMatrix s(2, 2, 4, 0);
    // lambda4 fine, but the Schur complement vanishes: [[I, I], [I, I]]
    s.set_block(0, 0, BandedMatrix::identity(4));
    s.set_block(0, 1, BandedMatrix::identity(4));
    s.set_block(1, 0, BandedMatrix::identity(4));
    s.set_block(1, 1, BandedMatrix::identity(4));
    CHECK_THROWS_WITH_AS(schur_block_invert(s, 3, 1), doctest::Contains("Schur complement"),
                         singular_matrix_error);
    CHECK_THROWS_WITH_AS(schur_block_invert(s, 3, 1), doctest::Contains("depth 1"),
                         singular_matrix_error);
}

TEST_CASE("banded equalizer degenerate agreements") {
    // identity blocks, alpha 0 -> identity solution
    BandedBlockMatrix mu_eye(2, 2, 8, 0);
    mu_eye.set_block(0, 0, BandedMatrix::identity(8));
    mu_eye.set_block(1, 1, BandedMatrix::identity(8));
    for (JlPolicy policy : {JlPolicy::exact_inverse, JlPolicy::scheduled_truncation}) {
        const EqualizerSolution y = jlcrlzf_cde(mu_eye, 0.0, 7, policy);
        CHECK(max_abs(y.matrix() - Eigen::MatrixXcd::Identity(16, 16)) < 1e-10);
    }

    const auto r = random_realization(2, 2, 0.1, 77);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const BandedBlockMatrix mu = band_limit_composite(pi, 63);
    const double snr = std::pow(10.0, 1.5);
    for (JlPolicy policy : {JlPolicy::exact_inverse, JlPolicy::scheduled_truncation}) {
        CHECK(max_abs(jlcrlzf_cde(mu, 1.0 / snr, 63, policy).matrix() -
                      lmmse_cde(pi, snr).matrix()) < 1e-8);
        CHECK(max_abs(jlcrlzf_cde(mu, 0.0, 63, policy).matrix() - lzf_cde(pi).matrix()) < 1e-8);
    }

    const EqualizerSolution sol = jlcrlzf_cde(mu, 1e-2, 63);
    CHECK(sol.kind == EqualizerKind::jlcrlzf_cde);
    CHECK(sol.modeled_flops == flops_equalizer(EqualizerKind::jlcrlzf_cde, 1, 64, 63).flops);
}

TEST_CASE("banded equalizer on the banded composite") {
    const auto r = random_realization(2, 2, 0.1, 88);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const BandedBlockMatrix mu = band_limit_composite(pi, 15);
    CHECK(mu.bandwidth() == 15);

    const EqualizerSolution scheduled = jlcrlzf_cde(mu, 1e-2, 15, JlPolicy::scheduled_truncation);
    REQUIRE(scheduled.banded.has_value());
    CHECK(scheduled.banded->bandwidth() <= 30);
    const EqualizerSolution exact = jlcrlzf_cde(mu, 1e-2, 15, JlPolicy::exact_inverse);
    REQUIRE(exact.dense.has_value());

    // the scheduled solution is a band-limited approximation of the exact one
    Eigen::MatrixXcd exact_banded = exact.matrix();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            exact_banded.block(a * 64, b * 64, 64, 64) =
                band_limit(exact_banded.block(a * 64, b * 64, 64, 64), 30).dense();
        }
    }
    const double rel = (scheduled.matrix() - exact_banded).norm() / exact_banded.norm();
    CHECK(rel < 0.5);

    CHECK_THROWS_AS(jlcrlzf_cde(mu, -1.0, 15), invalid_parameter_error);
    CHECK_THROWS_AS(jlcrlzf_cde(mu, 1e-2, 64), invalid_parameter_error);
}

TEST_CASE("alpha zero failure advises regularization") {
    // rank-deficient banded composite: zero blocks
    BandedBlockMatrix mu(2, 2, 8, 0);
    CHECK_THROWS_WITH_AS(jlcrlzf_cde(mu, 0.0, 0), doctest::Contains("alpha > 0"),
                         singular_matrix_error);
}

TEST_CASE("equalize splits per transmit antenna and matches dense application") {
    const auto r = random_realization(2, 2, 0.1, 99);
    const CompositeMatrix pi = assemble_mimo(r, 64, 16);
    const BandedBlockMatrix mu = band_limit_composite(pi, 63);
    const auto symbols = random_symbols(2, 64, 7);
    RandomStream noise(8);
    const Eigen::VectorXcd rx = transmit(symbols, pi, 0.01, noise);

    const EqualizerSolution banded_sol = jlcrlzf_cde(mu, 1e-2, 63, JlPolicy::scheduled_truncation);
    const EqualizerSolution exact_sol = jlcrlzf_cde(mu, 1e-2, 63, JlPolicy::exact_inverse);
    const auto est_banded = equalize(banded_sol, rx);
    const auto est_exact = equalize(exact_sol, rx);
    REQUIRE(est_banded.size() == 2);
    for (int tx = 0; tx < 2; ++tx) {
        CHECK((est_banded[static_cast<std::size_t>(tx)] -
               est_exact[static_cast<std::size_t>(tx)])
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }

    // identity solution passes the received vector through
    EqualizerSolution ident;
    ident.kind = EqualizerKind::lzf_cde;
    ident.n = 64;
    ident.n_tx = 2;
    ident.n_rx = 2;
    ident.tau = 64;
    ident.dense = Eigen::MatrixXcd::Identity(128, 128);
    const auto est_id = equalize(ident, rx);
    CHECK((est_id[1] - rx.segment(64, 64)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(equalize(ident, Eigen::VectorXcd::Zero(64)), invalid_dimension_error);
}

TEST_CASE("ridge shrinkage is monotone in alpha") {
    const auto r = random_realization(2, 2, 0.1, 55);
    const CompositeMatrix pi = assemble_mimo(r, 32, 8);
    const BandedBlockMatrix mu = band_limit_composite(pi, 31);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.0, 1e-4, 1e-2, 1e-1, 1.0, 10.0}) {
        const double norm = jlcrlzf_cde(mu, alpha, 31).matrix().norm();
        CHECK(norm <= prev * (1.0 + 1e-12));
        prev = norm;
    }
}

TEST_CASE("composite interference mass decays away from the diagonal") {
    // averaged over realizations, the per-distance mean magnitude of the
    // composite alternates between even and odd families but decays within
    // each; far distances carry little mass
    const int n = 64;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd cnt = Eigen::VectorXd::Zero(n);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = random_realization(2, 2, 0.1, seed + 555);
        const CompositeMatrix pi = assemble_mimo(r, n, 16);
        for (const auto& block : pi.blocks) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int d = std::abs(i - j);
                    acc(d) += std::abs(block(i, j));
                    cnt(d) += 1.0;
                }
            }
        }
    }
    const Eigen::VectorXd mean = acc.cwiseQuotient(cnt);
    for (int d = 2; d + 2 < n; ++d) {
        CHECK(mean(d + 2) <= mean(d) * (1.0 + 1e-9));
    }
    CHECK(mean(0) > mean(1));
    CHECK(mean.segment(16, n - 16).maxCoeff() < 0.05 * mean(0));
}
