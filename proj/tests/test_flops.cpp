#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdesim/flops.hpp"

using namespace cdesim;

namespace {
Flops fl(std::int64_t num, std::int64_t den = 1) { return Flops(num, den); }
}  // namespace

TEST_CASE("full-matrix operation costs") {
    CHECK(flops_full(FullMatrixOp::mult, 2) == fl(32));
    CHECK(flops_full(FullMatrixOp::inv, 1) == fl(11, 2));  // 5.5 flops = 11 operations
    CHECK(flops_full(FullMatrixOp::matvec, 64) == fl(16384));
    CHECK(flops_full(FullMatrixOp::add, 7) == fl(49));
    CHECK_THROWS_AS(flops_full(FullMatrixOp::mult, 0), invalid_parameter_error);
}

TEST_CASE("banded operation costs") {
    CHECK(flops_banded(BandedMatrixOp::mult, 64, 15) == fl(238336));
    CHECK(flops_banded(BandedMatrixOp::add, 64, 0) == fl(32));  // N/2
    CHECK(flops_banded(BandedMatrixOp::matvec, 64, 15) == fl(7936));
    CHECK(flops_banded(BandedMatrixOp::inv_table4, 1, 1) == fl(16));
    CHECK(flops_banded(BandedMatrixOp::inv_text, 1, 1) == fl(83, 2));
    // the two inversion models genuinely differ
    CHECK(flops_banded(BandedMatrixOp::inv_text, 64, 15) !=
          flops_banded(BandedMatrixOp::inv_table4, 64, 15));
    CHECK_THROWS_AS(flops_banded(BandedMatrixOp::mult, 64, -1), invalid_parameter_error);
}

TEST_CASE("equalizer cost polynomials") {
    CHECK(flops_equalizer(EqualizerKind::lzf_cde, 1, 64, 63).flops == fl(25247808));
    CHECK(flops_equalizer(EqualizerKind::jlcrlzf_cde, 1, 64, 15).flops == fl(21273728));

    // closed forms for every tabulated stage, evaluated exactly
    const std::int64_t tau = 15, n = 64;
    const std::int64_t t2 = tau * tau;
    const std::int64_t expected[6][3] = {
        {1448, 434, 92},       {7248, 2052, 412},     {31904, 8840, 1736},
        {133440, 36624, 7120}, {545408, 149024, 28832}, {2204928, 601152, 116032},
    };
    for (int sigma = 1; sigma <= 6; ++sigma) {
        const auto* c = expected[sigma - 1];
        CHECK(flops_equalizer(EqualizerKind::jlcrlzf_cde, sigma, n, tau).flops ==
              fl(n * (c[0] * t2 + c[1] * tau + c[2])));
    }

    // dense kinds at M = 2^sigma N
    const std::int64_t m = 256;
    CHECK(flops_equalizer(EqualizerKind::lmmse_cde, 2, 64, 63).flops ==
          fl(12 * m * m * m + 5 * m * m) + fl(5, 2) * fl(m));
    CHECK(flops_equalizer(EqualizerKind::lzf_fde, 2, 64, 63).flops ==
          fl(12 * m * m * m + 6 * m * m) - fl(m, 2));
    CHECK(flops_equalizer(EqualizerKind::lmmse_fde, 2, 64, 63).flops ==
          fl(12 * m * m * m + 6 * m * m + 2 * m));
}

TEST_CASE("modeled ordering at table parameters") {
    for (int sigma = 1; sigma <= 6; ++sigma) {
        const auto j = flops_equalizer(EqualizerKind::jlcrlzf_cde, sigma, 64, 15).flops;
        const auto lzf = flops_equalizer(EqualizerKind::lzf_cde, sigma, 64, 15).flops;
        const auto lmmse = flops_equalizer(EqualizerKind::lmmse_cde, sigma, 64, 15).flops;
        const auto lzf_f = flops_equalizer(EqualizerKind::lzf_fde, sigma, 64, 15).flops;
        const auto lmmse_f = flops_equalizer(EqualizerKind::lmmse_fde, sigma, 64, 15).flops;
        CHECK(j < lzf);
        CHECK(lzf < lmmse);
        CHECK(lmmse < lzf_f);
        CHECK(lzf_f < lmmse_f);
    }
}

TEST_CASE("stage extension beyond the tabulated range") {
    // the sigma=7 cost must extend the construction rule that reproduces the
    // tabulated stages: quadrant-inverse and Schur inversion each cost the
    // stage-6 total, plus two quadrant products and a subtraction, plus the
    // quadrupled off quadrants and the usual tail.
    const std::int64_t n = 64, tau = 15;
    auto poly = [&](std::int64_t a2, std::int64_t a1, Flops a0) {
        return fl(n) * (fl(a2 * tau * tau) + fl(a1 * tau) + a0);
    };
    const Flops tot6 = poly(1549568, 404544, fl(50432));
    const Flops prod7 = poly(256 * 4096, 32 * 4096, fl(4 * 4096));
    const Flops sub7 = poly(0, 4 * 4096, fl(4096, 2));
    const Flops phi7 = fl(2) * tot6 + fl(2) * prod7 + sub7;
    const Flops off7 = poly(4 * (65536 + 131072 + 65536), 4 * (32768 + 65536 + 36864),
                            fl(4 * (4096 + 8192 + 4608)));
    const Flops tail7 = poly(16384 * (16 + 144), 16384 * (8 + 24 + 16),
                             fl(16384 * (4 + 4 + 8) + 128));
    CHECK(flops_equalizer(EqualizerKind::jlcrlzf_cde, 7, 64, 15).flops ==
          phi7 + off7 + tail7);
    CHECK(flops_equalizer(EqualizerKind::jlcrlzf_cde, 7, 64, 15).flops >
          flops_equalizer(EqualizerKind::jlcrlzf_cde, 6, 64, 15).flops);
}

TEST_CASE("time reduction percentages") {
    CHECK(time_reduction(3.0, 3.0) == 0.0);
    CHECK(time_reduction(2.379, 4.311) == doctest::Approx(81.21).epsilon(0.00006));
    CHECK(time_reduction(2.379, 4.371) == doctest::Approx(83.73).epsilon(0.00006));
    CHECK(time_reduction(1.0, 2.0) < time_reduction(1.0, 2.5));
    CHECK_THROWS_AS(time_reduction(0.0, 1.0), invalid_parameter_error);
    CHECK_THROWS_AS(time_reduction(-1.0, 1.0), invalid_parameter_error);
}

TEST_CASE("recursion audit surfaces the stage-1 total inconsistency") {
    const auto report = recursion_audit(4, 64, 15);
    REQUIRE(report.rows.size() == 4);

    CHECK(report.rows[0].sigma == 1);
    CHECK(report.rows[0].matches);  // base case is the tabulated form
    CHECK(report.rows[0].recursion_flops == fl(21273728));

    CHECK_FALSE(report.rows[1].matches);  // the literal rule undershoots stage 2
    REQUIRE(report.rows[1].tabulated_flops.has_value());
    CHECK(report.rows[1].recursion_flops < *report.rows[1].tabulated_flops);

    bool noted = false;
    for (const auto& note : report.notes) {
        if (note.find("808") != std::string::npos && note.find("680") != std::string::npos) {
            noted = true;
        }
    }
    CHECK(noted);

    // deterministic
    CHECK(recursion_audit(4, 64, 15).str() == report.str());
    CHECK_THROWS_AS(recursion_audit(1, 64, 15), invalid_parameter_error);
}
