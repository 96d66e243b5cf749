#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cdesim/rng.hpp"
#include "cdesim/transforms.hpp"

using namespace cdesim;

namespace {
double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("idct entries at small orders") {
    CHECK(idct_matrix(1).entries(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

    const auto t2 = idct_matrix(2);
    CHECK(t2.entries(0, 0).real() == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(t2.entries(0, 1).real() == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(t2.entries(1, 0).real() == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(t2.entries(1, 1).real() == doctest::Approx(-0.70711).epsilon(1e-4));
    CHECK(t2.entries.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dct is the transpose of the idct") {
    const auto d2 = dct_matrix(2);
    const auto i2 = idct_matrix(2);
    CHECK(max_abs(d2.entries - i2.entries) < 1e-15);  // symmetric at order 2

    const auto d3 = dct_matrix(3);
    // transpose of the hand-evaluated 3-point synthesis matrix
    CHECK(d3.entries(1, 0).real() ==
          doctest::Approx(std::sqrt(2.0 / 3.0) * std::cos(M_PI / 6.0)).epsilon(1e-12));
    CHECK(d3.entries(1, 0).real() == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(d3.entries(0, 1).real() == doctest::Approx(0.57735).epsilon(1e-4));
    CHECK(max_abs(d3.entries - idct_matrix(3).entries.transpose()) == 0.0);
}

TEST_CASE("dct/idct pair is exactly inverse") {
    for (int n : {1, 2, 3, 8, 64}) {
        const Eigen::MatrixXd p = dct_matrix_real(n) * idct_matrix_real(n);
        CHECK((p - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("idct columns have unit norm") {
    const Eigen::MatrixXd m = idct_matrix_real(16);
    for (int c = 0; c < 16; ++c) CHECK(m.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("round trip on random vectors") {
    RandomStream stream(42);
    for (int n : {5, 64}) {
        const Eigen::MatrixXd dct = dct_matrix_real(n);
        const Eigen::MatrixXd idct = idct_matrix_real(n);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = stream.uniform_pm1();
            CHECK((idct * (dct * v) - v).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("dft pair is unitary") {
    CHECK(dft_matrix(1).entries(0, 0).real() == doctest::Approx(1.0));

    const auto f2 = dft_matrix(2);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(f2.entries(0, 0).real() == doctest::Approx(r));
    CHECK(f2.entries(1, 1).real() == doctest::Approx(-r));
    CHECK(max_abs(f2.entries - f2.entries.transpose()) < 1e-15);

    for (int n : {2, 4, 8}) {
        const auto f = dft_matrix(n);
        const auto fi = idft_matrix(n);
        CHECK(max_abs(f.entries * fi.entries - Eigen::MatrixXcd::Identity(n, n)) < 1e-12);
        CHECK(max_abs(fi.entries - f.entries.adjoint()) < 1e-15);
    }
}

TEST_CASE("order zero is rejected") {
    CHECK_THROWS_AS(idct_matrix(0), invalid_dimension_error);
    CHECK_THROWS_AS(dct_matrix(0), invalid_dimension_error);
    CHECK_THROWS_AS(dft_matrix(0), invalid_dimension_error);
    CHECK_THROWS_AS(idft_matrix(0), invalid_dimension_error);
}
