#include "cdesim/transforms.hpp"

#include <cmath>
#include <string>

namespace cdesim {

namespace {

void check_order(int n) {
    if (n < 1) {
        throw invalid_dimension_error("transform order must be >= 1, got " + std::to_string(n));
    }
}

}  // namespace

Eigen::MatrixXd idct_matrix_real(int n) {
    check_order(n);
    Eigen::MatrixXd m(n, n);
    const double beta0 = 1.0 / std::sqrt(static_cast<double>(n));
    const double beta = std::sqrt(2.0 / static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < n; ++c) {
            // 1-based (k, n) entry: beta_n * cos(pi (2k-1)(n-1) / (2N))
            const double angle = M_PI * (2.0 * (k + 1) - 1.0) * c / (2.0 * n);
            m(k, c) = (c == 0 ? beta0 : beta) * std::cos(angle);
        }
    }
    return m;
}

Eigen::MatrixXd dct_matrix_real(int n) { return idct_matrix_real(n).transpose(); }

TransformMatrix idct_matrix(int n) {
    TransformMatrix t;
    t.order = n;
    t.kind = TransformKind::idct;
    t.entries = idct_matrix_real(n).cast<std::complex<double>>();
    return t;
}

TransformMatrix dct_matrix(int n) {
    TransformMatrix t;
    t.order = n;
    t.kind = TransformKind::dct;
    t.entries = dct_matrix_real(n).cast<std::complex<double>>();
    return t;
}

TransformMatrix dft_matrix(int n) {
    check_order(n);
    TransformMatrix t;
    t.order = n;
    t.kind = TransformKind::dft;
    t.entries.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < n; ++c) {
            const double angle = -2.0 * M_PI * k * c / n;
            t.entries(k, c) = scale * std::complex<double>(std::cos(angle), std::sin(angle));
        }
    }
    return t;
}

TransformMatrix idft_matrix(int n) {
    TransformMatrix t = dft_matrix(n);
    t.kind = TransformKind::idft;
    t.entries = t.entries.adjoint().eval();
    return t;
}

}  // namespace cdesim
