#include "cdesim/banded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdesim {

namespace {

void check_same_order(const BandedMatrix& a, const BandedMatrix& b, const char* op) {
    if (a.order() != b.order()) {
        std::ostringstream os;
        os << op << ": order mismatch (" << a.order() << " vs " << b.order() << ")";
        throw invalid_dimension_error(os.str());
    }
}

int clamp_bandwidth(int order, int tau, bool& clamped) {
    clamped = tau > order - 1;
    return clamped ? order - 1 : tau;
}

}  // namespace

BandedMatrix::BandedMatrix(int order, int bandwidth)
    : order_(order), bandwidth_(bandwidth), data_(Eigen::MatrixXcd::Zero(order, order)) {
    if (order < 1) throw invalid_dimension_error("banded matrix order must be >= 1");
    if (bandwidth < 0 || bandwidth > order - 1) {
        throw invalid_dimension_error("bandwidth must lie in [0, order-1]");
    }
}

BandedMatrix BandedMatrix::identity(int order) {
    BandedMatrix m(order, 0);
    m.data_.setIdentity();
    return m;
}

BandedMatrix BandedMatrix::diagonal(const Eigen::VectorXcd& d) {
    BandedMatrix m(static_cast<int>(d.size()), 0);
    m.data_.diagonal() = d;
    return m;
}

void BandedMatrix::set(int r, int c, std::complex<double> v) {
    if (std::abs(r - c) > bandwidth_) {
        throw invalid_dimension_error("entry outside the band");
    }
    data_(r, c) = v;
}

BandedMatrix BandedMatrix::adjoint() const {
    BandedMatrix m(order_, bandwidth_);
    m.clamped_ = clamped_;
    m.data_ = data_.adjoint();
    return m;
}

BandedMatrix BandedMatrix::negated() const {
    BandedMatrix m = *this;
    m.data_ = -m.data_;
    return m;
}

void BandedMatrix::add_to_diagonal(std::complex<double> v, OpCounter* counter) {
    data_.diagonal().array() += v;
    if (counter) counter->complex_add(order_);
}

BandedMatrix band_limit(const Eigen::MatrixXcd& a, int tau) {
    if (a.rows() != a.cols()) throw invalid_dimension_error("band_limit needs a square matrix");
    if (tau < 0) throw invalid_dimension_error("bandwidth must be >= 0");
    const int n = static_cast<int>(a.rows());
    bool clamped = false;
    const int bw = clamp_bandwidth(n, tau, clamped);
    BandedMatrix m(n, bw);
    if (clamped) m.mark_clamped();
    for (int r = 0; r < n; ++r) {
        const int lo = m.band_begin(r);
        const int hi = m.band_end(r);
        for (int c = lo; c <= hi; ++c) m.set(r, c, a(r, c));
    }
    return m;
}

BandedMatrix banded_multiply(const BandedMatrix& a, const BandedMatrix& b, int tau_out,
                             OpCounter* counter) {
    check_same_order(a, b, "banded_multiply");
    if (tau_out < 0) throw invalid_dimension_error("output bandwidth must be >= 0");
    const int n = a.order();
    bool clamped = false;
    const int bw = clamp_bandwidth(n, tau_out, clamped);
    BandedMatrix out(n, bw);
    if (clamped) out.mark_clamped();

    const Eigen::MatrixXcd& da = a.dense();
    const Eigen::MatrixXcd& db = b.dense();
    std::int64_t terms = 0;
    for (int m = 0; m < n; ++m) {
        const int clo = out.band_begin(m);
        const int chi = out.band_end(m);
        for (int c = clo; c <= chi; ++c) {
            const int klo = std::max({0, m - a.bandwidth(), c - b.bandwidth()});
            const int khi = std::min({n - 1, m + a.bandwidth(), c + b.bandwidth()});
            if (klo > khi) continue;
            std::complex<double> acc = 0.0;
            for (int k = klo; k <= khi; ++k) acc += da(m, k) * db(k, c);
            out.set(m, c, acc);
            terms += khi - klo + 1;
        }
    }
    if (counter) {
        counter->complex_mult(terms);
        counter->complex_add(terms);
    }
    return out;
}

BandedMatrix banded_add(const BandedMatrix& a, const BandedMatrix& b, int sign,
                        OpCounter* counter) {
    check_same_order(a, b, "banded_add");
    const int n = a.order();
    BandedMatrix out(n, std::max(a.bandwidth(), b.bandwidth()));
    const double s = sign >= 0 ? 1.0 : -1.0;
    std::int64_t entries = 0;
    for (int r = 0; r < n; ++r) {
        const int lo = out.band_begin(r);
        const int hi = out.band_end(r);
        for (int c = lo; c <= hi; ++c) {
            out.set(r, c, a(r, c) + s * b(r, c));
            ++entries;
        }
    }
    if (counter) counter->complex_add(entries);
    return out;
}

BandedMatrix banded_invert(const BandedMatrix& a, int tau_out) {
    const int n = a.order();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a.dense());
    Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(n, n));
    const double norm_a = a.dense().cwiseAbs().colwise().sum().maxCoeff();
    const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
    const double cond = norm_a * norm_inv;
    if (!std::isfinite(cond) || cond > 1e12) {
        std::ostringstream os;
        os << "matrix of order " << n << " is singular or ill-conditioned (cond est ";
        os << cond << ")";
        throw singular_matrix_error(os.str());
    }
    return band_limit(inv, tau_out);
}

Eigen::VectorXcd banded_matvec(const BandedMatrix& a, const Eigen::VectorXcd& u,
                               OpCounter* counter) {
    if (u.size() != a.order()) {
        throw invalid_dimension_error("banded_matvec: vector length does not match order");
    }
    const int n = a.order();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    const Eigen::MatrixXcd& d = a.dense();
    std::int64_t terms = 0;
    for (int r = 0; r < n; ++r) {
        const int lo = a.band_begin(r);
        const int hi = a.band_end(r);
        std::complex<double> acc = 0.0;
        for (int c = lo; c <= hi; ++c) acc += d(r, c) * u(c);
        out(r) = acc;
        terms += hi - lo + 1;
    }
    if (counter) {
        counter->complex_mult(terms);
        counter->complex_add(terms);
    }
    return out;
}

BandedBlockMatrix::BandedBlockMatrix(int block_rows, int block_cols, int order, int bandwidth)
    : block_rows_(block_rows), block_cols_(block_cols), order_(order), bandwidth_(bandwidth) {
    if (block_rows < 1 || block_cols < 1) {
        throw invalid_dimension_error("block grid must be at least 1x1");
    }
    blocks_.assign(static_cast<std::size_t>(block_rows) * block_cols,
                   BandedMatrix(order, bandwidth));
}

void BandedBlockMatrix::set_block(int r, int c, BandedMatrix m) {
    if (m.order() != order_) {
        throw invalid_dimension_error("block order does not match the grid");
    }
    bandwidth_ = std::max(bandwidth_, m.bandwidth());
    blocks_[idx(r, c)] = std::move(m);
}

BandedBlockMatrix BandedBlockMatrix::adjoint() const {
    BandedBlockMatrix out(block_cols_, block_rows_, order_, bandwidth_);
    for (int r = 0; r < block_rows_; ++r) {
        for (int c = 0; c < block_cols_; ++c) out.set_block(c, r, block(r, c).adjoint());
    }
    return out;
}

Eigen::MatrixXcd BandedBlockMatrix::stacked() const {
    Eigen::MatrixXcd out(block_rows_ * order_, block_cols_ * order_);
    for (int r = 0; r < block_rows_; ++r) {
        for (int c = 0; c < block_cols_; ++c) {
            out.block(r * order_, c * order_, order_, order_) = block(r, c).dense();
        }
    }
    return out;
}

Eigen::VectorXcd BandedBlockMatrix::apply(const Eigen::VectorXcd& u, OpCounter* counter) const {
    if (u.size() != static_cast<Eigen::Index>(block_cols_) * order_) {
        throw invalid_dimension_error("block apply: vector length does not match the grid");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(block_rows_) * order_);
    for (int r = 0; r < block_rows_; ++r) {
        for (int c = 0; c < block_cols_; ++c) {
            out.segment(r * order_, order_) +=
                banded_matvec(block(r, c), u.segment(c * order_, order_), counter);
        }
    }
    return out;
}

}  // namespace cdesim
