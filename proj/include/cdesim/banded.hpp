#ifndef CDESIM_BANDED_HPP_
#define CDESIM_BANDED_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cdesim/errors.hpp"

namespace cdesim {

// Tally of elementary real operations, following the convention that one real
// multiply/add/divide is one operation and one flop is half an operation.
// Counters are per call context: pass the same instance through a pipeline to
// accumulate, or nullptr to skip counting.
class OpCounter {
public:
    void complex_mult(std::int64_t count = 1) {
        real_mult_ += 4 * count;
        real_add_ += 2 * count;
    }
    void complex_add(std::int64_t count = 1) { real_add_ += 2 * count; }
    void real_add(std::int64_t count = 1) { real_add_ += count; }
    void real_mult(std::int64_t count = 1) { real_mult_ += count; }
    void real_div(std::int64_t count = 1) { real_div_ += count; }

    std::int64_t real_mult_count() const { return real_mult_; }
    std::int64_t real_add_count() const { return real_add_; }
    std::int64_t real_div_count() const { return real_div_; }
    std::int64_t operations() const { return real_mult_ + real_add_ + real_div_; }
    double flops() const { return static_cast<double>(operations()) / 2.0; }

private:
    std::int64_t real_mult_ = 0;
    std::int64_t real_add_ = 0;
    std::int64_t real_div_ = 0;
};

// Square complex matrix with entries forced to exactly zero outside the band
// |row - col| <= bandwidth. Backed by a dense array; the band exterior is an
// enforced invariant, not just small values. bandwidth == order-1 represents
// an unrestricted matrix.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int order, int bandwidth);

    static BandedMatrix identity(int order);
    static BandedMatrix diagonal(const Eigen::VectorXcd& d);

    int order() const { return order_; }
    int bandwidth() const { return bandwidth_; }
    bool full() const { return bandwidth_ >= order_ - 1; }
    // Set when a requested bandwidth exceeded order-1 and was clamped.
    bool clamped() const { return clamped_; }
    void mark_clamped() { clamped_ = true; }

    const Eigen::MatrixXcd& dense() const { return data_; }

    std::complex<double> operator()(int r, int c) const { return data_(r, c); }
    void set(int r, int c, std::complex<double> v);

    // In-band column range [first, last] for a row.
    int band_begin(int row) const { return std::max(0, row - bandwidth_); }
    int band_end(int row) const { return std::min(order_ - 1, row + bandwidth_); }

    BandedMatrix adjoint() const;
    BandedMatrix negated() const;
    void add_to_diagonal(std::complex<double> v, OpCounter* counter = nullptr);

private:
    int order_ = 0;
    int bandwidth_ = 0;
    bool clamped_ = false;
    Eigen::MatrixXcd data_;
};

// Copies the entries of a dense matrix with |row - col| <= tau and zeroes the
// rest. tau > order-1 is clamped to full and flagged on the result.
BandedMatrix band_limit(const Eigen::MatrixXcd& a, int tau);

// Product truncated to tau_out: only entries inside the output band are
// computed. Equals band_limit(dense(a) * dense(b), tau_out).
BandedMatrix banded_multiply(const BandedMatrix& a, const BandedMatrix& b, int tau_out,
                             OpCounter* counter = nullptr);

// Entrywise a + sign*b; result bandwidth is max of the operand bandwidths.
BandedMatrix banded_add(const BandedMatrix& a, const BandedMatrix& b, int sign = 1,
                        OpCounter* counter = nullptr);

// Dense inversion followed by truncation to tau_out. Inversion cost is
// accounted by the analytic cost model in the flops module, not instrumented
// here, so this never touches an OpCounter. Throws singular_matrix_error when
// the 1-norm condition estimate exceeds 1e12.
BandedMatrix banded_invert(const BandedMatrix& a, int tau_out);

Eigen::VectorXcd banded_matvec(const BandedMatrix& a, const Eigen::VectorXcd& u,
                               OpCounter* counter = nullptr);

// Grid of equally sized banded blocks sharing one bandwidth.
class BandedBlockMatrix {
public:
    BandedBlockMatrix() = default;
    BandedBlockMatrix(int block_rows, int block_cols, int order, int bandwidth);

    int block_rows() const { return block_rows_; }
    int block_cols() const { return block_cols_; }
    int order() const { return order_; }
    int bandwidth() const { return bandwidth_; }

    const BandedMatrix& block(int r, int c) const { return blocks_[idx(r, c)]; }
    // Replaces a block; its order must match, and the grid bandwidth grows to
    // cover it.
    void set_block(int r, int c, BandedMatrix m);

    // Grid of the conjugate-transposed blocks, transposed.
    BandedBlockMatrix adjoint() const;
    Eigen::MatrixXcd stacked() const;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& u, OpCounter* counter = nullptr) const;

private:
    int idx(int r, int c) const { return r * block_cols_ + c; }

    int block_rows_ = 0;
    int block_cols_ = 0;
    int order_ = 0;
    int bandwidth_ = 0;
    std::vector<BandedMatrix> blocks_;
};

}  // namespace cdesim

#endif  // CDESIM_BANDED_HPP_
