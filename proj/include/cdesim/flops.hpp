#ifndef CDESIM_FLOPS_HPP_
#define CDESIM_FLOPS_HPP_

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdesim/errors.hpp"

namespace cdesim {

enum class EqualizerKind { lzf_cde, lmmse_cde, lzf_fde, lmmse_fde, jlcrlzf_cde };

const char* equalizer_name(EqualizerKind kind);
std::optional<EqualizerKind> equalizer_from_name(const std::string& name);

// All cost arithmetic is exact: one real multiply/add/divide is one operation,
// and one flop is half an operation, so every count is a rational with
// denominator 1 or 2.
using Flops = boost::rational<std::int64_t>;

enum class FullMatrixOp { add, mult, inv, matvec };

// Two cost models ship for banded inversion (the source tables disagree);
// inv_text is the variant embedded in the equalizer closed forms.
enum class BandedMatrixOp { add, mult, inv_table4, inv_text, matvec };

// Cost of a dense M x M complex-matrix operation, in flops.
Flops flops_full(FullMatrixOp op, std::int64_t m);

// Cost of an order-N banded operation at bandwidth tau, in flops.
Flops flops_banded(BandedMatrixOp op, std::int64_t n, std::int64_t tau);

struct FlopModel {
    EqualizerKind kind;
    int sigma = 1;  // 2^sigma x 2^sigma antenna configuration
    int n = 0;
    int tau = 0;
    Flops flops;
};

// Modeled flop count for building one equalizer solution and applying it to
// one received vector. Dense kinds evaluate their cubic in M = 2^sigma N; the
// banded kind evaluates the per-sigma closed forms (sigma <= 6) or extends
// them by the quadrant recursion (sigma > 6).
FlopModel flops_equalizer(EqualizerKind kind, int sigma, int n, int tau);

// Relative time reduction (t2 - t1) / t1 * 100 of a compared equalizer with
// run time t2 against a baseline with run time t1.
double time_reduction(double t1_seconds, double t2_seconds);

struct TimingComparison {
    double t1_seconds = 0.0;
    double t2_seconds = 0.0;
    double eta_percent = 0.0;
};

// Quadratic cost polynomial in the bandwidth: N * (a2 tau^2 + a1 tau + a0).
struct TauPoly {
    Flops a2, a1, a0;

    Flops eval(std::int64_t n, std::int64_t tau) const;
    TauPoly operator+(const TauPoly& o) const;
    TauPoly operator*(std::int64_t s) const;
    bool operator==(const TauPoly& o) const = default;
    std::string str() const;
};

struct RecursionAuditRow {
    int sigma = 0;
    TauPoly recursion;                  // cost predicted by the recursion rule
    std::optional<TauPoly> tabulated;   // closed form from the cost table, sigma <= 6
    Flops recursion_flops;
    std::optional<Flops> tabulated_flops;
    bool matches = false;
};

struct RecursionAuditReport {
    int n = 0;
    int tau = 0;
    std::vector<RecursionAuditRow> rows;
    std::vector<std::string> notes;

    std::string str() const;
};

// Evaluates the recursive construction rule for the banded equalizer cost
// (quadrant inverse cost = previous-stage total; each off-quadrant cost
// quadruples per stage) against the tabulated closed forms, flagging every
// stage where the two disagree.
RecursionAuditReport recursion_audit(int sigma_max, int n, int tau);

std::string flops_str(const Flops& f);

}  // namespace cdesim

#endif  // CDESIM_FLOPS_HPP_
