#ifndef CDESIM_SIMULATOR_HPP_
#define CDESIM_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdesim/equalizers.hpp"

namespace cdesim {

struct SimConfig {
    int n = 64;
    int ncp = 16;
    int sigma = 1;  // 2^sigma transmit and receive antennas
    std::vector<double> snr_db = {0, 5, 10, 15, 20, 25};
    double epsilon_max = 0.1;
    int tau = 15;
    double alpha = 1e-2;
    int iterations = 1000;
    std::uint64_t master_seed = 1;
    std::string profile = "veha6";
    EqualizerKind equalizer = EqualizerKind::jlcrlzf_cde;
    double cfo_error_percent = 0.0;
    double channel_error_delta = 0.0;
    int threads = 0;  // 0: hardware concurrency

    int antennas() const { return 1 << sigma; }
    void validate() const;
};

struct BerPoint {
    double snr_db = 0.0;
    double ber = 0.0;
    std::int64_t bit_errors = 0;
    std::int64_t total_bits = 0;
    std::int64_t failed_iterations = 0;
};

struct BerResult {
    SimConfig config;
    std::vector<BerPoint> points;
};

// One row of a parameter sweep. All rows of a sweep share every random draw
// (channel, CFO, data, noise, perturbations), so row differences reflect only
// the swept parameter.
struct SweepRow {
    std::string label;
    std::vector<BerPoint> points;
};

struct SweepResult {
    std::string parameter;
    SimConfig config;
    std::vector<SweepRow> rows;
};

// Regularization value for one sweep row: a fixed value, or the per-SNR
// sentinel 1/snr.
struct AlphaSpec {
    bool inv_snr = false;
    double value = 0.0;

    static AlphaSpec fixed(double v) { return {false, v}; }
    static AlphaSpec one_over_snr() { return {true, 0.0}; }
    std::string label() const;
};

// Bandwidth for one sweep row: a value in [0, N-1], the full-compensation
// sentinel (tau = N), or the no-CFO sentinel (epsilon forced to 0, full
// bandwidth).
struct TauSpec {
    enum class Kind { value, full, no_cfo } kind = Kind::value;
    int value = 0;

    static TauSpec of(int v) { return {Kind::value, v}; }
    static TauSpec full() { return {Kind::full, 0}; }
    static TauSpec no_cfo() { return {Kind::no_cfo, 0}; }
    std::string label() const;
};

BerResult run_ber(const SimConfig& config);
SweepResult sweep_alpha(const SimConfig& config, const std::vector<AlphaSpec>& grid);
SweepResult sweep_tau(const SimConfig& config, const std::vector<TauSpec>& grid);
SweepResult sweep_cfo(const SimConfig& config, const std::vector<double>& epsilon_max_grid);
SweepResult sweep_cfo_error(const SimConfig& config, const std::vector<double>& percent_grid);
SweepResult sweep_channel_error(const SimConfig& config, const std::vector<double>& delta_grid);

// Wall-clock measurement of solution construction plus one application, per
// equalizer kind, with the relative time reduction against the banded
// equalizer. Absolute values are machine dependent.
struct BenchRow {
    int sigma = 0;
    EqualizerKind kind = EqualizerKind::jlcrlzf_cde;
    double seconds = 0.0;
    double eta_percent = 0.0;  // vs the banded equalizer at the same sigma
};

std::vector<BenchRow> bench_time(const SimConfig& config, const std::vector<int>& sigmas);

// SNR (dB) at which a BER curve crosses the given level, by log-linear
// interpolation between grid points; empty when the curve never reaches it.
std::optional<double> snr_at_ber(const std::vector<BerPoint>& points, double ber_level);

}  // namespace cdesim

#endif  // CDESIM_SIMULATOR_HPP_
