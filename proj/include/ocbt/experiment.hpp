#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ocbt/channel.hpp"
#include "ocbt/equalizer.hpp"
#include "ocbt/metrics.hpp"
#include "ocbt/modems.hpp"

namespace ocbt {

enum class ExperimentKind { Ber, Psd, TimeEff, Complexity, Window, Analyze };

ExperimentKind parse_experiment(std::string_view name);
std::string_view experiment_name(ExperimentKind kind);

struct ChannelSpec {
    enum class Kind { Awgn, Veha, Fir };
    Kind kind = Kind::Awgn;
    std::vector<cd> taps;                      ///< Fir only
    FadingProfile profile = vehicular_a();     ///< Veha only
};

struct BerSettings {
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 10'000'000;
    std::size_t batch_trials = 32;  ///< stopping rule is checked between batches
};

struct PsdSettings {
    std::size_t active = 0;           ///< active subcarriers; 0 means M/2
    std::size_t oversample = 4;
    std::size_t frames = 1000;
    std::size_t segment_symbols = 8;  ///< Welch segment in units of M (before oversampling)
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Ber;
    SystemParams params;
    std::vector<std::string> systems;
    std::vector<double> snr_grid_db;
    ChannelSpec channel;
    EqualizerSpec equalizer;
    std::filesystem::path output_dir = ".";
    BerSettings ber;
    PsdSettings psd;
    std::size_t n_max = 64;      ///< timeeff: N = 1..n_max
    std::size_t draws = 100;     ///< analyze: Monte Carlo blocks per SNR point
    unsigned workers = 0;        ///< 0 = hardware concurrency
};

/// Defaults for each experiment: M=1024, K=4, CP=M/4, L=324, beta=0.1, QPSK,
/// except psd which uses M=64, L=20 with M/2 active subcarriers.
ExperimentConfig default_config(ExperimentKind kind);

/// Overlays a JSON object on default_config(kind). Unknown or malformed
/// fields raise ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& j, ExperimentKind kind);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind kind);

// ---------------------------------------------------------------------------
// BER
// ---------------------------------------------------------------------------

struct BerPoint {
    std::string system;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
};

/// Errors and bits of one independent trial (one frame plus its own previous frame).
struct TrialCount {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
};

TrialCount run_ber_trial(const ModulationScheme& scheme, const ExperimentConfig& cfg, double snr_db,
                         RngStream& rng);

/**
 * Sweeps cfg.snr_grid_db for every system. Trial t of SNR point k draws from
 * derive_stream(seed, "ber/<system>/<k>/<t>"); trials run in fixed batches
 * and stop once min_errors or max_bits is reached, so the table does not
 * depend on the worker count.
 */
std::vector<BerPoint> run_ber_experiment(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// PSD
// ---------------------------------------------------------------------------

struct SystemPsd {
    std::string system;
    PsdEstimate psd; ///< freqs in cycles per base-rate sample
};

/// Active-subcarrier mask: +-1 .. +-active/2 around DC, DC unused.
std::vector<bool> active_mask(std::size_t M, std::size_t active);

/// Stream of `frames` random frames synthesized on the oversampled grid
/// (M, L, CP lengths scaled by psd.oversample) and its Welch PSD.
std::vector<SystemPsd> run_psd_experiment(const ExperimentConfig& cfg);

struct StopbandGap {
    double mean_db_gap = 0.0;     ///< mean over stopband bins of (reference dB - test dB)
    double linear_gap_db = 0.0;   ///< ratio of mean stopband powers, in dB
    std::size_t bins = 0;
};

/// Stopband = frequencies more than M/8 subcarrier spacings past the outermost
/// active subcarrier. Both estimates must share a frequency grid.
StopbandGap stopband_gap(const PsdEstimate& test, const PsdEstimate& reference, std::size_t M, std::size_t active);

// ---------------------------------------------------------------------------
// Analytical tables
// ---------------------------------------------------------------------------

struct TimeEffRow {
    std::string system;
    EfficiencyReport report;
};
std::vector<TimeEffRow> run_timeeff_experiment(const ExperimentConfig& cfg);

struct ComplexityRow {
    std::string system;
    std::uint64_t cm = 0;
};
std::vector<ComplexityRow> run_complexity_experiment(const ExperimentConfig& cfg);

struct SinrRow {
    double snr_db = 0.0;
    InterferenceBreakdown breakdown;
    double measured_sinr_db = 0.0;
};
std::vector<SinrRow> run_analyze_experiment(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

void write_ber_csv(const std::filesystem::path& path, const std::vector<BerPoint>& rows);
void write_psd_csv(const std::filesystem::path& path, const std::vector<SystemPsd>& rows);
void write_timeeff_csv(const std::filesystem::path& path, const std::vector<TimeEffRow>& rows);
void write_complexity_csv(const std::filesystem::path& path, const std::vector<ComplexityRow>& rows);
void write_window_csv(const std::filesystem::path& path, const WindowProfile& window);
void write_sinr_csv(const std::filesystem::path& path, const std::vector<SinrRow>& rows);

/// Runs cfg.experiment, writes its CSV into cfg.output_dir and returns one
/// summary line per system.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

} // namespace ocbt
