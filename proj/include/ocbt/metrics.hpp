#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocbt/channel.hpp"
#include "ocbt/equalizer.hpp"
#include "ocbt/modems.hpp"

namespace ocbt {

/// Fraction of positions where tx and rx differ.
double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

std::size_t count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

// ---------------------------------------------------------------------------
// Power spectral density
// ---------------------------------------------------------------------------

struct PsdEstimate {
    std::vector<double> freqs;         ///< cycles/sample, ascending in [-0.5, 0.5)
    std::vector<double> power_linear;  ///< power per unit normalized frequency
    std::vector<double> power_db;      ///< peak-normalized to 0 dB
};

/// Welch estimate with periodic Hann segments. sum(power_linear)/segment
/// approximates the mean signal power.
PsdEstimate psd_welch(std::span<const cd> signal, std::size_t segment, std::size_t overlap);

// ---------------------------------------------------------------------------
// Time efficiency and complexity
// ---------------------------------------------------------------------------

struct EfficiencyReport {
    System system = System::Ocbt;
    std::size_t N = 0;
    std::size_t L_I = 0;
    std::size_t L_T = 0;
    double r_T = 1.0;
};

/// L_I = M N and the tail L_T of each system for N transmitted symbols.
/// M, K and the prefix lengths come from `dims`; dims.N is ignored (for OCBT
/// K is picked to match N, so N is not limited by K here).
EfficiencyReport time_efficiency(System system, std::size_t N, const SystemParams& dims);

struct ComplexityReport {
    System system = System::Ocbt;
    std::uint64_t cm_per_symbol = 0;
};

/// Complex multiplications to generate one symbol.
ComplexityReport complexity_cm(System system, const SystemParams& dims);

// ---------------------------------------------------------------------------
// Interference analysis
// ---------------------------------------------------------------------------

struct InterferenceBreakdown {
    cd desired_gain;
    double desired_power = 0.0;
    double ici_power = 0.0;
    double ibi_power = 0.0;
    double noise_power = 0.0;
    double sinr_db = 0.0;
};

struct GridPosition {
    std::size_t m = 0;
    std::size_t l = 0;
};

/// Desired-signal gain of every (m, l) position: the chain output at (m, l)
/// when only a_{m,l} = 1 is transmitted, without noise or a previous block.
SymbolGrid desired_gains(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq);

/**
 * Splits the received data into desired, ICI, IBI and noise terms by
 * re-synthesizing the linear chain with one input active at a time:
 * ICI is the current block's output minus the desired term, IBI the output
 * of a random previous block alone, noise the output of the noise alone.
 * Powers (P_s = 1) are averaged over `draws` random blocks and, without a
 * position, over every subcarrier and symbol.
 */
InterferenceBreakdown interference_decomposition(const ModulationScheme& scheme, const ChannelRealization& ch,
                                                 const EqualizerSpec& eq, double noise_variance, RngStream& rng,
                                                 std::size_t draws,
                                                 std::optional<GridPosition> position = std::nullopt);

/// Same, reusing gains from desired_gains() for the same scheme, channel and equalizer.
InterferenceBreakdown interference_decomposition(const ModulationScheme& scheme, const ChannelRealization& ch,
                                                 const EqualizerSpec& eq, double noise_variance, RngStream& rng,
                                                 std::size_t draws, const SymbolGrid& gains);

/// SINR measured from received-symbol errors a_hat - g a over `draws` blocks
/// carrying data, a previous block and noise together.
double error_statistics_sinr_db(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                                double noise_variance, RngStream& rng, std::size_t draws);
double error_statistics_sinr_db(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                                double noise_variance, RngStream& rng, std::size_t draws, const SymbolGrid& gains);

struct IbiBound {
    double measured = 0.0;    ///< ||(sqrt N / K) R^T C_l leak||^2
    double bound = 0.0;       ///< (N / K^2) ||leak||^2
    double cs_bound = 0.0;    ///< (N / K) ||leak||^2, the Cauchy-Schwarz bound
};

/// Power of an equalized previous-block leak after de-spreading with symbol l's code.
IbiBound ibi_bound_check(const ModulationScheme& scheme, std::span<const cd> leak, std::size_t l);

} // namespace ocbt
