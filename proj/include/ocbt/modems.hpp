#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ocbt/codes.hpp"
#include "ocbt/core.hpp"
#include "ocbt/windows.hpp"

namespace ocbt {

enum class System { Ocbt, CpOfdm, WOfdm, Fbmc };

/// Accepts "OCBT", "CP-OFDM" (alias "OFDM"), "W-OFDM", "FBMC"; case-sensitive.
System parse_system(std::string_view name);
std::string_view system_name(System s);

using Bits = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// QAM
// ---------------------------------------------------------------------------

/// Gray-mapped square QAM with unit average power. The first half of each
/// symbol's bits selects the in-phase level, the second half the quadrature
/// level; a leading 0 bit maps to the positive half-plane.
Samples qam_map(std::span<const std::uint8_t> bits, unsigned mod_order);

/// Hard nearest-point decisions, inverse of qam_map.
Bits qam_demap(std::span<const cd> symbols, unsigned mod_order);

/// Maps exactly mod_order*M*N bits onto one block; FramingError otherwise.
SymbolGrid map_grid(std::span<const std::uint8_t> bits, const SystemParams& params);
Bits demap_grid(const SymbolGrid& grid, unsigned mod_order);

// ---------------------------------------------------------------------------
// Modulation schemes
// ---------------------------------------------------------------------------

struct ModulationScheme {
    System kind = System::Ocbt;
    SystemParams params;
    std::optional<WalshCodeSet> codes;     ///< OCBT only
    std::vector<std::size_t> code_rows;    ///< OCBT: Walsh row used by symbol n
    WindowProfile window;                  ///< OCBT only (tiled)
    WofdmWindow edges;                     ///< W-OFDM only
};

/// Validates `params` and builds the components for `kind`. FBMC has no
/// waveform here and is rejected with UnknownSystem.
ModulationScheme make_scheme(System kind, const SystemParams& params);

/// OCBT scheme with an explicit per-symbol window (e.g. rectangular_window).
ModulationScheme make_ocbt_scheme(const SystemParams& params, WindowProfile window,
                                  std::vector<std::size_t> code_rows = {});

/// Block of K*M samples: (1/sqrt N) F sum_n C_n R W^H a_n.
Samples ocbt_modulate(const SymbolGrid& grid, const ModulationScheme& scheme);

/// Recovers data vector l (0-based symbol index) from an equalized block.
Samples ocbt_demodulate(std::span<const cd> eq_block, const ModulationScheme& scheme, std::size_t l);

SymbolGrid ocbt_demodulate_all(std::span<const cd> eq_block, const ModulationScheme& scheme);

/// N symbols of M + cp_len samples each.
Samples cpofdm_modulate(const SymbolGrid& grid, const ModulationScheme& scheme);

/// One received symbol of M + cp_len samples: drop the prefix, DFT, per-bin equalize.
Samples cpofdm_demodulate(std::span<const cd> rx_symbol, const ModulationScheme& scheme,
                          std::span<const cd> per_bin_eq);

/// N windowed, cyclically extended symbols overlap-added across w_len samples.
/// Output length N*(M + cpw_len + cs_len - w_len) + w_len.
Samples wofdm_modulate(const SymbolGrid& grid, const ModulationScheme& scheme);

/// Takes each symbol's M-sample core at offset cpw_len, DFTs and equalizes it.
SymbolGrid wofdm_demodulate(std::span<const cd> rx, const ModulationScheme& scheme,
                            std::span<const cd> per_bin_eq);

/// Samples occupied by one frame (N symbols), including any trailing overlap.
std::size_t frame_length(const ModulationScheme& scheme);

/// Distance between the starts of consecutive frames in a stream.
std::size_t frame_hop(const ModulationScheme& scheme);

/// Dispatches to the modulator for scheme.kind.
Samples modulate(const SymbolGrid& grid, const ModulationScheme& scheme);

} // namespace ocbt
