#pragma once

#include <span>
#include <vector>

#include "ocbt/channel.hpp"
#include "ocbt/equalizer.hpp"
#include "ocbt/modems.hpp"

namespace ocbt {

/// Demodulates the frame whose first sample is rx[0], using perfect CSI.
/// OCBT equalizes the whole K*M block once; the OFDM baselines equalize per symbol.
SymbolGrid receive_frame(const ModulationScheme& scheme, std::span<const cd> rx, const ChannelRealization& ch,
                         const EqualizerSpec& eq);

Bits random_bits(std::size_t count, RngStream& rng);

/// Random block of unit-power QAM symbols on the rows flagged in `active`
/// (all rows when empty); inactive rows are zero.
SymbolGrid random_grid(const SystemParams& params, RngStream& rng, const std::vector<bool>& active = {});

} // namespace ocbt
