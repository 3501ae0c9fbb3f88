#pragma once

#include <cstddef>
#include <span>

#include "ocbt/channel.hpp"
#include "ocbt/core.hpp"

namespace ocbt {

enum class EqualizerKind { ZF, MMSE };

struct EqualizerSpec {
    EqualizerKind kind = EqualizerKind::MMSE;
    double noise_variance = 0.0; ///< P_N relative to unit signal power; MMSE only
};

/// H_b = sum_p h_p exp(-j 2 pi b p / nbins), the unnormalized DFT of the zero-padded taps.
Samples freq_response(const ChannelRealization& ch, std::size_t nbins);

/// Per-bin weights: 1/H (ZF) or conj(H)/(|H|^2 + P_N) (MMSE).
/// ZF throws SingularChannel when some |H_b| < 1e-12.
Samples equalizer_weights(std::span<const cd> response, const EqualizerSpec& spec);

/// Per-bin equalizer for M-point OFDM symbols.
Samples per_bin_equalizer(const ChannelRealization& ch, std::size_t M, const EqualizerSpec& spec);

/// One-tap equalization of a whole block with the unitary block-length DFT pair.
Samples equalize_block(std::span<const cd> block, const ChannelRealization& ch, const EqualizerSpec& spec);

} // namespace ocbt
