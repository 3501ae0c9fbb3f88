#include "ocbt/equalizer.hpp"

#include <cmath>

#include "ocbt/transforms.hpp"

namespace ocbt {

Samples freq_response(const ChannelRealization& ch, std::size_t nbins)
{
    if (ch.taps.empty() || ch.taps.size() > nbins)
        throw DimensionError("freq_response: need 1 <= G <= nbins (G=" + std::to_string(ch.taps.size()) + ")");
    Samples H(nbins);
    std::copy(ch.taps.begin(), ch.taps.end(), H.begin());
    fft_plan(nbins)->forward(H);
    const double gain = std::sqrt(static_cast<double>(nbins));
    for (auto& v : H) v *= gain;
    return H;
}

Samples equalizer_weights(std::span<const cd> response, const EqualizerSpec& spec)
{
    if (spec.noise_variance < 0.0) throw DimensionError("noise_variance must be >= 0");
    Samples w(response.size());
    for (std::size_t b = 0; b < response.size(); ++b) {
        const cd H = response[b];
        if (spec.kind == EqualizerKind::ZF) {
            if (std::abs(H) < 1e-12) throw SingularChannel("zero-forcing: channel null at bin " + std::to_string(b));
            w[b] = 1.0 / H;
        } else {
            const double den = std::norm(H) + spec.noise_variance;
            if (den < 1e-24) throw SingularChannel("MMSE: channel null at bin " + std::to_string(b) + " with no noise");
            w[b] = std::conj(H) / den;
        }
    }
    return w;
}

Samples per_bin_equalizer(const ChannelRealization& ch, std::size_t M, const EqualizerSpec& spec)
{
    return equalizer_weights(freq_response(ch, M), spec);
}

Samples equalize_block(std::span<const cd> block, const ChannelRealization& ch, const EqualizerSpec& spec)
{
    const std::size_t n = block.size();
    const Samples w = equalizer_weights(freq_response(ch, n), spec);
    const auto plan = fft_plan(n);
    Samples y(block.begin(), block.end());
    plan->forward(y);
    for (std::size_t b = 0; b < n; ++b) y[b] *= w[b];
    plan->inverse(y);
    return y;
}

} // namespace ocbt
