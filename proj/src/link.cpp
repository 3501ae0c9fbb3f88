#include "ocbt/link.hpp"

namespace ocbt {

SymbolGrid receive_frame(const ModulationScheme& scheme, std::span<const cd> rx, const ChannelRealization& ch,
                         const EqualizerSpec& eq)
{
    const SystemParams& p = scheme.params;
    switch (scheme.kind) {
    case System::Ocbt: {
        if (rx.size() < p.K * p.M) throw DimensionError("receive_frame: OCBT block too short");
        const Samples eq_block = equalize_block(rx.first(p.K * p.M), ch, eq);
        return ocbt_demodulate_all(eq_block, scheme);
    }
    case System::CpOfdm: {
        const std::size_t sym = p.M + p.cp_len;
        if (rx.size() < p.N * sym) throw DimensionError("receive_frame: CP-OFDM frame too short");
        const Samples w = per_bin_equalizer(ch, p.M, eq);
        SymbolGrid grid(p.M, p.N);
        for (std::size_t n = 0; n < p.N; ++n) {
            const Samples a = cpofdm_demodulate(rx.subspan(n * sym, sym), scheme, w);
            std::copy(a.begin(), a.end(), grid.column(n).begin());
        }
        return grid;
    }
    case System::WOfdm:
        return wofdm_demodulate(rx, scheme, per_bin_equalizer(ch, p.M, eq));
    case System::Fbmc:
        break;
    }
    throw UnknownSystem("no waveform model for FBMC");
}

Bits random_bits(std::size_t count, RngStream& rng)
{
    Bits bits(count);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return bits;
}

SymbolGrid random_grid(const SystemParams& params, RngStream& rng, const std::vector<bool>& active)
{
    if (!active.empty() && active.size() != params.M) throw DimensionError("active mask must have M entries");
    const Bits bits = random_bits(static_cast<std::size_t>(params.mod_order) * params.M * params.N, rng);
    SymbolGrid grid = map_grid(bits, params);
    if (!active.empty())
        for (std::size_t n = 0; n < params.N; ++n)
            for (std::size_t m = 0; m < params.M; ++m)
                if (!active[m]) grid(m, n) = cd{};
    return grid;
}

} // namespace ocbt
