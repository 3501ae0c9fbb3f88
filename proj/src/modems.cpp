#include "ocbt/modems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocbt/transforms.hpp"

namespace ocbt {

namespace {

// Square QAM: b bits per axis, 2^b levels at +-1, +-3, ...
struct AxisCode {
    unsigned bits;
    unsigned levels;
    double scale; // 1/sqrt(mean symbol energy)
};

AxisCode axis_code(unsigned mod_order)
{
    if (mod_order < 2 || mod_order % 2 != 0 || mod_order > 16)
        throw DimensionError("unsupported mod_order " + std::to_string(mod_order));
    const unsigned b = mod_order / 2;
    const unsigned levels = 1u << b;
    const double energy = 2.0 * (static_cast<double>(levels) * levels - 1.0) / 3.0;
    return {b, levels, 1.0 / std::sqrt(energy)};
}

double axis_level(std::span<const std::uint8_t> bits, const AxisCode& ac)
{
    unsigned gray = 0;
    for (unsigned i = 0; i < ac.bits; ++i) gray = (gray << 1) | (bits[i] & 1u);
    unsigned idx = gray;
    for (unsigned shift = 1; shift < ac.bits; shift <<= 1) idx ^= idx >> shift;
    return static_cast<double>(static_cast<int>(ac.levels) - 1 - 2 * static_cast<int>(idx));
}

void axis_bits(double value, const AxisCode& ac, std::uint8_t* out)
{
    const double top = static_cast<double>(ac.levels - 1);
    long idx = std::lround((top - value) / 2.0);
    idx = std::clamp(idx, 0L, static_cast<long>(ac.levels) - 1);
    const unsigned gray = static_cast<unsigned>(idx) ^ (static_cast<unsigned>(idx) >> 1);
    for (unsigned i = 0; i < ac.bits; ++i) out[i] = static_cast<std::uint8_t>((gray >> (ac.bits - 1 - i)) & 1u);
}

void check_grid(const SymbolGrid& grid, const SystemParams& p)
{
    if (grid.rows() != p.M || grid.cols() != p.N)
        throw DimensionError("symbol grid is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                             ", expected " + std::to_string(p.M) + "x" + std::to_string(p.N));
}

void check_eq(std::span<const cd> eq, std::size_t M)
{
    if (eq.size() != M) throw DimensionError("per-bin equalizer must have M entries");
}

std::size_t wofdm_extended(const SystemParams& p)
{
    return p.M + p.cpw_len + p.cs_len;
}

} // namespace

System parse_system(std::string_view name)
{
    if (name == "OCBT") return System::Ocbt;
    if (name == "CP-OFDM" || name == "OFDM") return System::CpOfdm;
    if (name == "W-OFDM") return System::WOfdm;
    if (name == "FBMC") return System::Fbmc;
    throw UnknownSystem("unknown system '" + std::string(name) + "'");
}

std::string_view system_name(System s)
{
    switch (s) {
    case System::Ocbt: return "OCBT";
    case System::CpOfdm: return "CP-OFDM";
    case System::WOfdm: return "W-OFDM";
    case System::Fbmc: return "FBMC";
    }
    return "?";
}

Samples qam_map(std::span<const std::uint8_t> bits, unsigned mod_order)
{
    const AxisCode ac = axis_code(mod_order);
    if (bits.size() % mod_order != 0)
        throw FramingError("bit count " + std::to_string(bits.size()) + " is not a multiple of mod_order");
    Samples out(bits.size() / mod_order);
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto sym = bits.subspan(s * mod_order, mod_order);
        out[s] = cd(axis_level(sym.first(ac.bits), ac), axis_level(sym.subspan(ac.bits), ac)) * ac.scale;
    }
    return out;
}

Bits qam_demap(std::span<const cd> symbols, unsigned mod_order)
{
    const AxisCode ac = axis_code(mod_order);
    Bits out(symbols.size() * mod_order);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const cd v = symbols[s] / ac.scale;
        axis_bits(v.real(), ac, out.data() + s * mod_order);
        axis_bits(v.imag(), ac, out.data() + s * mod_order + ac.bits);
    }
    return out;
}

SymbolGrid map_grid(std::span<const std::uint8_t> bits, const SystemParams& p)
{
    const std::size_t need = static_cast<std::size_t>(p.mod_order) * p.M * p.N;
    if (bits.size() != need)
        throw FramingError("block needs " + std::to_string(need) + " bits, got " + std::to_string(bits.size()));
    const Samples symbols = qam_map(bits, p.mod_order);
    SymbolGrid grid(p.M, p.N);
    std::copy(symbols.begin(), symbols.end(), grid.flat().begin());
    return grid;
}

Bits demap_grid(const SymbolGrid& grid, unsigned mod_order)
{
    return qam_demap(grid.flat(), mod_order);
}

ModulationScheme make_ocbt_scheme(const SystemParams& params, WindowProfile window, std::vector<std::size_t> code_rows)
{
    ModulationScheme s;
    s.kind = System::Ocbt;
    s.params = validate_params(params);
    s.codes.emplace(params.K);
    if (code_rows.empty()) {
        code_rows.resize(params.N);
        std::iota(code_rows.begin(), code_rows.end(), std::size_t{0});
    }
    if (code_rows.size() != params.N) throw DimensionError("code_rows must name one Walsh row per symbol");
    for (std::size_t i = 0; i < code_rows.size(); ++i) {
        if (code_rows[i] >= params.K) throw IndexError("code row out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (code_rows[j] == code_rows[i]) throw DimensionError("code_rows must be distinct");
    }
    s.code_rows = std::move(code_rows);
    if (window.per_symbol.size() != params.M) throw DimensionError("window length must equal M");
    s.window = tile_window(std::move(window), params.K);
    return s;
}

ModulationScheme make_scheme(System kind, const SystemParams& params)
{
    const SystemParams p = validate_params(params);
    switch (kind) {
    case System::Ocbt:
        return make_ocbt_scheme(p, build_ocbt_window(p.M, p.L, p.beta));
    case System::CpOfdm: {
        ModulationScheme s;
        s.kind = kind;
        s.params = p;
        return s;
    }
    case System::WOfdm: {
        ModulationScheme s;
        s.kind = kind;
        s.params = p;
        s.edges = build_wofdm_window(p.w_len);
        return s;
    }
    case System::Fbmc:
        break;
    }
    throw UnknownSystem("no waveform model for " + std::string(system_name(kind)));
}

Samples ocbt_modulate(const SymbolGrid& grid, const ModulationScheme& scheme)
{
    const SystemParams& p = scheme.params;
    check_grid(grid, p);
    const auto& f = scheme.window.per_symbol;
    Samples block(p.K * p.M);
    for (std::size_t n = 0; n < p.N; ++n) {
        Samples x = idft(grid.column(n), p.M);
        for (std::size_t q = 0; q < p.M; ++q) x[q] *= f[q];
        spread_accumulate(x, *scheme.codes, scheme.code_rows[n], block);
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(p.N));
    for (auto& v : block) v *= norm;
    return block;
}

Samples ocbt_demodulate(std::span<const cd> eq_block, const ModulationScheme& scheme, std::size_t l)
{
    const SystemParams& p = scheme.params;
    if (l >= p.N) throw IndexError("symbol index " + std::to_string(l) + " out of range for N=" + std::to_string(p.N));
    if (eq_block.size() != p.K * p.M) throw DimensionError("equalized block must have K*M samples");
    return dft(despread(eq_block, *scheme.codes, scheme.code_rows[l], p.N), p.M);
}

SymbolGrid ocbt_demodulate_all(std::span<const cd> eq_block, const ModulationScheme& scheme)
{
    const SystemParams& p = scheme.params;
    SymbolGrid grid(p.M, p.N);
    for (std::size_t l = 0; l < p.N; ++l) {
        const Samples a = ocbt_demodulate(eq_block, scheme, l);
        std::copy(a.begin(), a.end(), grid.column(l).begin());
    }
    return grid;
}

Samples cpofdm_modulate(const SymbolGrid& grid, const ModulationScheme& scheme)
{
    const SystemParams& p = scheme.params;
    check_grid(grid, p);
    Samples out;
    out.reserve(p.N * (p.M + p.cp_len));
    for (std::size_t n = 0; n < p.N; ++n) {
        const Samples x = idft(grid.column(n), p.M);
        out.insert(out.end(), x.end() - static_cast<std::ptrdiff_t>(p.cp_len), x.end());
        out.insert(out.end(), x.begin(), x.end());
    }
    return out;
}

Samples cpofdm_demodulate(std::span<const cd> rx_symbol, const ModulationScheme& scheme, std::span<const cd> per_bin_eq)
{
    const SystemParams& p = scheme.params;
    if (rx_symbol.size() != p.M + p.cp_len) throw DimensionError("CP-OFDM symbol must have M + cp_len samples");
    check_eq(per_bin_eq, p.M);
    Samples a = dft(rx_symbol.subspan(p.cp_len), p.M);
    for (std::size_t m = 0; m < p.M; ++m) a[m] *= per_bin_eq[m];
    return a;
}

Samples wofdm_modulate(const SymbolGrid& grid, const ModulationScheme& scheme)
{
    const SystemParams& p = scheme.params;
    check_grid(grid, p);
    const std::size_t ext = wofdm_extended(p);
    const std::size_t hop = ext - p.w_len;
    Samples out(p.N * hop + p.w_len);
    for (std::size_t n = 0; n < p.N; ++n) {
        const Samples x = idft(grid.column(n), p.M);
        cd* dst = out.data() + n * hop;
        for (std::size_t q = 0; q < ext; ++q) {
            cd v = x[(q + p.M - p.cpw_len % p.M) % p.M];
            if (q < p.w_len) v *= scheme.edges.rise[q];
            if (q >= ext - p.w_len) v *= scheme.edges.fall[q - (ext - p.w_len)];
            dst[q] += v;
        }
    }
    return out;
}

SymbolGrid wofdm_demodulate(std::span<const cd> rx, const ModulationScheme& scheme, std::span<const cd> per_bin_eq)
{
    const SystemParams& p = scheme.params;
    check_eq(per_bin_eq, p.M);
    const std::size_t hop = wofdm_extended(p) - p.w_len;
    if (rx.size() < (p.N - 1) * hop + p.cpw_len + p.M) throw DimensionError("W-OFDM frame too short");
    SymbolGrid grid(p.M, p.N);
    for (std::size_t n = 0; n < p.N; ++n) {
        Samples a = dft(rx.subspan(n * hop + p.cpw_len, p.M), p.M);
        for (std::size_t m = 0; m < p.M; ++m) grid(m, n) = a[m] * per_bin_eq[m];
    }
    return grid;
}

std::size_t frame_length(const ModulationScheme& scheme)
{
    const SystemParams& p = scheme.params;
    switch (scheme.kind) {
    case System::Ocbt: return p.K * p.M;
    case System::CpOfdm: return p.N * (p.M + p.cp_len);
    case System::WOfdm: return p.N * (wofdm_extended(p) - p.w_len) + p.w_len;
    case System::Fbmc: break;
    }
    throw UnknownSystem("no waveform model for FBMC");
}

std::size_t frame_hop(const ModulationScheme& scheme)
{
    if (scheme.kind == System::WOfdm) return frame_length(scheme) - scheme.params.w_len;
    return frame_length(scheme);
}

Samples modulate(const SymbolGrid& grid, const ModulationScheme& scheme)
{
    switch (scheme.kind) {
    case System::Ocbt: return ocbt_modulate(grid, scheme);
    case System::CpOfdm: return cpofdm_modulate(grid, scheme);
    case System::WOfdm: return wofdm_modulate(grid, scheme);
    case System::Fbmc: break;
    }
    throw UnknownSystem("no waveform model for FBMC");
}

} // namespace ocbt
