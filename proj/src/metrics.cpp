#include "ocbt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ocbt/codes.hpp"
#include "ocbt/link.hpp"
#include "ocbt/transforms.hpp"

namespace ocbt {

std::size_t count_bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    if (tx.size() != rx.size()) throw DimensionError("bit streams differ in length");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] & 1u) != (rx[i] & 1u);
    return errors;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    const std::size_t errors = count_bit_errors(tx, rx);
    if (tx.empty()) throw DimensionError("bit streams are empty");
    return static_cast<double>(errors) / static_cast<double>(tx.size());
}

PsdEstimate psd_welch(std::span<const cd> signal, std::size_t segment, std::size_t overlap)
{
    if (segment == 0 || segment > signal.size()) throw DimensionError("psd_welch: need 0 < segment <= signal length");
    if (overlap >= segment) throw DimensionError("psd_welch: overlap must be smaller than the segment");
    const auto plan = fft_plan(segment);

    std::vector<double> window(segment);
    double window_energy = 0.0;
    for (std::size_t q = 0; q < segment; ++q) {
        window[q] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(segment));
        window_energy += window[q] * window[q];
    }

    std::vector<double> acc(segment, 0.0);
    std::size_t count = 0;
    Samples buf(segment);
    for (std::size_t start = 0; start + segment <= signal.size(); start += segment - overlap) {
        for (std::size_t q = 0; q < segment; ++q) buf[q] = signal[start + q] * window[q];
        plan->forward(buf);
        for (std::size_t b = 0; b < segment; ++b) acc[b] += std::norm(buf[b]);
        ++count;
    }

    // The unitary FFT already divides |X|^2 by `segment`; scale back so that
    // the mean over bins equals the windowed-segment power.
    const double scale = static_cast<double>(segment) / (static_cast<double>(count) * window_energy);
    PsdEstimate est;
    est.freqs.resize(segment);
    est.power_linear.resize(segment);
    const std::size_t half = segment / 2;
    for (std::size_t i = 0; i < segment; ++i) {
        const std::size_t b = (i + half) % segment; // fftshift
        est.freqs[i] = (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(segment);
        est.power_linear[i] = acc[b] * scale;
    }
    const double peak = *std::max_element(est.power_linear.begin(), est.power_linear.end());
    est.power_db.resize(segment);
    for (std::size_t i = 0; i < segment; ++i)
        est.power_db[i] = 10.0 * std::log10(std::max(est.power_linear[i], 1e-300) / peak);
    return est;
}

EfficiencyReport time_efficiency(System system, std::size_t N, const SystemParams& d)
{
    if (N == 0) throw DimensionError("time_efficiency: N must be >= 1");
    EfficiencyReport r;
    r.system = system;
    r.N = N;
    r.L_I = d.M * N;
    switch (system) {
    case System::Ocbt: r.L_T = 0; break;
    case System::CpOfdm: r.L_T = d.cp_len * N; break;
    case System::Fbmc: r.L_T = d.M / 2 + (d.K - 1) * d.M; break;
    case System::WOfdm:
        if (d.cpw_len + d.cs_len < d.w_len) throw DimensionError("W-OFDM tail would be negative");
        r.L_T = (d.cpw_len + d.cs_len - d.w_len) * N + d.w_len;
        break;
    }
    r.r_T = static_cast<double>(r.L_I) / static_cast<double>(r.L_I + r.L_T);
    return r;
}

ComplexityReport complexity_cm(System system, const SystemParams& d)
{
    const std::uint64_t fft = d.M / 2 * log2_exact(d.M);
    ComplexityReport r;
    r.system = system;
    switch (system) {
    case System::CpOfdm: r.cm_per_symbol = fft; break;
    case System::Fbmc: r.cm_per_symbol = fft + (d.K + 1) * d.M; break;
    case System::WOfdm: r.cm_per_symbol = fft + d.M + d.cpw_len + d.cs_len; break;
    case System::Ocbt: r.cm_per_symbol = fft + d.M; break;
    }
    return r;
}

namespace {

struct ChainInput {
    const SymbolGrid* current = nullptr;
    const SymbolGrid* previous = nullptr;
    const Samples* noise = nullptr;
};

SymbolGrid run_chain(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                     const ChainInput& in)
{
    const std::size_t len = frame_length(scheme);
    Samples cur = in.current ? modulate(*in.current, scheme) : Samples(len);
    Samples prev = in.previous ? modulate(*in.previous, scheme) : Samples(len);
    Samples y = stream_receive(cur, ch, prev, ch, frame_hop(scheme));
    if (in.noise)
        for (std::size_t p = 0; p < y.size(); ++p) y[p] += (*in.noise)[p];
    return receive_frame(scheme, y, ch, eq);
}

Samples noise_vector(std::size_t len, double variance, RngStream& rng)
{
    Samples n(len);
    add_awgn(std::span<cd>(n), variance, rng);
    return n;
}

double to_db(double ratio)
{
    return 10.0 * std::log10(ratio);
}

} // namespace

SymbolGrid desired_gains(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq)
{
    const SystemParams& p = scheme.params;
    SymbolGrid gains(p.M, p.N);
    SymbolGrid impulse(p.M, p.N);
    for (std::size_t l = 0; l < p.N; ++l) {
        for (std::size_t m = 0; m < p.M; ++m) {
            impulse(m, l) = 1.0;
            gains(m, l) = run_chain(scheme, ch, eq, {&impulse, nullptr, nullptr})(m, l);
            impulse(m, l) = 0.0;
        }
    }
    return gains;
}

namespace {

InterferenceBreakdown decompose(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                                double noise_variance, RngStream& rng, std::size_t draws, const SymbolGrid& gains,
                                std::optional<GridPosition> position)
{
    const SystemParams& p = scheme.params;
    if (draws == 0) throw DimensionError("interference_decomposition: draws must be >= 1");
    if (gains.rows() != p.M || gains.cols() != p.N) throw DimensionError("gain grid must be M x N");

    auto for_positions = [&](auto&& fn) {
        if (position) {
            fn(position->m, position->l);
            return;
        }
        for (std::size_t l = 0; l < p.N; ++l)
            for (std::size_t m = 0; m < p.M; ++m) fn(m, l);
    };
    const double positions = position ? 1.0 : static_cast<double>(p.M * p.N);

    InterferenceBreakdown r;
    for_positions([&](std::size_t m, std::size_t l) {
        r.desired_gain += gains(m, l);
        r.desired_power += std::norm(gains(m, l));
    });
    r.desired_gain /= positions;
    r.desired_power /= positions;

    const std::size_t len = frame_length(scheme);
    for (std::size_t d = 0; d < draws; ++d) {
        const SymbolGrid data = random_grid(p, rng);
        const SymbolGrid out = run_chain(scheme, ch, eq, {&data, nullptr, nullptr});
        for_positions([&](std::size_t m, std::size_t l) { r.ici_power += std::norm(out(m, l) - gains(m, l) * data(m, l)); });

        const SymbolGrid prev = random_grid(p, rng);
        const SymbolGrid leak = run_chain(scheme, ch, eq, {nullptr, &prev, nullptr});
        for_positions([&](std::size_t m, std::size_t l) { r.ibi_power += std::norm(leak(m, l)); });

        if (noise_variance > 0.0) {
            const Samples eta = noise_vector(len, noise_variance, rng);
            const SymbolGrid noise = run_chain(scheme, ch, eq, {nullptr, nullptr, &eta});
            for_positions([&](std::size_t m, std::size_t l) { r.noise_power += std::norm(noise(m, l)); });
        }
    }
    const double samples = positions * static_cast<double>(draws);
    r.ici_power /= samples;
    r.ibi_power /= samples;
    r.noise_power /= samples;
    const double impairment = r.ici_power + r.ibi_power + r.noise_power;
    r.sinr_db = impairment > 0.0 ? to_db(r.desired_power / impairment) : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace

InterferenceBreakdown interference_decomposition(const ModulationScheme& scheme, const ChannelRealization& ch,
                                                 const EqualizerSpec& eq, double noise_variance, RngStream& rng,
                                                 std::size_t draws, std::optional<GridPosition> position)
{
    const SystemParams& p = scheme.params;
    if (position && (position->m >= p.M || position->l >= p.N)) throw IndexError("position outside the grid");
    if (!position) return decompose(scheme, ch, eq, noise_variance, rng, draws, desired_gains(scheme, ch, eq), position);

    SymbolGrid impulse(p.M, p.N);
    impulse(position->m, position->l) = 1.0;
    SymbolGrid gains(p.M, p.N);
    gains(position->m, position->l) = run_chain(scheme, ch, eq, {&impulse, nullptr, nullptr})(position->m, position->l);
    return decompose(scheme, ch, eq, noise_variance, rng, draws, gains, position);
}

InterferenceBreakdown interference_decomposition(const ModulationScheme& scheme, const ChannelRealization& ch,
                                                 const EqualizerSpec& eq, double noise_variance, RngStream& rng,
                                                 std::size_t draws, const SymbolGrid& gains)
{
    return decompose(scheme, ch, eq, noise_variance, rng, draws, gains, std::nullopt);
}

double error_statistics_sinr_db(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                                double noise_variance, RngStream& rng, std::size_t draws)
{
    return error_statistics_sinr_db(scheme, ch, eq, noise_variance, rng, draws, desired_gains(scheme, ch, eq));
}

double error_statistics_sinr_db(const ModulationScheme& scheme, const ChannelRealization& ch, const EqualizerSpec& eq,
                                double noise_variance, RngStream& rng, std::size_t draws, const SymbolGrid& gains)
{
    const SystemParams& p = scheme.params;
    if (gains.rows() != p.M || gains.cols() != p.N) throw DimensionError("gain grid must be M x N");
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        const SymbolGrid data = random_grid(p, rng);
        const SymbolGrid prev = random_grid(p, rng);
        const Samples eta = noise_vector(frame_length(scheme), noise_variance, rng);
        const SymbolGrid out = run_chain(scheme, ch, eq, {&data, &prev, &eta});
        for (std::size_t l = 0; l < p.N; ++l) {
            for (std::size_t m = 0; m < p.M; ++m) {
                signal += std::norm(gains(m, l) * data(m, l));
                error += std::norm(out(m, l) - gains(m, l) * data(m, l));
            }
        }
    }
    return to_db(signal / error);
}

IbiBound ibi_bound_check(const ModulationScheme& scheme, std::span<const cd> leak, std::size_t l)
{
    const SystemParams& p = scheme.params;
    if (!scheme.codes) throw UnknownSystem("ibi_bound_check needs an OCBT scheme");
    if (l >= p.N) throw IndexError("symbol index out of range");
    const Samples folded = despread(leak, *scheme.codes, scheme.code_rows[l], p.N);

    double leak_energy = 0.0;
    for (const cd& v : leak) leak_energy += std::norm(v);
    IbiBound r;
    for (const cd& v : folded) r.measured += std::norm(v);
    const double N = static_cast<double>(p.N);
    const double K = static_cast<double>(p.K);
    r.bound = N / (K * K) * leak_energy;
    r.cs_bound = N / K * leak_energy;
    return r;
}

} // namespace ocbt
