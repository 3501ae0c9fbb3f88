#include "ocbt/channel.hpp"

#include <cmath>

namespace ocbt {

FadingProfile vehicular_a(double sample_rate)
{
    return {{0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0}, {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}, sample_rate};
}

void from_json(const nlohmann::json& j, FadingProfile& profile)
{
    if (!j.is_object()) throw ConfigError("fading profile: expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "delays_ns" && key != "powers_db" && key != "sample_rate")
            throw ConfigError("fading profile: unknown key '" + key + "'");
    try {
        j.at("delays_ns").get_to(profile.delays_ns);
        j.at("powers_db").get_to(profile.powers_db);
        if (j.contains("sample_rate")) j.at("sample_rate").get_to(profile.sample_rate);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("fading profile: ") + e.what());
    }
    if (profile.delays_ns.empty() || profile.delays_ns.size() != profile.powers_db.size())
        throw ConfigError("fading profile: delays_ns and powers_db must be non-empty and equally long");
    if (profile.delays_ns.front() != 0.0) throw ConfigError("fading profile: first delay must be 0");
    for (std::size_t i = 1; i < profile.delays_ns.size(); ++i)
        if (profile.delays_ns[i] < profile.delays_ns[i - 1])
            throw ConfigError("fading profile: delays_ns must be nondecreasing");
    if (!(profile.sample_rate > 0.0)) throw ConfigError("fading profile: sample_rate must be positive");
}

void to_json(nlohmann::json& j, const FadingProfile& profile)
{
    j = nlohmann::json{
        {"delays_ns", profile.delays_ns}, {"powers_db", profile.powers_db}, {"sample_rate", profile.sample_rate}};
}

std::vector<std::size_t> tap_delays(const FadingProfile& profile)
{
    std::vector<std::size_t> idx;
    idx.reserve(profile.delays_ns.size());
    for (double d : profile.delays_ns)
        idx.push_back(static_cast<std::size_t>(std::llround(d * 1e-9 * profile.sample_rate)));
    return idx;
}

ChannelRealization veha_realization(const FadingProfile& profile, RngStream& rng)
{
    const auto idx = tap_delays(profile);
    double total = 0.0;
    for (double db : profile.powers_db) total += std::pow(10.0, db / 10.0);

    // Profile normalized to unit total power; each tap is an independent
    // Rayleigh draw, so the instantaneous energy fades around 1.
    ChannelRealization ch;
    ch.taps.assign(idx.back() + 1, cd{});
    for (std::size_t i = 0; i < idx.size(); ++i)
        ch.taps[idx[i]] += rng.complex_gaussian(std::pow(10.0, profile.powers_db[i] / 10.0) / total);
    return ch;
}

Samples fir_convolve(std::span<const cd> signal, const ChannelRealization& ch)
{
    if (signal.empty()) return {};
    const std::size_t G = ch.taps.size();
    Samples out(signal.size() + G - 1);
    for (std::size_t g = 0; g < G; ++g) {
        const cd h = ch.taps[g];
        if (h == cd{}) continue;
        for (std::size_t p = 0; p < signal.size(); ++p) out[p + g] += h * signal[p];
    }
    return out;
}

ToeplitzPair to_toeplitz(const ChannelRealization& ch, std::size_t block_len)
{
    const std::size_t G = ch.taps.size();
    if (G == 0 || G > block_len) throw DimensionError("to_toeplitz needs 1 <= G <= block_len");
    const auto n = static_cast<Eigen::Index>(block_len);
    ToeplitzPair t{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto lag = static_cast<std::size_t>(r - c);
            if (r >= c && lag < G) t.current(r, c) = ch.taps[lag];
            const auto wrap = static_cast<std::size_t>(r + n - c);
            if (c > r && wrap < G) t.previous(r, c) = ch.taps[wrap];
        }
    }
    return t;
}

void add_awgn(std::span<cd> signal, double variance, RngStream& rng)
{
    if (variance <= 0.0) return;
    for (cd& v : signal) v += rng.complex_gaussian(variance);
}

Samples add_awgn(std::span<const cd> signal, double variance, RngStream& rng)
{
    Samples out(signal.begin(), signal.end());
    add_awgn(std::span<cd>(out), variance, rng);
    return out;
}

Samples stream_receive(std::span<const cd> current, const ChannelRealization& h_current,
                       std::span<const cd> previous, const ChannelRealization& h_previous, std::size_t hop)
{
    Samples y = fir_convolve(current, h_current);
    y.resize(current.size());
    const Samples tail = fir_convolve(previous, h_previous);
    for (std::size_t q = hop; q < tail.size() && q - hop < y.size(); ++q) y[q - hop] += tail[q];
    return y;
}

} // namespace ocbt
