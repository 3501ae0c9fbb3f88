#include "ocbt/windows.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "ocbt/core.hpp"

namespace ocbt {

namespace {

double sinc(double x)
{
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

double raised_cosine_pulse(double x, double beta)
{
    const double d = 2.0 * beta * x;
    if (std::abs(1.0 - d * d) < 1e-12) return std::numbers::pi / 4.0 * sinc(1.0 / (2.0 * beta));
    return sinc(x) * std::cos(std::numbers::pi * beta * x) / (1.0 - d * d);
}

WindowProfile build_ocbt_window(std::size_t M, std::size_t L, double beta)
{
    if (M == 0 || L % 2 != 0 || L > M) throw DimensionError("OCBT window needs even L <= M");
    if (beta < 0.0 || beta > 1.0) throw DimensionError("OCBT window needs 0 <= beta <= 1");

    WindowProfile w;
    w.per_symbol.assign(M, 1.0);
    const std::size_t edge = L / 2;
    for (std::size_t q = 0; q < edge; ++q) {
        const double x = -1.0 + 2.0 * static_cast<double>(q) / static_cast<double>(L);
        const double v = raised_cosine_pulse(x, beta);
        w.per_symbol[q] = v;
        w.per_symbol[M - 1 - q] = v;
    }
    w.mean = window_mean(w);
    return w;
}

WindowProfile rectangular_window(std::size_t M)
{
    return build_ocbt_window(M, 0, 0.0);
}

WindowProfile tile_window(WindowProfile profile, std::size_t K)
{
    const std::size_t M = profile.per_symbol.size();
    profile.tiled.resize(K * M);
    for (std::size_t p = 0; p < K * M; ++p) profile.tiled[p] = profile.per_symbol[p % M];
    return profile;
}

double window_mean(const WindowProfile& profile)
{
    if (profile.per_symbol.empty()) return 0.0;
    return std::accumulate(profile.per_symbol.begin(), profile.per_symbol.end(), 0.0) /
           static_cast<double>(profile.per_symbol.size());
}

WofdmWindow build_wofdm_window(std::size_t w_len)
{
    WofdmWindow w;
    w.rise.resize(w_len);
    for (std::size_t q = 0; q < w_len; ++q)
        w.rise[q] = 0.5 * (1.0 - std::cos(std::numbers::pi * (static_cast<double>(q) + 0.5) / static_cast<double>(w_len)));
    w.fall.assign(w.rise.rbegin(), w.rise.rend());
    return w;
}

} // namespace ocbt
