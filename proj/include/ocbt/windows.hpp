#pragma once

#include <cstddef>
#include <vector>

namespace ocbt {

/// OCBT per-symbol window f_p, its K-fold tiling f(pTs), and the mean E[f_p].
struct WindowProfile {
    std::vector<double> per_symbol;
    std::vector<double> tiled;
    double mean = 1.0;
};

/// Complementary W-OFDM edge tapers: rise[q] + fall[q] == 1.
struct WofdmWindow {
    std::vector<double> rise;
    std::vector<double> fall;
};

/**
 * Truncated raised-cosine pulse h(t) = sinc(x) cos(pi beta x) / (1 - (2 beta x)^2),
 * x = t / T0. The removable singularity at |2 beta x| = 1 is replaced by its
 * limit (pi/4) sinc(1 / (2 beta)).
 */
double raised_cosine_pulse(double x, double beta);

/**
 * Flat-top window of length M whose first and last L/2 samples are the rising
 * and falling halves of the raised-cosine pulse sampled at x_q = -1 + 2q/L.
 * The tiled part is left empty; see tile_window.
 */
WindowProfile build_ocbt_window(std::size_t M, std::size_t L, double beta);

/// Rectangular window (f_p = 1), the L = 0 case.
WindowProfile rectangular_window(std::size_t M);

WindowProfile tile_window(WindowProfile profile, std::size_t K);

double window_mean(const WindowProfile& profile);

WofdmWindow build_wofdm_window(std::size_t w_len);

} // namespace ocbt
