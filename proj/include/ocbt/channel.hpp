#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ocbt/core.hpp"

namespace ocbt {

/// Tapped delay line h(pTs), p = 0..G-1, at integer sample delays.
struct ChannelRealization {
    std::vector<cd> taps{cd(1.0)};

    std::size_t length() const { return taps.size(); }
};

/// Power-delay profile of a tapped-delay-line fading model.
struct FadingProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
    double sample_rate = 30.72e6;
};

/// ITU-R Vehicular-A: delays 0/310/710/1090/1730/2510 ns, powers 0/-1/-9/-10/-15/-20 dB.
FadingProfile vehicular_a(double sample_rate = 30.72e6);

void from_json(const nlohmann::json& j, FadingProfile& profile);
void to_json(nlohmann::json& j, const FadingProfile& profile);

/// Path delays rounded to the nearest sample at profile.sample_rate.
std::vector<std::size_t> tap_delays(const FadingProfile& profile);

/// One block-fading draw: independent circular Gaussian path gains with the
/// profile's powers scaled to unit total, coincident paths summed.
ChannelRealization veha_realization(const FadingProfile& profile, RngStream& rng);

/// Linear convolution; output length signal.size() + G - 1.
Samples fir_convolve(std::span<const cd> signal, const ChannelRealization& ch);

/// Dense block form of streaming convolution: y_i = current s_i + previous s_{i-1}.
/// Intended for oracles and small sizes.
struct ToeplitzPair {
    Eigen::MatrixXcd current;   ///< lower-triangular Toeplitz
    Eigen::MatrixXcd previous;  ///< upper-triangular Toeplitz (tail of the previous block)
};

ToeplitzPair to_toeplitz(const ChannelRealization& ch, std::size_t block_len);

/// Adds circular complex Gaussian noise of per-sample power `variance`.
void add_awgn(std::span<cd> signal, double variance, RngStream& rng);
Samples add_awgn(std::span<const cd> signal, double variance, RngStream& rng);

/**
 * Received samples of the current frame in a two-frame stream.
 *
 * The previous frame starts `hop` samples before the current one and passes
 * through its own realization; its convolution tail (and any waveform overlap)
 * lands at the start of the current frame. Output length is current.size().
 */
Samples stream_receive(std::span<const cd> current, const ChannelRealization& h_current,
                       std::span<const cd> previous, const ChannelRealization& h_previous, std::size_t hop);

} // namespace ocbt
