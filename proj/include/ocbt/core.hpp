#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ocbt {

using cd = std::complex<double>;

/// Complex baseband samples. Time is measured in sample periods throughout.
using Samples = std::vector<cd>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct FramingError : Error { using Error::Error; };
struct SingularChannel : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct UnknownSystem : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// SystemParams
// ---------------------------------------------------------------------------

/**
 * Scalar configuration shared by every stage of the link.
 *
 * All lengths are in samples. The W-OFDM extension lengths default to the
 * values derived from cp_len (prefix 3/2 CP, suffix half the prefix, roll-off
 * a third of the prefix).
 */
struct SystemParams {
    std::size_t M = 1024;        ///< subcarriers, samples per sub-block
    std::size_t K = 4;           ///< spreading / repetition factor
    std::size_t N = 4;           ///< symbols per block, N <= K
    std::size_t cp_len = 256;    ///< CP-OFDM prefix
    std::size_t cpw_len = 384;   ///< W-OFDM prefix
    std::size_t cs_len = 192;    ///< W-OFDM suffix
    std::size_t w_len = 128;     ///< W-OFDM roll-off overlap
    std::size_t L = 324;         ///< OCBT window transition budget
    double beta = 0.1;           ///< raised-cosine roll-off
    unsigned mod_order = 2;      ///< bits per QAM symbol
    double sample_rate = 30.72e6;
    std::uint64_t seed = 1;

    std::size_t block_len() const { return K * M; }

    /// Sets cp_len and re-derives the W-OFDM extension lengths from it.
    void set_cp(std::size_t cp);

    bool operator==(const SystemParams&) const = default;
};

/// Returns `raw` unchanged when every invariant holds; throws DimensionError
/// naming the violated constraint otherwise.
SystemParams validate_params(const SystemParams& raw);

bool is_power_of_two(std::size_t v);
unsigned log2_exact(std::size_t v);

void to_json(nlohmann::json& j, const SystemParams& p);
/// Unknown keys are rejected with ConfigError. Missing W-OFDM lengths are
/// derived from cp_len; other missing keys keep their defaults.
void from_json(const nlohmann::json& j, SystemParams& p);

SystemParams load_params(const std::string& path);

// ---------------------------------------------------------------------------
// SymbolGrid
// ---------------------------------------------------------------------------

/// M x N QAM data for one block; column n is the data vector of symbol n.
class SymbolGrid {
public:
    SymbolGrid() = default;
    SymbolGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cd& operator()(std::size_t m, std::size_t n) { return data_[n * rows_ + m]; }
    const cd& operator()(std::size_t m, std::size_t n) const { return data_[n * rows_ + m]; }

    std::span<cd> column(std::size_t n) { return {data_.data() + n * rows_, rows_}; }
    std::span<const cd> column(std::size_t n) const { return {data_.data() + n * rows_, rows_}; }

    std::span<const cd> flat() const { return data_; }
    std::span<cd> flat() { return data_; }

    bool operator==(const SymbolGrid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/**
 * Deterministic pseudorandom stream keyed by (seed, label).
 *
 * Each Monte Carlo trial owns one stream, so results do not depend on the
 * order in which trials are executed.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label);

    std::uint64_t next_u64() { return engine_(); }
    unsigned bit() { return static_cast<unsigned>(engine_() >> 63); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double gaussian() { return normal_(engine_); }

    /// Circular complex Gaussian with E|z|^2 = variance.
    cd complex_gaussian(double variance);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

RngStream derive_stream(std::uint64_t seed, std::string_view label);

} // namespace ocbt
