#include "ocbt/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ocbt {

FftPlan::FftPlan(std::size_t size) : size_(size), bitrev_(size), twiddle_(size / 2)
{
    if (!is_power_of_two(size)) throw DimensionError("FFT size must be a power of two, got " + std::to_string(size));
    const unsigned bits = log2_exact(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t r = 0;
        for (unsigned b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
    }
    for (std::size_t i = 0; i < size / 2; ++i)
        twiddle_[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(size));
}

void FftPlan::run(std::span<cd> data, bool inverse) const
{
    if (data.size() != size_) throw DimensionError("FFT input length does not match plan size");
    for (std::size_t i = 0; i < size_; ++i)
        if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);

    for (std::size_t len = 2; len <= size_; len *= 2) {
        const std::size_t half = len / 2;
        const std::size_t stride = size_ / len;
        for (std::size_t start = 0; start < size_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cd w = twiddle_[j * stride];
                if (inverse) w = std::conj(w);
                const cd t = w * data[start + j + half];
                data[start + j + half] = data[start + j] - t;
                data[start + j] += t;
            }
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(size_));
    for (auto& v : data) v *= scale;
}

std::shared_ptr<const FftPlan> fft_plan(std::size_t size)
{
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[size];
    if (!slot) {
        try {
            slot = std::make_shared<const FftPlan>(size);
        } catch (...) {
            cache.erase(size);
            throw;
        }
    }
    return slot;
}

Samples dft(std::span<const cd> x, std::size_t size)
{
    if (x.size() != size) throw DimensionError("dft: input length does not match size");
    Samples out(x.begin(), x.end());
    fft_plan(size)->forward(out);
    return out;
}

Samples idft(std::span<const cd> X, std::size_t size)
{
    if (X.size() != size) throw DimensionError("idft: input length does not match size");
    Samples out(X.begin(), X.end());
    fft_plan(size)->inverse(out);
    return out;
}

Samples repeat_subblock(std::span<const cd> sub, std::size_t K)
{
    if (K == 0) throw DimensionError("repeat_subblock: K must be >= 1");
    Samples out;
    out.reserve(sub.size() * K);
    for (std::size_t k = 0; k < K; ++k) out.insert(out.end(), sub.begin(), sub.end());
    return out;
}

Samples fold_subblocks(std::span<const cd> block, std::size_t K)
{
    if (K == 0 || block.size() % K != 0) throw DimensionError("fold_subblocks: length must be a multiple of K");
    const std::size_t M = block.size() / K;
    Samples out(M);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t p = 0; p < M; ++p) out[p] += block[k * M + p];
    return out;
}

} // namespace ocbt
