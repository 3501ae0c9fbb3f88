#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ocbt/core.hpp"

namespace ocbt {

/**
 * Radix-2 iterative FFT of one power-of-two size.
 *
 * Both directions are unitary (1/sqrt(size)), so the forward transform is
 * X_u = size^{-1/2} sum_p x_p exp(-j 2 pi u p / size) and the inverse is its
 * Hermitian. Plans are immutable and can be shared across threads.
 */
class FftPlan {
public:
    explicit FftPlan(std::size_t size);

    std::size_t size() const { return size_; }

    void forward(std::span<cd> data) const { run(data, false); }
    void inverse(std::span<cd> data) const { run(data, true); }

private:
    void run(std::span<cd> data, bool inverse) const;

    std::size_t size_;
    std::vector<std::size_t> bitrev_;
    std::vector<cd> twiddle_; // exp(-j 2 pi i / size), i < size/2
};

/// Shared plan for `size`, built once per process.
std::shared_ptr<const FftPlan> fft_plan(std::size_t size);

Samples dft(std::span<const cd> x, std::size_t size);
Samples idft(std::span<const cd> X, std::size_t size);

/// K concatenated copies of `sub` (the repetition matrix R).
Samples repeat_subblock(std::span<const cd> sub, std::size_t K);

/// out_p = sum_k block_{kM+p} (the transpose R^T).
Samples fold_subblocks(std::span<const cd> block, std::size_t K);

} // namespace ocbt
