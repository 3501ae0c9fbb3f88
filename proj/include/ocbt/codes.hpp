#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ocbt/core.hpp"

namespace ocbt {

/// K x K matrix of +-1 Walsh (Sylvester-Hadamard) rows. Row n holds c_{n,k}.
class WalshCodeSet {
public:
    explicit WalshCodeSet(std::size_t K);

    std::size_t size() const { return K_; }
    int operator()(std::size_t row, std::size_t k) const { return codes_[row * K_ + k]; }
    std::span<const int> row(std::size_t n) const;

private:
    std::size_t K_;
    std::vector<int> codes_;
};

/// Throws DimensionError unless K is a power of two.
WalshCodeSet walsh_matrix(std::size_t K);

/// Multiplies sub-block k of `symbol` (length K*M) by c_{n,k}.
Samples spread(std::span<const cd> symbol, const WalshCodeSet& codes, std::size_t n);

/// In-place variant of spread, used by the modulator's accumulation path.
void spread_accumulate(std::span<const cd> sub_block, const WalshCodeSet& codes, std::size_t n,
                       std::span<cd> block);

/// (sqrt(N)/K) * sum_k c_{l,k} * (sub-block k of block). Output has M samples.
/// `l` is a code row; N only sets the normalization.
Samples despread(std::span<const cd> block, const WalshCodeSet& codes, std::size_t l, std::size_t N);

} // namespace ocbt
