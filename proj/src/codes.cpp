#include "ocbt/codes.hpp"

#include <cmath>

namespace ocbt {

namespace {

std::size_t sub_block_len(std::size_t total, std::size_t K)
{
    if (K == 0 || total % K != 0)
        throw DimensionError("block length " + std::to_string(total) + " is not a multiple of K=" +
                             std::to_string(K));
    return total / K;
}

void check_row(const WalshCodeSet& codes, std::size_t n)
{
    if (n >= codes.size())
        throw IndexError("code row " + std::to_string(n) + " out of range for K=" + std::to_string(codes.size()));
}

} // namespace

WalshCodeSet::WalshCodeSet(std::size_t K) : K_(K), codes_(K * K)
{
    if (!is_power_of_two(K)) throw DimensionError("Walsh code length must be a power of two");
    // Sylvester construction: H_{2n} = [[H, H], [H, -H]].
    codes_[0] = 1;
    for (std::size_t n = 1; n < K; n *= 2) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                const int v = codes_[r * K + c];
                codes_[r * K + c + n] = v;
                codes_[(r + n) * K + c] = v;
                codes_[(r + n) * K + c + n] = -v;
            }
        }
    }
}

std::span<const int> WalshCodeSet::row(std::size_t n) const
{
    check_row(*this, n);
    return {codes_.data() + n * K_, K_};
}

WalshCodeSet walsh_matrix(std::size_t K)
{
    return WalshCodeSet(K);
}

Samples spread(std::span<const cd> symbol, const WalshCodeSet& codes, std::size_t n)
{
    check_row(codes, n);
    const std::size_t K = codes.size();
    const std::size_t M = sub_block_len(symbol.size(), K);
    Samples out(symbol.begin(), symbol.end());
    for (std::size_t k = 0; k < K; ++k) {
        if (codes(n, k) > 0) continue;
        for (std::size_t p = 0; p < M; ++p) out[k * M + p] = -out[k * M + p];
    }
    return out;
}

void spread_accumulate(std::span<const cd> sub_block, const WalshCodeSet& codes, std::size_t n,
                       std::span<cd> block)
{
    check_row(codes, n);
    const std::size_t K = codes.size();
    const std::size_t M = sub_block.size();
    if (block.size() != K * M) throw DimensionError("spread_accumulate: block length must be K*M");
    for (std::size_t k = 0; k < K; ++k) {
        cd* dst = block.data() + k * M;
        if (codes(n, k) > 0) {
            for (std::size_t p = 0; p < M; ++p) dst[p] += sub_block[p];
        } else {
            for (std::size_t p = 0; p < M; ++p) dst[p] -= sub_block[p];
        }
    }
}

Samples despread(std::span<const cd> block, const WalshCodeSet& codes, std::size_t l, std::size_t N)
{
    check_row(codes, l);
    const std::size_t K = codes.size();
    if (N == 0 || N > K) throw DimensionError("despread: need 1 <= N <= K, got N=" + std::to_string(N));
    const std::size_t M = sub_block_len(block.size(), K);
    Samples out(M);
    for (std::size_t k = 0; k < K; ++k) {
        const double c = codes(l, k);
        for (std::size_t p = 0; p < M; ++p) out[p] += c * block[k * M + p];
    }
    const double scale = std::sqrt(static_cast<double>(N)) / static_cast<double>(K);
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace ocbt
