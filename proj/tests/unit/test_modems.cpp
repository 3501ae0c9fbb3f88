// Windows, QAM mapping and the three modulators.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ocbt/channel.hpp"
#include "ocbt/equalizer.hpp"
#include "ocbt/link.hpp"
#include "ocbt/metrics.hpp"
#include "ocbt/modems.hpp"
#include "ocbt/transforms.hpp"

using namespace ocbt;

namespace {

SystemParams small(std::size_t M, std::size_t K, std::size_t N, std::size_t L = 0)
{
    SystemParams p;
    p.M = M;
    p.K = K;
    p.N = N;
    p.L = L;
    p.set_cp(M / 4);
    return p;
}

double max_abs_diff(std::span<const cd> a, std::span<const cd> b)
{
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs_diff(const SymbolGrid& a, const SymbolGrid& b)
{
    return max_abs_diff(a.flat(), b.flat());
}

Eigen::MatrixXcd dft_matrix(std::size_t M)
{
    Eigen::MatrixXcd W(M, M);
    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t q = 0; q < M; ++q)
            W(k, q) = std::polar(1.0 / std::sqrt(double(M)), -2.0 * std::numbers::pi * double(k * q % M) / double(M));
    return W;
}

} // namespace

TEST_CASE("OCBT window shape")
{
    const WindowProfile w = build_ocbt_window(1024, 324, 0.1);
    REQUIRE(w.per_symbol.size() == 1024);
    CHECK(w.per_symbol[0] == doctest::Approx(0.0).epsilon(1e-15));

    std::size_t rising = 0;
    while (rising < 1024 && w.per_symbol[rising] < 1.0) ++rising;
    CHECK(rising == 162);
    std::size_t flat = 0;
    for (double v : w.per_symbol) flat += v == 1.0;
    CHECK(flat == 700);

    for (std::size_t q = 0; q < 1024; ++q) CHECK(w.per_symbol[q] == w.per_symbol[1023 - q]);
    for (std::size_t q = 1; q < 162; ++q) CHECK(w.per_symbol[q] > w.per_symbol[q - 1]);

    // x = -1/2: sinc(1/2) cos(pi beta / 2) / (1 - beta^2)
    const double oracle = 2.0 / std::numbers::pi * std::cos(0.05 * std::numbers::pi) / 0.99;
    CHECK(w.per_symbol[81] == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(w.per_symbol[81] == doctest::Approx(0.6351).epsilon(1e-4));
}

TEST_CASE("OCBT window mean by summation")
{
    const WindowProfile w = build_ocbt_window(1024, 324, 0.1);
    double sum = 700.0;
    for (std::size_t q = 0; q < 162; ++q) {
        const double x = -1.0 + 2.0 * double(q) / 324.0;
        const double px = std::numbers::pi * x;
        const double s = x == 0.0 ? 1.0 : std::sin(px) / px;
        sum += 2.0 * s * std::cos(0.1 * px) / (1.0 - 0.04 * x * x);
    }
    CHECK(w.mean == doctest::Approx(sum / 1024.0).epsilon(1e-14));
}

TEST_CASE("raised cosine pulse at the removable singularity")
{
    const double beta = 0.25;
    const double x = 1.0 / (2.0 * beta);
    const double limit = std::numbers::pi / 4.0 * std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    CHECK(raised_cosine_pulse(x, beta) == doctest::Approx(limit));
    CHECK(raised_cosine_pulse(x * (1 + 1e-7), beta) == doctest::Approx(limit).epsilon(1e-5));
    CHECK(raised_cosine_pulse(0.0, 0.1) == 1.0);
}

TEST_CASE("rectangular and constant windows")
{
    const WindowProfile r = build_ocbt_window(64, 0, 0.1);
    for (double v : r.per_symbol) CHECK(v == 1.0);
    CHECK(r.mean == 1.0);

    WindowProfile half;
    half.per_symbol.assign(8, 0.5);
    CHECK(window_mean(half) == 0.5);
    CHECK(window_mean(rectangular_window(8)) == 1.0);

    const WindowProfile t = tile_window(rectangular_window(16), 4);
    CHECK(t.tiled.size() == 64);
    for (double v : t.tiled) CHECK(v == 1.0);

    CHECK_THROWS_AS(build_ocbt_window(64, 21, 0.1), DimensionError);
    CHECK_THROWS_AS(build_ocbt_window(16, 20, 0.1), DimensionError);
}

TEST_CASE("tiled window is periodic in M")
{
    const WindowProfile t = tile_window(build_ocbt_window(1024, 324, 0.1), 4);
    CHECK(t.tiled.size() == 4096);
    for (std::size_t p = 0; p + 1024 < t.tiled.size(); ++p) CHECK(t.tiled[p] == t.tiled[p + 1024]);
}

TEST_CASE("W-OFDM edges")
{
    CHECK(build_wofdm_window(0).rise.empty());
    CHECK(build_wofdm_window(0).fall.empty());
    const WofdmWindow w = build_wofdm_window(128);
    for (std::size_t q = 0; q < 128; ++q) CHECK(w.rise[q] + w.fall[q] == doctest::Approx(1.0).epsilon(1e-14));
    SystemParams p;
    p.set_cp(256);
    CHECK(p.cpw_len == 384);
    CHECK(p.w_len == 128);
}

TEST_CASE("QPSK mapping")
{
    const double r = 1.0 / std::sqrt(2.0);
    const Bits b{0, 0, 0, 1, 1, 0, 1, 1};
    const Samples s = qam_map(b, 2);
    CHECK(std::abs(s[0] - cd(r, r)) < 1e-15);
    CHECK(std::abs(s[1] - cd(r, -r)) < 1e-15);
    CHECK(std::abs(s[2] - cd(-r, r)) < 1e-15);
    CHECK(std::abs(s[3] - cd(-r, -r)) < 1e-15);

    CHECK(qam_demap(Samples{cd(0.9, 1.1) * r}, 2) == Bits{0, 0});
    CHECK(qam_demap(Samples{cd(1e-9, -1e-9)}, 2) == Bits{0, 1});
    CHECK(qam_demap(Samples{cd(-1e-9, 1e-9)}, 2) == Bits{1, 0});
    CHECK(qam_demap(s, 2) == b);

    CHECK_THROWS_AS(qam_map(Bits{0, 1, 1}, 2), FramingError);
}

TEST_CASE("square QAM has unit mean energy and Gray neighbours")
{
    for (unsigned order : {2u, 4u, 6u, 8u}) {
        const std::size_t points = std::size_t{1} << order;
        Bits bits(points * order);
        for (std::size_t v = 0; v < points; ++v)
            for (unsigned i = 0; i < order; ++i) bits[v * order + i] = (v >> (order - 1 - i)) & 1u;
        const Samples s = qam_map(bits, order);
        double e = 0.0;
        for (const cd& v : s) e += std::norm(v);
        CHECK(e / double(points) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(qam_demap(s, order) == bits);

        // nearest neighbours differ in exactly one bit
        double dmin = 1e9;
        for (std::size_t a = 0; a < points; ++a)
            for (std::size_t b = a + 1; b < points; ++b) dmin = std::min(dmin, std::abs(s[a] - s[b]));
        for (std::size_t a = 0; a < points; ++a)
            for (std::size_t b = a + 1; b < points; ++b)
                if (std::abs(s[a] - s[b]) < dmin * 1.001) CHECK(__builtin_popcount(unsigned(a ^ b)) == 1);
    }
}

TEST_CASE("QAM round trip on random bits")
{
    RngStream rng(4, "qam");
    for (unsigned order : {2u, 4u, 6u, 8u}) {
        const Bits b = random_bits(order * 500, rng);
        CHECK(qam_demap(qam_map(b, order), order) == b);
    }
}

TEST_CASE("map_grid requires a whole block")
{
    const SystemParams p = small(8, 2, 2);
    CHECK_THROWS_AS(map_grid(Bits(31), p), FramingError);
    CHECK(map_grid(Bits(32), p).cols() == 2);
}

TEST_CASE("OCBT reduces to the unitary IDFT for N = K = 1")
{
    SystemParams p = small(2, 1, 1);
    p.set_cp(0);
    const ModulationScheme s = make_scheme(System::Ocbt, p);
    SymbolGrid g(2, 1);
    g(0, 0) = 1.0;
    g(1, 0) = -1.0;
    const Samples x = ocbt_modulate(g, s);
    CHECK(std::abs(x[0]) < 1e-15);
    CHECK(std::abs(x[1] - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("OCBT modulator matches the dense block operator")
{
    for (std::size_t L : {0u, 4u}) {
        const std::size_t M = 8, K = 4, N = 3;
        const SystemParams p = small(M, K, N, L);
        const ModulationScheme s = make_scheme(System::Ocbt, p);
        RngStream rng(12, "dense");
        const SymbolGrid a = random_grid(p, rng);

        const Eigen::MatrixXcd Wh = dft_matrix(M).adjoint();
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(K * M, M);
        for (std::size_t k = 0; k < K; ++k) R.block(k * M, 0, M, M).setIdentity();
        Eigen::MatrixXd F = Eigen::MatrixXd::Zero(K * M, K * M);
        for (std::size_t q = 0; q < K * M; ++q) F(q, q) = s.window.tiled[q];
        const WalshCodeSet codes(K);

        Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(K * M);
        for (std::size_t n = 0; n < N; ++n) {
            Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K * M, K * M);
            for (std::size_t q = 0; q < K * M; ++q) C(q, q) = codes(n, q / M);
            const Eigen::Map<const Eigen::VectorXcd> an(a.column(n).data(), M);
            sum += C * R * Wh * an;
        }
        const Eigen::VectorXcd oracle = F * sum / std::sqrt(double(N));
        const Samples x = ocbt_modulate(a, s);
        CHECK(max_abs_diff(x, Samples(oracle.data(), oracle.data() + oracle.size())) < 1e-12);
    }
}

TEST_CASE("OCBT mean sample power is 1 for a rectangular window")
{
    for (std::size_t N : {1u, 2u, 4u}) {
        const SystemParams p = small(16, 4, N);
        const ModulationScheme s = make_scheme(System::Ocbt, p);
        RngStream rng(77, "power");
        double acc = 0.0;
        std::size_t count = 0;
        for (int t = 0; t < 10000; ++t) {
            for (const cd& v : ocbt_modulate(random_grid(p, rng), s)) acc += std::norm(v);
            count += p.K * p.M;
        }
        CHECK(acc / double(count) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("OCBT is ISI-free on an ideal channel")
{
    for (std::size_t M : {8u, 64u}) {
        for (std::size_t K : {1u, 2u, 4u, 8u}) {
            for (std::size_t N = 1; N <= K; ++N) {
                const SystemParams p = small(M, K, N);
                const ModulationScheme s = make_scheme(System::Ocbt, p);
                RngStream rng(M * 100 + K * 10 + N, "isi");
                const SymbolGrid a = random_grid(p, rng);
                CHECK(max_abs_diff(ocbt_demodulate_all(ocbt_modulate(a, s), s), a) < 1e-12);
            }
        }
    }
}

TEST_CASE("windowed OCBT returns W diag(f) W^H a")
{
    const std::size_t M = 64, K = 4, N = 4;
    const SystemParams p = small(M, K, N, 20);
    const ModulationScheme s = make_scheme(System::Ocbt, p);
    RngStream rng(5, "wfw");
    const SymbolGrid a = random_grid(p, rng);
    const SymbolGrid out = ocbt_demodulate_all(ocbt_modulate(a, s), s);

    const Eigen::MatrixXcd W = dft_matrix(M);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(M, M);
    for (std::size_t q = 0; q < M; ++q) F(q, q) = s.window.per_symbol[q];
    const Eigen::MatrixXcd G = W * F * W.adjoint();
    for (std::size_t l = 0; l < N; ++l) {
        const Eigen::Map<const Eigen::VectorXcd> al(a.column(l).data(), M);
        const Eigen::VectorXcd want = G * al;
        CHECK(max_abs_diff(out.column(l), std::span<const cd>(want.data(), M)) < 1e-12);
    }
}

TEST_CASE("OCBT single subcarrier sees gain E[f] plus leakage")
{
    const SystemParams p = small(64, 4, 2, 20);
    const ModulationScheme s = make_scheme(System::Ocbt, p);
    SymbolGrid a(64, 2);
    a(5, 1) = cd(0.3, -0.7);
    const SymbolGrid out = ocbt_demodulate_all(ocbt_modulate(a, s), s);
    CHECK(std::abs(out(5, 1) - s.window.mean * a(5, 1)) < 1e-12);
    double leak = 0.0;
    for (std::size_t m = 0; m < 64; ++m)
        if (m != 5) leak += std::norm(out(m, 1));
    CHECK(leak > 0.0);
    for (std::size_t m = 0; m < 64; ++m) CHECK(std::abs(out(m, 0)) < 1e-12);
}

TEST_CASE("OCBT custom code rows")
{
    SystemParams p = small(16, 4, 2);
    const ModulationScheme s = make_ocbt_scheme(p, rectangular_window(16), {3, 1});
    RngStream rng(9, "rows");
    const SymbolGrid a = random_grid(p, rng);
    CHECK(max_abs_diff(ocbt_demodulate_all(ocbt_modulate(a, s), s), a) < 1e-12);
    CHECK_THROWS_AS(make_ocbt_scheme(p, rectangular_window(16), {1, 1}), DimensionError);
    CHECK_THROWS_AS(make_ocbt_scheme(p, rectangular_window(16), {0, 4}), IndexError);
    CHECK_THROWS_AS(ocbt_demodulate(ocbt_modulate(a, s), s, 2), IndexError);
}

TEST_CASE("CP-OFDM framing")
{
    SystemParams p = small(16, 4, 3);
    p.set_cp(0);
    ModulationScheme s = make_scheme(System::CpOfdm, p);
    RngStream rng(2, "cp");
    const SymbolGrid a = random_grid(p, rng);
    Samples cat;
    for (std::size_t n = 0; n < 3; ++n) {
        const Samples x = idft(a.column(n), 16);
        cat.insert(cat.end(), x.begin(), x.end());
    }
    CHECK(max_abs_diff(cpofdm_modulate(a, s), cat) == 0.0);

    p.set_cp(4);
    s = make_scheme(System::CpOfdm, p);
    const Samples x = cpofdm_modulate(a, s);
    CHECK(x.size() == 3 * 20);
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t q = 0; q < 4; ++q) CHECK(x[n * 20 + q] == x[n * 20 + 16 + q]);
}

TEST_CASE("CP-OFDM recovery through short channels")
{
    SystemParams p = small(8, 2, 2);
    p.set_cp(2);
    const ModulationScheme s = make_scheme(System::CpOfdm, p);
    RngStream rng(6, "cp-chan");
    const SymbolGrid a = random_grid(p, rng);
    const EqualizerSpec zf{EqualizerKind::ZF, 0.0};
    for (const ChannelRealization& h :
         {ChannelRealization{{1.0}}, ChannelRealization{{0.0, 1.0}}, ChannelRealization{{1.0, 0.5}},
          ChannelRealization{{cd(0.8, 0.1), cd(-0.3, 0.2), cd(0.1, 0.1)}}}) {
        const Samples tx = cpofdm_modulate(a, s);
        const Samples y = stream_receive(tx, h, Samples(tx.size()), h, tx.size());
        CHECK(max_abs_diff(receive_frame(s, y, h, zf), a) < 1e-10);
    }
}

TEST_CASE("CP-OFDM two-tap channel against a direct linear solve")
{
    SystemParams p = small(8, 1, 1);
    p.set_cp(2);
    const ModulationScheme s = make_scheme(System::CpOfdm, p);
    RngStream rng(8, "solve");
    const SymbolGrid a = random_grid(p, rng);
    const ChannelRealization h{{1.0, 0.5}};
    const Samples tx = cpofdm_modulate(a, s);
    const Samples y = stream_receive(tx, h, Samples(tx.size()), h, tx.size());

    // y[cp:] = circulant(h) x, x = W^H a
    Eigen::MatrixXcd Hc = Eigen::MatrixXcd::Zero(8, 8);
    for (std::size_t r = 0; r < 8; ++r) {
        Hc(r, r) = 1.0;
        Hc(r, (r + 7) % 8) = 0.5;
    }
    const Eigen::MatrixXcd A = Hc * dft_matrix(8).adjoint();
    const Eigen::Map<const Eigen::VectorXcd> yv(y.data() + 2, 8);
    const Eigen::VectorXcd solved = A.partialPivLu().solve(yv);
    const SymbolGrid got = receive_frame(s, y, h, {EqualizerKind::ZF, 0.0});
    CHECK(max_abs_diff(got.column(0), std::span<const cd>(solved.data(), 8)) < 1e-10);
    CHECK(max_abs_diff(got, a) < 1e-10);
}

TEST_CASE("W-OFDM framing")
{
    SystemParams p = small(16, 4, 3);
    p.cpw_len = 6;
    p.cs_len = 3;
    p.w_len = 0;
    const ModulationScheme hard = make_scheme(System::WOfdm, p);
    RngStream rng(3, "wofdm");
    const SymbolGrid a = random_grid(p, rng);
    const Samples x0 = wofdm_modulate(a, hard);
    const std::size_t ext = 16 + 6 + 3;
    CHECK(x0.size() == 3 * ext);

    p.w_len = 2;
    const ModulationScheme soft = make_scheme(System::WOfdm, p);
    const Samples x = wofdm_modulate(a, soft);
    const EfficiencyReport eff = time_efficiency(System::WOfdm, 3, p);
    CHECK(x.size() == eff.L_I + eff.L_T);

    const std::size_t hop = ext - 2;
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t q = 2; q + 2 < ext; ++q) CHECK(x[n * hop + q] == x0[n * ext + q]);
}

TEST_CASE("W-OFDM recovery")
{
    SystemParams p = small(16, 4, 3);
    p.cpw_len = 6;
    p.cs_len = 3;
    p.w_len = 2;
    const ModulationScheme s = make_scheme(System::WOfdm, p);
    RngStream rng(13, "wofdm-rx");
    const SymbolGrid a = random_grid(p, rng);
    const SymbolGrid prev = random_grid(p, rng);
    const EqualizerSpec zf{EqualizerKind::ZF, 0.0};

    const ChannelRealization flat{{1.0}};
    CHECK(max_abs_diff(receive_frame(s, wofdm_modulate(a, s), flat, zf), a) < 1e-12);

    const ChannelRealization h{{cd(0.9, 0.2), cd(-0.4, 0.1), cd(0.2, -0.3), cd(0.1, 0.05)}};
    const Samples y = stream_receive(wofdm_modulate(a, s), h, wofdm_modulate(prev, s), h, frame_hop(s));
    CHECK(max_abs_diff(receive_frame(s, y, h, zf), a) < 1e-10);
}

TEST_CASE("W-OFDM MMSE against a dense linear-model solve")
{
    SystemParams p = small(16, 2, 2);
    p.cpw_len = 6;
    p.cs_len = 3;
    p.w_len = 2;
    const ModulationScheme s = make_scheme(System::WOfdm, p);
    RngStream rng(14, "wofdm-mmse");
    const SymbolGrid a = random_grid(p, rng);
    ChannelRealization h;
    h.taps = {rng.complex_gaussian(0.6), rng.complex_gaussian(0.3), rng.complex_gaussian(0.1)};
    const double nv = 1e-6;
    const EqualizerSpec mmse{EqualizerKind::MMSE, nv};

    // Per symbol the core samples see a circulant channel: y = Hc W^H a.
    Eigen::MatrixXcd Hc = Eigen::MatrixXcd::Zero(16, 16);
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t g = 0; g < 3; ++g) Hc(r, (r + 16 - g) % 16) = h.taps[g];
    const Eigen::MatrixXcd A = Hc * dft_matrix(16).adjoint();
    const Eigen::MatrixXcd G =
        (A.adjoint() * A + nv * Eigen::MatrixXcd::Identity(16, 16)).ldlt().solve(A.adjoint());

    const Samples clean = stream_receive(wofdm_modulate(a, s), h, Samples(frame_length(s)), h, frame_hop(s));
    const SymbolGrid got = receive_frame(s, clean, h, mmse);
    const std::size_t hop = 16 + 6 + 3 - 2;
    for (std::size_t n = 0; n < 2; ++n) {
        const Eigen::Map<const Eigen::VectorXcd> yv(clean.data() + n * hop + 6, 16);
        const Eigen::VectorXcd want = G * yv;
        CHECK(max_abs_diff(got.column(n), std::span<const cd>(want.data(), 16)) < 1e-9);
    }

    const Samples noisy = add_awgn(std::span<const cd>(clean), nv, rng);
    const SymbolGrid est = receive_frame(s, noisy, h, mmse);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.flat().size(); ++i) mse += std::norm(est.flat()[i] - a.flat()[i]);
    CHECK(mse / double(a.flat().size()) < 1e-4);
}
