#include "ocbt/core.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace ocbt {

namespace {

constexpr std::array<const char*, 12> kParamKeys = {
    "M", "K", "N", "cp_len", "cpw_len", "cs_len", "w_len", "L", "beta", "mod_order", "sample_rate", "seed"};

void require(bool ok, const std::string& what)
{
    if (!ok) throw DimensionError("invalid parameters: " + what);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

bool is_power_of_two(std::size_t v)
{
    return v != 0 && (v & (v - 1)) == 0;
}

unsigned log2_exact(std::size_t v)
{
    if (!is_power_of_two(v)) throw DimensionError("not a power of two: " + std::to_string(v));
    unsigned r = 0;
    while ((std::size_t{1} << r) < v) ++r;
    return r;
}

void SystemParams::set_cp(std::size_t cp)
{
    cp_len = cp;
    cpw_len = 3 * cp / 2;
    cs_len = cpw_len / 2;
    w_len = cpw_len / 3;
}

SystemParams validate_params(const SystemParams& p)
{
    require(is_power_of_two(p.M) && p.M >= 2, "M must be a power of two >= 2");
    require(is_power_of_two(p.K), "K must be a power of two >= 1");
    require(p.N >= 1 && p.N <= p.K, "N must satisfy 1 <= N <= K");
    require(p.L % 2 == 0 && p.L <= p.M, "L must be even and <= M");
    require(p.beta >= 0.0 && p.beta <= 1.0, "beta must lie in [0, 1]");
    require(p.mod_order >= 2 && p.mod_order <= 8 && p.mod_order % 2 == 0,
            "mod_order must be one of 2, 4, 6, 8");
    require(p.cp_len <= p.M, "cp_len must be <= M");
    require(p.cpw_len <= p.M && p.cs_len <= p.M, "cpw_len and cs_len must be <= M");
    require(p.w_len <= p.cpw_len && p.w_len <= p.cs_len, "w_len must be <= cpw_len and <= cs_len");
    require(std::isfinite(p.sample_rate) && p.sample_rate > 0.0, "sample_rate must be positive");
    return p;
}

void to_json(nlohmann::json& j, const SystemParams& p)
{
    j = nlohmann::json{{"M", p.M},
                       {"K", p.K},
                       {"N", p.N},
                       {"cp_len", p.cp_len},
                       {"cpw_len", p.cpw_len},
                       {"cs_len", p.cs_len},
                       {"w_len", p.w_len},
                       {"L", p.L},
                       {"beta", p.beta},
                       {"mod_order", p.mod_order},
                       {"sample_rate", p.sample_rate},
                       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, SystemParams& p)
{
    if (!j.is_object()) throw ConfigError("params: expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : kParamKeys) known = known || key == k;
        if (!known) throw ConfigError("params: unknown key '" + key + "'");
    }

    auto read = [&](const char* key, auto& field) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(field);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("params: bad value for '") + key + "'");
        }
    };

    read("M", p.M);
    read("K", p.K);
    read("N", p.N);
    if (j.contains("cp_len")) {
        std::size_t cp = 0;
        read("cp_len", cp);
        p.set_cp(cp);
    }
    read("cpw_len", p.cpw_len);
    read("cs_len", p.cs_len);
    read("w_len", p.w_len);
    read("L", p.L);
    read("beta", p.beta);
    read("mod_order", p.mod_order);
    read("sample_rate", p.sample_rate);
    read("seed", p.seed);
}

SystemParams load_params(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    SystemParams p;
    from_json(j, p);
    return validate_params(p);
}

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : engine_(splitmix64(splitmix64(seed) ^ fnv1a(label)))
{
}

cd RngStream::complex_gaussian(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

RngStream derive_stream(std::uint64_t seed, std::string_view label)
{
    return RngStream(seed, label);
}

} // namespace ocbt
