#include "hest/rng.hpp"

namespace hest {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMultA = 0xD2511F53u;
constexpr std::uint32_t kMultB = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kMultA, x[0], hi0, lo0);
    mul_hi_lo(kMultB, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        philox_round(x, k);
        k[0] += kWeylA;
        k[1] += kWeylB;
    }
    return x;
}

double uniform_from_bits(std::uint64_t bits) {
    // top 53 bits, centred in the bin: strictly inside (0,1). The largest
    // bin centre (1 - 2^-54) is not representable and rounds to 1.0, which
    // the inverse normal CDF would map to infinity; pin that one case to
    // the largest double below 1.
    const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

std::array<double, 4> record_uniforms(std::uint64_t seed, std::uint32_t replicate,
                                      std::uint32_t record) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    std::array<double, 4> u;
    for (std::uint32_t block = 0; block < 2; ++block) {
        const auto out = philox4x32({replicate, record, block, 0u}, key);
        const std::uint64_t w0 = static_cast<std::uint64_t>(out[0]) |
                                 (static_cast<std::uint64_t>(out[1]) << 32);
        const std::uint64_t w1 = static_cast<std::uint64_t>(out[2]) |
                                 (static_cast<std::uint64_t>(out[3]) << 32);
        u[2 * block] = uniform_from_bits(w0);
        u[2 * block + 1] = uniform_from_bits(w1);
    }
    return u;
}

}  // namespace hest
