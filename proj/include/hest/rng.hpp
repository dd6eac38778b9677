#pragma once

#include <array>
#include <cstdint>

namespace hest {

// Identifier strings recorded in output metadata: results are reproducible
// only for a fixed generator and a fixed uniform-to-normal transform.
inline constexpr const char* kRngId = "philox4x32-10";
inline constexpr const char* kNormalMethodId = "inverse-cdf-newton";

// Philox 4x32 with 10 rounds (Salmon et al., SC 2011). Stateless: one call
// maps a (counter, key) pair to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// map 64 random bits to a double in the open interval (0,1)
double uniform_from_bits(std::uint64_t bits);

// The four uniforms that drive one simulated record. The counter encodes
// (replicate, record, block), so any record of any replicate can be generated
// independently — this is what makes the replicate loop order-insensitive.
std::array<double, 4> record_uniforms(std::uint64_t seed, std::uint32_t replicate,
                                      std::uint32_t record);

}  // namespace hest
