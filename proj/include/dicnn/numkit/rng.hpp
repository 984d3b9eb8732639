#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dicnn::numkit {

// xoshiro256** seeded through splitmix64.
//
// The algorithm is fixed so that splits, initializations and shuffles replay
// bit-for-bit on every platform. Only integer arithmetic touches the state;
// the floating-point helpers below are defined in terms of next_u64() and do
// not use <random> distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;
    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;
    // Standard normal via Box-Muller (one draw per call, no cached spare).
    double normal() noexcept;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& x) noexcept;

// Independent stream seed for a named purpose ("split", "init", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) noexcept;

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> rng_shuffle(Rng& rng, std::size_t n);

}  // namespace dicnn::numkit
