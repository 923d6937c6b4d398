#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace csl
{
    inline std::uint64_t splitmix64(std::uint64_t &state)
    {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Order-sensitive 64-bit combination of two words.
    inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t s = a ^ (b * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
        splitmix64(s);
        return splitmix64(s);
    }

    /// Seed for a named sub-experiment: FNV-1a of the label folded into the master seed.
    inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : label)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return hash_combine(seed, h);
    }

    /// xoshiro256** generator.
    class Rng
    {
    public:
        using result_type = std::uint64_t;

        explicit Rng(std::uint64_t seed)
        {
            for (auto &w : s_)
                w = splitmix64(seed);
        }

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return ~result_type{0}; }

        result_type operator()()
        {
            const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
            const std::uint64_t t = s_[1] << 17;
            s_[2] ^= s_[0];
            s_[3] ^= s_[1];
            s_[1] ^= s_[2];
            s_[0] ^= s_[3];
            s_[2] ^= t;
            s_[3] = rotl(s_[3], 45);
            return out;
        }

        /// Uniform on the open interval (0, 1), 53-bit resolution.
        double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

        /// Exponential with rate 1.
        double exponential() { return -std::log(uniform()); }

    private:
        static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

        std::uint64_t s_[4];
    };

    /// Stream of replicate `index` under a master seed; a pure function of both.
    struct RngStream
    {
        std::uint64_t seed = 0;
        std::uint64_t index = 0;

        Rng make() const { return Rng(hash_combine(seed, index)); }
    };
} // namespace csl
