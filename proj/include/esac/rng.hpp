#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace esac {

// splitmix64 finalizer; also the mixer behind derive_seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream purposes. Every consumer of randomness owns a purpose tag, so streams
// are independent by construction and consumption in one never shifts another.
namespace stream {
inline constexpr std::uint64_t init_es = 1;
inline constexpr std::uint64_t init_sac = 2;
inline constexpr std::uint64_t perturb = 3;
inline constexpr std::uint64_t eval_episode = 4;
inline constexpr std::uint64_t sac_gate = 5;
inline constexpr std::uint64_t sac_episode = 6;
inline constexpr std::uint64_t sac_update = 7;
inline constexpr std::uint64_t crossover = 8;
inline constexpr std::uint64_t validation = 9;
inline constexpr std::uint64_t scaling = 10;
inline constexpr std::uint64_t baseline = 11;
}  // namespace stream

// Deterministic stream-seed derivation from (master, purpose, a, b).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (purpose + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (a + 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (b + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

// xoshiro256** with hand-rolled uniform/normal draws. std::normal_distribution
// is implementation-defined, which would break the bitwise determinism
// contract, so the distributions are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) {
            sm += 0x9e3779b97f4a7c15ULL;
            w = mix64(sm);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one draw per call, the sine half is discarded.
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    std::array<std::uint64_t, 4> state() const { return {s_[0], s_[1], s_[2], s_[3]}; }
    void set_state(const std::array<std::uint64_t, 4>& st) {
        for (int i = 0; i < 4; ++i) s_[i] = st[i];
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace esac
