#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "halfbqp/bits.hpp"

namespace halfbqp {

// All distributions are hand-rolled on top of mt19937_64 so a (seed, call
// sequence) pair produces the same stream on every platform; the std::
// distribution classes leave their algorithms implementation-defined.
class Rng {
public:
    explicit Rng(u64 seed) : eng_(seed) {}

    u64 next_u64() { return eng_(); }

    // uniform in [0,1) with 53-bit resolution
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound), unbiased
    u64 next_below(u64 bound) {
        if (bound == 0) throw std::invalid_argument("next_below(0)");
        u64 threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            u64 x = eng_();
            if (x >= threshold) return x % bound;
        }
    }

    bool next_bool() { return (eng_() >> 63) != 0; }

    u64 next_bits(int n) { return n == 64 ? eng_() : (eng_() >> (64 - n)); }

    // standard normal, Box-Muller pair cached
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Fisher-Yates over [0, n)
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for run `index` under `master`; runs seeded this way are
// reproducible regardless of scheduling order.
inline u64 derive_seed(u64 master, u64 index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace halfbqp
