#pragma once
//
// sosdict/rng.hpp
//
// Seeded RNG wrapper. All randomness in the library flows through this type
// so that a run is a pure function of its seeds; nothing reads the system
// entropy pool. Derived streams (per retry, per worker) come from mixing an
// index into the base seed, which keeps parallel semantics identical to
// sequential ones.
//

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace sosdict {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_seed_(seed), gen_(splitmix64(seed)) {}

    std::uint64_t base_seed() const { return base_seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1], safe to pass to log
    double uniform_pos() { return 1.0 - uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // standard normal via Box-Muller, second draw cached
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // standard normal conditioned on being >= a. Plain rejection when the
    // tail is heavy; Robert's shifted-exponential rejection otherwise, which
    // keeps the acceptance rate bounded away from zero for any threshold.
    double truncated_normal_lower(double a) {
        if (!(a == a)) throw std::invalid_argument("truncated_normal_lower: NaN bound");
        if (a <= 0.0) {
            for (;;) {
                double g = gaussian();
                if (g >= a) return g;
            }
        }
        double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
        for (;;) {
            double z = a + exponential(alpha);
            double d = z - alpha;
            if (uniform() <= std::exp(-0.5 * d * d)) return z;
        }
    }

    // independent stream addressed by index; used for per-retry seeds
    Rng derive(std::uint64_t index) const { return Rng(splitmix64(base_seed_ ^ index)); }

private:
    std::uint64_t base_seed_;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sosdict
