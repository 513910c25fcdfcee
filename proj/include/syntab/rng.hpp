#ifndef SYNTAB_RNG_HPP
#define SYNTAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace syntab {

// Splittable counter-based generator (SplitMix64 core). Every random draw in
// the toolkit flows through an instance of this class; child() derives an
// independent stream from the origin seed and a tag, so the draw count of the
// parent never affects a child's sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() { return mix(seed_ + (++counter_) * kGamma); }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log() argument.
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Gaussian via Box-Muller; the sine branch is discarded so each call
    // consumes exactly two uniforms.
    double normal(double stddev = 1.0) {
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(2.0 * kPi * u2) * stddev;
    }

    // Uniform index in [0, n) via 128-bit multiply-shift.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Fisher-Yates; identical order on every platform.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    // Independent stream derived from the origin seed and a tag. child(t) is
    // the same stream no matter how many draws this generator has made.
    Rng child(std::uint64_t tag) const {
        return Rng(mix(seed_ ^ mix(tag + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t seed() const { return seed_; }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace syntab

#endif
