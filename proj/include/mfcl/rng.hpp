#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mfcl {

// Seeded generator with platform-independent draws. std::mt19937_64 output is
// fully specified by the standard; the distribution adaptors are not, so the
// floating-point and index draws are implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via the Marsaglia polar method.
    double normal();

    // Uniform integer in [0, n), unbiased.
    std::size_t index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for a named purpose. Changing the count or order of draws for one
// purpose never perturbs another.
enum class SeedPurpose : std::uint64_t {
    split = 1,
    init = 2,
    batching = 3,
    degrade = 4,
    bootstrap = 5,
    imputation = 6,
    noise = 7,
    data = 8,
    ordering = 9,
};

std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::uint64_t index = 0);

}  // namespace mfcl
