#pragma once

#include <cstdint>
#include <random>

namespace sfcr {

// Uniform draws built directly on mt19937_64 output so that generated
// scenarios do not depend on the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        uint64_t r = eng_() >> 11; // 53 bits
        double u = static_cast<double>(r) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace sfcr
