#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "amsim/stiffness.hpp"

namespace amsim {

/// Deterministic normal deviates: Box-Muller over explicit 53-bit uniforms
/// from mt19937_64. std::normal_distribution is implementation-defined, so
/// it cannot back byte-stable datasets.
class SeededGaussian {
public:
    explicit SeededGaussian(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean = 0.0, double sigma = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sigma * spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean + sigma * r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Ground-truth curve behind the shipped characterization dataset: a
/// quadratic through 80 N/m at 80 mm and 290 N/m at 195 mm, monotonically
/// increasing over that band (the extended arm is the stiff one).
inline StiffnessModel synthetic_stiffness_truth() {
    StiffnessModel m;
    const double z0 = 0.080, z1 = 0.195, k0 = 80.0, k1 = 290.0;
    m.c2 = 8000.0;
    m.c1 = (k1 - k0 - m.c2 * (z1 * z1 - z0 * z0)) / (z1 - z0);
    m.c0 = k0 - m.c1 * z0 - m.c2 * z0 * z0;
    m.z_lo = z0;
    m.z_hi = z1;
    return m;
}

/// Synthetic load-cell dataset: heights every 5 mm across [80, 195] mm,
/// plate pressed in 1 mm increments up to 10 mm, forces carry 0.02 N
/// Gaussian noise (clipped at zero, the cell cannot pull).
inline std::vector<StiffnessSample> synthetic_stiffness_samples(std::uint64_t seed = 42) {
    const StiffnessModel truth = synthetic_stiffness_truth();
    SeededGaussian rng(seed);
    std::vector<StiffnessSample> out;
    for (int hz = 80; hz <= 195; hz += 5) {
        const double z = hz * 1e-3;
        const double k = truth.eval_raw(z);
        for (int dmm = 1; dmm <= 10; ++dmm) {
            const double d = dmm * 1e-3;
            const double f = std::max(0.0, k * d + rng.normal(0.0, 0.02));
            out.push_back({z, d, f});
        }
    }
    return out;
}

}  // namespace amsim
