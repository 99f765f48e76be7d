/**
 * @file common.hpp
 * @brief Shared scalar types, error conditions, and the seeded random source
 *        used across the workbench.
 *
 * Everything downstream works over std::complex<double> numerics with exact
 * boost::rational<long long> bookkeeping for weight-lattice data.  All
 * randomness flows through Rng so that every run is reproducible from a
 * single recorded seed.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace ew {

using Cplx = std::complex<double>;
using Rat  = boost::rational<long long>;

inline double to_d(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}
inline Cplx to_c(const Rat& r) { return Cplx(to_d(r), 0.0); }

/// Evaluation hit a kernel zero in a denominator (or a pole guard tripped).
struct SingularPoint : std::runtime_error {
    explicit SingularPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Randomized identity testing ran out of retry budget.
struct InconclusiveSampling : std::runtime_error {
    explicit InconclusiveSampling(const std::string& what) : std::runtime_error(what) {}
};

/// A fusion-matrix denominator s(nu) - s(nu') collapsed at the chosen point.
struct ResonantPoint : std::runtime_error {
    explicit ResonantPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric rank disagreed between nearby sample points.
struct RankUnstable : std::runtime_error {
    explicit RankUnstable(const std::string& what) : std::runtime_error(what) {}
};

/// A lowering monomial fell below the Verma truncation depth.
struct DepthExceeded : std::runtime_error {
    explicit DepthExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Weyl-dimension oracle asked about a non-dominant highest weight.
struct NotDominant : std::runtime_error {
    explicit NotDominant(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration rejected before any computation started.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic random source.  Distinct tasks split off child generators
/// by mixing a task tag into the parent seed, so concurrent checks stay
/// reproducible regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform real in [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    /// Complex number with real part in [-0.45, 0.45) and a moderate
    /// imaginary part, comfortably inside the region where the theta series
    /// converges fast for Im(tau) >= 0.3.
    Cplx generic_point() {
        return Cplx(uniform(-0.45, 0.45), uniform(-0.3, 0.3));
    }

    std::uint64_t integer() { return eng_(); }

    /// Child generator for an independent task.
    Rng split(std::uint64_t tag) const {
        std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
        s ^= s >> 30; s *= 0xbf58476d1ce4e5b9ULL;
        s ^= s >> 27; s *= 0x94d049bb133111ebULL;
        s ^= s >> 31;
        return Rng(s);
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
};

}  // namespace ew
