#pragma once

#include <cmath>
#include <cstdint>

#include "qplasm/errors.hpp"
#include "qplasm/units.hpp"

namespace qplasm::mc {

// Counter-based generator: each draw is a stateless hash of
// (seed, stream, counter). Substreams make parallel sampling
// reproducible independent of worker scheduling.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return mix(seed_, stream_, counter_++); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1), for logs.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        // Box-Muller; draws two uniforms per variate to keep the
        // counter advance independent of call history.
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    // Exact Bernoulli-sum binomial; n stays modest in every shipped
    // pipeline (<= nu * N ~ 1e6 draws total per experiment).
    long binomial(long n, double p) {
        if (p < 0.0 || p > 1.0) throw domain_error("binomial: p outside [0,1]");
        if (n < 0) throw domain_error("binomial: negative n");
        long k = 0;
        for (long i = 0; i < n; ++i)
            if (uniform() < p) ++k;
        return k;
    }

    // Exact Poisson via multiplicative method, chunked so the
    // running product never underflows for large means.
    long poisson(double mean) {
        if (mean < 0.0) throw domain_error("poisson: negative mean");
        long total = 0;
        while (mean > 30.0) {
            total += poisson_small(30.0);
            mean -= 30.0;
        }
        return total + poisson_small(mean);
    }

    std::uint64_t stream() const { return stream_; }

  private:
    long poisson_small(double mean) {
        const double limit = std::exp(-mean);
        double prod = 1.0;
        long k = -1;
        do {
            prod *= uniform_open();
            ++k;
        } while (prod > limit);
        return k;
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        // SplitMix64-style avalanche over the three words.
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z += b + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z += c + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 31)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 29)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 32);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace qplasm::mc
