// rng.hpp — deterministic random streams for simulation and shot noise.
//
// Raw mt19937_64 draws are sequence-guaranteed by the standard, but the
// <random> distributions are not; every transform here is written out by hand
// so that traces stay bit-identical across standard libraries and compilers.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace qae {

// Finalizer of the splitmix64 generator; a strong bijective mixer on 64 bits.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based seed fan-out: per-purpose tags and per-run indices map to
// independent streams without drawing from any shared generator, so adding
// runs later never reshuffles the seeds of earlier ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(tag)) + index);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform double in [0, 1): top 53 bits of a raw draw
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // standard normal via Box–Muller; the pair's second value is cached
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite
        double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Bernoulli counting; trial counts here are ~1e4, so the loop is cheap
    // and the result depends only on the guaranteed mt19937_64 sequence.
    long binomial(long trials, double p) {
        if (trials < 0 || p < 0.0 || p > 1.0)
            throw std::invalid_argument("binomial: bad trials or probability");
        long count = 0;
        for (long i = 0; i < trials; ++i)
            if (uniform() < p) ++count;
        return count;
    }

    // Knuth's exp-product method, split into chunks so the running product
    // never underflows for large means (counts can reach ~1e4).
    long poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
        long total = 0;
        while (mean > 500.0) {
            total += poisson_chunk(500.0);
            mean -= 500.0;
        }
        return total + poisson_chunk(mean);
    }

private:
    long poisson_chunk(double mean) {
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = 1.0;
        do {
            ++k;
            prod *= uniform();
        } while (prod > limit);
        return k - 1;
    }

    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qae
