#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "qae/linalg.hpp"
#include "qae/rng.hpp"
#include "oracles.hpp"

using qae::cplx;
using qae::CMat;
using qae::PureState;

namespace {

// reference transformation A from the shipped data file, used here as a
// handy concrete 3×3 with a structurally zero top-right entry
CMat reference_a() {
    CMat m(3, 3);
    m(0, 0) = cplx(-0.373, -0.037);
    m(0, 1) = cplx(-0.927, 0.015);
    m(0, 2) = cplx(0.0, 0.0);
    m(1, 0) = cplx(0.008, 0.213);
    m(1, 1) = cplx(-0.013, -0.085);
    m(1, 2) = cplx(-0.003, -0.973);
    m(2, 0) = cplx(-0.017, 0.902);
    m(2, 1) = cplx(-0.035, -0.363);
    m(2, 2) = cplx(-0.012, 0.230);
    return m;
}

}  // namespace

TEST_CASE("matrix product checks inner dimensions") {
    CMat a(2, 3), b(3, 2), bad(2, 2);
    CHECK_NOTHROW(a * b);
    CHECK_THROWS_AS(a * bad, std::invalid_argument);
}

TEST_CASE("unitarity defect is zero for the identity") {
    CHECK(qae::unitarity_defect(CMat::identity(4)) == 0.0);
}

TEST_CASE("unitarity defect flags a scaled identity") {
    CMat m = CMat::identity(3);
    for (std::size_t i = 0; i < 3; ++i) m(i, i) = 2.0;
    CHECK(qae::unitarity_defect(m) == Catch::Approx(3.0));
}

TEST_CASE("normalize rejects states with fewer than two modes") {
    CHECK_THROWS_AS(qae::normalize({cplx(1.0)}), std::invalid_argument);
}

TEST_CASE("normalize rejects the zero vector") {
    CHECK_THROWS_AS(qae::normalize({cplx(0.0), cplx(0.0), cplx(0.0)}),
                    std::invalid_argument);
}

TEST_CASE("normalize returns a unit vector") {
    const PureState s = qae::normalize({cplx(3.0, 1.0), cplx(0.0, -2.0)});
    CHECK(qae::norm(s) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("applying a unitary to a basis state picks out a column") {
    const CMat u = reference_a();
    const PureState third{{cplx(0.0), cplx(0.0), cplx(1.0)}};
    const PureState out = qae::apply_unitary(u, third);
    // multiply-by-one and add-zero are exact, so this is bitwise
    CHECK(out.amps[0] == u(0, 2));
    CHECK(out.amps[1] == u(1, 2));
    CHECK(out.amps[2] == u(2, 2));
}

TEST_CASE("apply_unitary checks dimensions") {
    const CMat u = CMat::identity(3);
    const PureState two{{cplx(1.0), cplx(0.0)}};
    CHECK_THROWS_AS(qae::apply_unitary(u, two), std::invalid_argument);
}

TEST_CASE("inner product conjugates its left argument") {
    const PureState a{{cplx(0.0, 1.0), cplx(0.0)}};
    const PureState b{{cplx(1.0), cplx(0.0)}};
    CHECK(qae::inner_product(a, b) == cplx(0.0, -1.0));
    CHECK(qae::inner_product(b, a) == cplx(0.0, 1.0));
}

TEST_CASE("inner product requires matching dimensions") {
    const PureState a{{cplx(1.0), cplx(0.0)}};
    const PureState b{{cplx(1.0), cplx(0.0), cplx(0.0)}};
    CHECK_THROWS_AS(qae::inner_product(a, b), std::invalid_argument);
}

TEST_CASE("two-mode embedding places the block and leaves the rest alone") {
    CMat block(2, 2);
    block(0, 0) = cplx(1.0, 2.0);
    block(0, 1) = cplx(3.0, 4.0);
    block(1, 0) = cplx(5.0, 6.0);
    block(1, 1) = cplx(7.0, 8.0);
    const CMat u = qae::embed_two_mode({1, 2, block}, 4);
    CHECK(u(0, 0) == cplx(1.0));
    CHECK(u(3, 3) == cplx(1.0));
    CHECK(u(1, 1) == block(0, 0));
    CHECK(u(1, 2) == block(0, 1));
    CHECK(u(2, 1) == block(1, 0));
    CHECK(u(2, 2) == block(1, 1));
    CHECK(u(0, 1) == cplx(0.0));
    CHECK(u(3, 1) == cplx(0.0));
}

TEST_CASE("embeddings on disjoint mode pairs commute exactly") {
    qae::Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        CMat b1(2, 2), b2(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                b1(i, j) = cplx(rng.gauss(), rng.gauss());
                b2(i, j) = cplx(rng.gauss(), rng.gauss());
            }
        const CMat u1 = qae::embed_two_mode({0, 1, b1}, 4);
        const CMat u2 = qae::embed_two_mode({2, 3, b2}, 4);
        // disjoint supports mean the products touch different entries, so
        // both orders must agree to the last bit, not merely to tolerance
        CHECK(oracle::bit_equal(u1 * u2, u2 * u1));
    }
}

TEST_CASE("embedding validates mode range and block shape") {
    const CMat block = CMat::identity(2);
    CHECK_THROWS_AS(qae::embed_two_mode({2, 3, block}, 3), std::out_of_range);
    CHECK_THROWS_AS(qae::embed_two_mode({0, 1, CMat::identity(3)}, 3),
                    std::invalid_argument);
}

TEST_CASE("haar isometry columns are orthonormal") {
    for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
        const CMat v = qae::haar_random_isometry(5, 3, seed);
        const CMat gram = qae::adjoint(v) * v;
        CHECK(oracle::max_entry_diff(gram, CMat::identity(3)) < 1e-13);
    }
}

TEST_CASE("haar isometry needs fewer columns than rows") {
    CHECK_THROWS_AS(qae::haar_random_isometry(3, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(qae::haar_random_isometry(2, 5, 1), std::invalid_argument);
}

TEST_CASE("haar isometry is deterministic in the seed") {
    CHECK(oracle::bit_equal(qae::haar_random_isometry(4, 2, 123),
                            qae::haar_random_isometry(4, 2, 123)));
    CHECK_FALSE(oracle::bit_equal(qae::haar_random_isometry(4, 2, 123),
                                  qae::haar_random_isometry(4, 2, 124)));
}

TEST_CASE("haar isometry entry statistics match the known distribution") {
    // |V[2,0]|² for a 3×2 isometry follows Beta(1,2): mean 1/3, variance
    // 1/18, so the mean over 10^4 seeds sits within 3·sqrt(1/18/1e4)
    double acc = 0.0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
        const CMat v = qae::haar_random_isometry(3, 2, 1000 + i);
        acc += std::norm(v(2, 0));
    }
    const double mean = acc / reps;
    CHECK(std::abs(mean - 1.0 / 3.0) < 0.00707);
}

TEST_CASE("uniform draws fill deciles evenly") {
    qae::Rng rng(2024);
    int counts[10] = {0};
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        counts[static_cast<int>(u * 10.0)]++;
    }
    // 3σ for a binomial(10^4, 1/10) cell is 90
    for (int c : counts) CHECK(std::abs(c - 1000) <= 90);
}

TEST_CASE("ranged uniform stays inside its interval") {
    qae::Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(90.0, 270.0);
        REQUIRE(x >= 90.0);
        REQUIRE(x < 270.0);
    }
}

TEST_CASE("gaussian draws have the right mean and variance") {
    qae::Rng rng(99);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gauss();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);       // 3σ ≈ 0.0095
    CHECK(std::abs(var - 1.0) < 0.02);  // 3σ ≈ 0.013
}

TEST_CASE("binomial draws are unbiased") {
    qae::Rng rng(7);
    const int reps = 1000, trials = 100;
    const double p = 0.3;
    double acc = 0.0;
    for (int i = 0; i < reps; ++i)
        acc += static_cast<double>(rng.binomial(trials, p)) / trials;
    // 3σ for the averaged estimate
    CHECK(std::abs(acc / reps - p) < 3.0 * std::sqrt(p * (1 - p) / (trials * reps)));
}

TEST_CASE("binomial validates its arguments") {
    qae::Rng rng(1);
    CHECK_THROWS_AS(rng.binomial(10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(rng.binomial(10, 1.1), std::invalid_argument);
}

TEST_CASE("poisson draws have the right mean, small and large") {
    qae::Rng rng(11);
    double acc = 0.0;
    for (int i = 0; i < 1000; ++i) acc += static_cast<double>(rng.poisson(7.5));
    CHECK(std::abs(acc / 1000 - 7.5) < 0.26);  // 3·sqrt(7.5/1000)

    // means past the chunking threshold still come out right
    acc = 0.0;
    for (int i = 0; i < 200; ++i) acc += static_cast<double>(rng.poisson(1200.0));
    CHECK(std::abs(acc / 200 - 1200.0) < 7.4);  // 3·sqrt(1200/200)
}

TEST_CASE("derived seeds separate by tag and index") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag : {1ull, 2ull, 3ull})
        for (std::uint64_t idx = 0; idx < 5; ++idx)
            seen.insert(qae::derive_seed(42, tag, idx));
    CHECK(seen.size() == 15);
    CHECK(qae::derive_seed(42, 1, 0) == qae::derive_seed(42, 1, 0));
    CHECK(qae::derive_seed(42, 1) == qae::derive_seed(42, 1, 0));
}

TEST_CASE("identical seeds give identical streams") {
    qae::Rng a(314), b(314);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}
