// =============================================================================
// RNG tests
// =============================================================================
//
// The seeding mixer is a single splitmix64 step, so the published splitmix64
// reference outputs (seed 0) pin it down independently of our implementation.
// The generator stream itself is frozen against recorded values so that any
// platform or refactoring drift shows up as a hard failure -- every seeded
// result in the project depends on these bits.
//
// =============================================================================

#include "doctest.h"

#include "boomerang/rng.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

using namespace boomerang;

// =============================================================================
// Seed mixer
// =============================================================================

TEST_CASE("mix64 matches the splitmix64 reference outputs") {
    // First three outputs of splitmix64 seeded with 0.  The k-th output is
    // mix64 applied to k increments of the golden-ratio constant.
    const std::uint64_t golden = 0x9E3779B97F4A7C15ull;
    CHECK(mix64(0) == 0xE220A8397B1DCDAFull);
    CHECK(mix64(golden) == 0x6E789E6AA1B965F4ull);
    CHECK(mix64(golden * 2) == 0x06C45D188009454Full);
}

TEST_CASE("mix64 is sensitive to single-bit input changes") {
    // Not a statistical test, just a guard against a degenerate mixer.
    const std::uint64_t a = mix64(1);
    const std::uint64_t b = mix64(2);
    CHECK(a != b);
    CHECK(a != mix64(0));
}

// =============================================================================
// Stream regression anchors
// =============================================================================

TEST_CASE("Rng stream is frozen for a fixed seed") {
    // Recorded once from this implementation.  If these move, every seeded
    // experiment in the project silently changes -- fail loudly instead.
    Rng rng(42);
    CHECK(rng.next_u64() == 15021278609987233951ull);
    CHECK(rng.next_u64() == 5881210131331364753ull);
    CHECK(rng.next_u64() == 18149643915985481100ull);
}

TEST_CASE("Rng(0) seeds to the splitmix64 outputs, not to zero state") {
    // Seeding with 0 must not produce the all-zero xoshiro state (which would
    // emit zeros forever).  The state words are the first four splitmix64
    // outputs, so the first next_u64 is fully determined by published vectors:
    //   rotl(s0 + s3, 23) + s0
    const std::uint64_t s0 = 0xE220A8397B1DCDAFull;
    const std::uint64_t s3 = 0xF88BB8A8724C81ECull;
    const std::uint64_t sum = s0 + s3;
    const std::uint64_t expected = ((sum << 23) | (sum >> 41)) + s0;
    Rng rng(0);
    CHECK(rng.next_u64() == expected);
    CHECK(rng.next_u64() != 0);  // stream continues
}

TEST_CASE("same seed gives the same stream, different seeds diverge") {
    Rng a(12345);
    Rng b(12345);
    Rng c(12346);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

// =============================================================================
// Distribution contracts
// =============================================================================

TEST_CASE("next_double lies in [0,1) and has a sane mean") {
    Rng rng(2024);
    const int n = 100000;
    double sum = 0.0;
    bool in_range = true;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        in_range = in_range && (u >= 0.0) && (u < 1.0);
        sum += u;
    }
    CHECK(in_range);
    // Mean of n uniform draws has stddev ~ 1/sqrt(12 n) ~ 0.0009; a 0.01
    // window is > 10 sigma, so this never flaps for a fixed seed.
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("next_double regression anchors") {
    Rng rng(42);
    CHECK(rng.next_double() == doctest::Approx(0.81430514512290986).epsilon(1e-15));
    CHECK(rng.next_double() == doctest::Approx(0.31882104006166112).epsilon(1e-15));
}

TEST_CASE("next_in maps into the requested interval") {
    Rng rng(7);
    bool ok = true;
    for (int i = 0; i < 10000; ++i) {
        const double v = rng.next_in(-2.5, 4.0);
        ok = ok && (v >= -2.5) && (v < 4.0);
    }
    CHECK(ok);
}

TEST_CASE("next_below is unbiased-range and hits every residue") {
    Rng rng(99);
    const std::uint64_t n = 7;
    std::vector<int> counts(n, 0);
    for (int i = 0; i < 70000; ++i) {
        const std::uint64_t v = rng.next_below(n);
        REQUIRE(v < n);
        ++counts[static_cast<std::size_t>(v)];
    }
    // Each bucket expects 10000 +- ~300 (3 sigma); 1500 is a generous band
    // that still catches modulo bias or a stuck generator.
    for (std::uint64_t k = 0; k < n; ++k) {
        CHECK(counts[static_cast<std::size_t>(k)] > 10000 - 1500);
        CHECK(counts[static_cast<std::size_t>(k)] < 10000 + 1500);
    }
}

TEST_CASE("next_below(1) is always zero") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) CHECK(rng.next_below(1) == 0);
}

// =============================================================================
// Seed derivation
// =============================================================================

TEST_CASE("derive_seed is deterministic and frozen") {
    CHECK(derive_seed(7, 0) == 309689372594955804ull);
    CHECK(derive_seed(7, 1) == 16616101746815609346ull);
    CHECK(derive_seed(7, 0) == derive_seed(7, 0));
}

TEST_CASE("derive_seed separates trial indices and the graph stream") {
    // Trials must get pairwise-distinct sub-seeds, and none of them may
    // collide with the dedicated graph-perturbation stream.
    const std::uint64_t master = 0xDEADBEEFCAFEull;
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        seen.insert(derive_seed(master, i));
    }
    CHECK(seen.size() == 10000);
    CHECK(seen.count(derive_seed(master, kGraphStream)) == 0);
}

TEST_CASE("derive_seed depends on the master seed") {
    CHECK(derive_seed(1, 5) != derive_seed(2, 5));
}
