#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "ggm/bitset.hpp"
#include "ggm/errors.hpp"
#include "ggm/rng.hpp"

using ggm::Rng;
using ggm::VertexSet;

TEST_CASE("vertex set basics", "[bitset]") {
    VertexSet s(70);  // spans two words
    REQUIRE(s.none());
    REQUIRE(s.count() == 0);
    s.set(0);
    s.set(63);
    s.set(64);
    s.set(69);
    REQUIRE(s.count() == 4);
    REQUIRE(s.test(63));
    REQUIRE(s.test(64));
    REQUIRE_FALSE(s.test(1));
    s.reset(63);
    REQUIRE_FALSE(s.test(63));
    REQUIRE(s.count() == 3);
    REQUIRE(s.to_vector() == std::vector<int>{0, 64, 69});
    s.clear();
    REQUIRE(s.none());
}

TEST_CASE("vertex set algebra", "[bitset]") {
    VertexSet a(10), b(10);
    a.set(1);
    a.set(3);
    a.set(7);
    b.set(3);
    b.set(7);
    b.set(9);

    VertexSet u = a;
    u |= b;
    REQUIRE(u.to_vector() == std::vector<int>{1, 3, 7, 9});

    VertexSet i = a;
    i &= b;
    REQUIRE(i.to_vector() == std::vector<int>{3, 7});

    VertexSet d = a;
    d.subtract(b);
    REQUIRE(d.to_vector() == std::vector<int>{1});

    REQUIRE(i.is_subset_of(a));
    REQUIRE(i.is_subset_of(b));
    REQUIRE_FALSE(a.is_subset_of(b));
    REQUIRE(a.intersects(b));
    VertexSet e(10);
    REQUIRE_FALSE(a.intersects(e));
    REQUIRE(e.is_subset_of(a));
}

TEST_CASE("vertex set iteration", "[bitset]") {
    VertexSet s(130);
    const std::vector<int> members{0, 5, 63, 64, 65, 128, 129};
    for (int v : members) s.set(v);
    std::vector<int> seen;
    for (int v = s.first(); v >= 0; v = s.next(v)) seen.push_back(v);
    REQUIRE(seen == members);
    std::vector<int> seen2;
    s.for_each([&](int v) { seen2.push_back(v); });
    REQUIRE(seen2 == members);
    VertexSet empty(130);
    REQUIRE(empty.first() == -1);
}

TEST_CASE("vertex set comparisons and hashing", "[bitset]") {
    VertexSet a(65), b(65);
    a.set(2);
    b.set(2);
    REQUIRE(a == b);
    b.set(64);
    REQUIRE_FALSE(a == b);
    REQUIRE(ggm::hash_words(a.words(), 1) != ggm::hash_words(b.words(), 1));
    REQUIRE(ggm::hash_words(a.words(), 1) == ggm::hash_words(a.words(), 1));
}

TEST_CASE("rng determinism and substreams", "[rng]") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    // Substreams depend only on the seed, not on how far the parent advanced.
    Rng fresh(42);
    Rng sub_from_used = a.substream(5);
    Rng sub_from_fresh = fresh.substream(5);
    for (int i = 0; i < 20; ++i) REQUIRE(sub_from_used.next_u64() == sub_from_fresh.next_u64());

    Rng s0 = fresh.substream(0), s1 = fresh.substream(1);
    bool differ = false;
    for (int i = 0; i < 20; ++i) differ = differ || (s0.next_u64() != s1.next_u64());
    REQUIRE(differ);
}

TEST_CASE("uniform01 range and mean", "[rng]") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int bounds and balance", "[rng]") {
    Rng rng(11);
    std::vector<int> counts(6, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        const int v = rng.uniform_int(6);
        REQUIRE(v >= 0);
        REQUIRE(v < 6);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) REQUIRE(std::abs(c - n / 6) < 600);  // ~6 sigma
}

TEST_CASE("normal moments", "[rng]") {
    Rng rng(3);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
    }
    REQUIRE(std::abs(s1 / n) < 0.01);
    REQUIRE(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("gamma and chi-squared moments", "[rng]") {
    Rng rng(5);
    for (double shape : {0.4, 1.0, 2.3, 7.5}) {
        const int n = 100000;
        double s1 = 0.0;
        for (int i = 0; i < n; ++i) s1 += rng.gamma(shape);
        REQUIRE(std::abs(s1 / n - shape) < 0.05 * std::max(1.0, shape));
    }
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.chi_squared(4.0);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    REQUIRE(std::abs(mean - 4.0) < 0.05);
    REQUIRE(std::abs(s2 / n - mean * mean - 8.0) < 0.3);
}

TEST_CASE("weighted sampling follows the weights", "[rng]") {
    Rng rng(9);
    const std::vector<double> w{1.0, 2.0, 3.0};
    std::vector<int> counts(3, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.sample_weighted(w))];
    REQUIRE(std::abs(counts[0] / double(n) - 1.0 / 6.0) < 0.01);
    REQUIRE(std::abs(counts[1] / double(n) - 2.0 / 6.0) < 0.01);
    REQUIRE(std::abs(counts[2] / double(n) - 3.0 / 6.0) < 0.01);

    const std::vector<double> zero{0.0, 0.0};
    REQUIRE_THROWS_AS(rng.sample_weighted(zero), ggm::DomainError);
    const std::vector<double> empty;
    REQUIRE_THROWS_AS(rng.sample_weighted(empty), ggm::DomainError);

    // Zero-weight entries are never drawn.
    const std::vector<double> gap{1.0, 0.0, 1.0};
    for (int i = 0; i < 2000; ++i) REQUIRE(rng.sample_weighted(gap) != 1);
}
