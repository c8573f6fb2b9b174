#include <doctest.h>

#include <stdexcept>

#include "qzmac/random.hpp"

using namespace qzmac;

TEST_CASE("same seed and label give the same stream") {
    auto a = derive_stream(7, "arrivals/0");
    auto b = derive_stream(7, "arrivals/0");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different labels or seeds give different streams") {
    auto differs = [](RandomStream x, RandomStream y) {
        int equal = 0;
        for (int i = 0; i < 64; ++i) equal += x.next_u64() == y.next_u64();
        return equal == 0;
    };
    CHECK(differs(derive_stream(7, "arrivals/0"), derive_stream(7, "arrivals/1")));
    CHECK(differs(derive_stream(7, "cca/0"), derive_stream(7, "contention/0")));
    CHECK(differs(derive_stream(7, "cca/0"), derive_stream(8, "cca/0")));
}

TEST_CASE("StreamFactory rejects duplicate labels") {
    StreamFactory f(1);
    f.derive("interference");
    f.derive("delivery");
    CHECK_THROWS_AS(f.derive("interference"), std::invalid_argument);
}

TEST_CASE("consuming one stream never perturbs another") {
    StreamFactory f1(99);
    auto arrivals1 = f1.derive("arrivals/0");
    auto noise1 = f1.derive("interference");

    StreamFactory f2(99);
    auto noise2 = f2.derive("interference");  // derived in a different order
    for (int i = 0; i < 500; ++i) noise2.uniform01();
    auto arrivals2 = f2.derive("arrivals/0");

    for (int i = 0; i < 100; ++i) noise1.uniform01();
    for (int i = 0; i < 1000; ++i) CHECK(arrivals1.next_u64() == arrivals2.next_u64());
}

TEST_CASE("uniform helpers stay in range") {
    auto rng = derive_stream(5, "u");
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const auto k = rng.uniform_int(3, 5);
        CHECK(k >= 3);
        CHECK(k <= 5);
    }
    CHECK(rng.uniform_int(4, 4) == 4);
    CHECK_THROWS_AS(rng.uniform_int(5, 4), std::invalid_argument);
}
