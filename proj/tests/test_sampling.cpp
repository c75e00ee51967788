#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "milnor/sampling.hpp"

using namespace milnor;

TEST_CASE("rng streams are deterministic per seed") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    bool differs = false;
    Rng a2(42);
    for (int i = 0; i < 10; ++i) differs |= (a2.uniform() != c.uniform());
    CHECK(differs);
}

TEST_CASE("sphere starts lie on the sphere") {
    for (int dim : {2, 3, 4, 5}) {
        auto pts = sphere_starts(dim, 2.5, 64, 7);
        REQUIRE(pts.size() == 64);
        for (const auto& p : pts) CHECK(p.norm() == doctest::Approx(2.5).epsilon(1e-12));
        auto again = sphere_starts(dim, 2.5, 64, 7);
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i] == again[i]);
    }
}

TEST_CASE("ball starts stay inside and cover radii") {
    auto pts = ball_starts(3, 1.0, 512, 3);
    double max_r = 0.0, min_r = 1.0;
    for (const auto& p : pts) {
        double r = p.norm();
        CHECK(r <= 1.0 + 1e-12);
        max_r = std::max(max_r, r);
        min_r = std::min(min_r, r);
    }
    CHECK(max_r > 0.9);
    CHECK(min_r < 0.4);
}

TEST_CASE("sample_ball magnitude zero gives the origin") {
    Rng rng(5);
    CHECK(sample_ball(rng, 4, 0.0).norm() == 0.0);
}
