#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "milnor/fibre.hpp"
#include "milnor/morsify.hpp"

using namespace milnor;

namespace {
const std::vector<std::string> XY = {"x", "y"};
const std::vector<std::string> XYZ = {"x", "y", "z"};

std::vector<int> positive_fibre_indices(const Polynomial& f, std::uint64_t seed) {
    MorsifyConfig cfg;
    cfg.seed = seed;
    MorsifyResult r = morsify(f, 1.0, cfg);
    REQUIRE(r.report.passed());
    std::vector<int> idx;
    for (const auto& p : filter_fibre(r.points, r.epsilon, FibreSign::positive))
        idx.push_back(p.morse_index);
    std::sort(idx.begin(), idx.end());
    return idx;
}
}  // namespace

TEST_CASE("sample_parameters is deterministic and bounded") {
    auto p = sample_parameters(42, 0.1, 2);
    auto q = sample_parameters(42, 0.1, 2);
    CHECK(p.t == q.t);
    CHECK(p.t.norm() <= 0.1);
    CHECK(p.seed == 42);

    CHECK(sample_parameters(1, 0.0, 3).t.norm() == 0.0);

    auto r = sample_parameters(43, 0.1, 2);
    CHECK((p.t - r.t).norm() > 0.0);

    CHECK_THROWS_AS(sample_parameters(1, -0.5, 2), std::invalid_argument);
}

TEST_CASE("attempt magnitude halves on attempt doubling") {
    for (int k = 1; k <= 40; ++k)
        CHECK(attempt_magnitude(0.1, 2 * k) == doctest::Approx(0.5 * attempt_magnitude(0.1, k)));
    CHECK(attempt_magnitude(0.1, 1) == 0.1);
    CHECK(attempt_magnitude(0.1, 2) == doctest::Approx(0.05));
    CHECK(attempt_magnitude(0.1, 3) == doctest::Approx(0.05));
    CHECK(attempt_magnitude(0.1, 4) == doctest::Approx(0.025));
}

TEST_CASE("validate_morse passes on the cusp perturbation") {
    Polynomial f1 = parse_polynomial("x^3 - y^2 + 3*x", XY);
    auto pts = find_critical_points(f1, 1.0);
    MorseValidationReport rep = validate_morse(f1, pts, 0.01, 1.0);
    CHECK(rep.nondegenerate);
    CHECK(rep.distinct_values);
    CHECK(rep.values_in_band);  // no ambient critical points at all
    CHECK(rep.passed());
    CHECK(rep.min_value_gap == doctest::Approx(8.0));
    CHECK(rep.num_ambient_critical_points == 0);
}

TEST_CASE("validate_morse flags tied critical values") {
    Polynomial f = parse_polynomial("x^2 - y^2", XY);
    auto pts = find_critical_points(f, 1.0);
    REQUIRE(pts.size() == 4);
    MorseValidationReport rep = validate_morse(f, pts, 0.5, 1.0);
    CHECK_FALSE(rep.distinct_values);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("validate_morse on an empty list passes vacuously") {
    MorseValidationReport rep =
        validate_morse(parse_polynomial("x^3 - y^2 + 3*x", XY), {}, 0.1, 1.0);
    CHECK(rep.passed());
    CHECK(rep.num_points == 0);
}

TEST_CASE("morsify finds a passing perturbation for the cusp") {
    MorsifyConfig cfg;
    cfg.seed = 5;
    MorsifyResult r = morsify(parse_polynomial("x^3 - y^2", XY), 1.0, cfg);
    CHECK(r.report.passed());
    CHECK(r.attempts_used >= 1);
    // small t keeps all six critical points of the sphere restriction
    // (unlike the large hand perturbation); only one lies in the positive fibre
    CHECK(r.points.size() == 6);
    CHECK(r.epsilon > 0);
    CHECK(r.params.t.norm() <= 0.05 + 1e-12);
    auto fibre = filter_fibre(r.points, r.epsilon, FibreSign::positive);
    REQUIRE(fibre.size() == 1);
    CHECK(fibre[0].morse_index == 1);
    CHECK(fibre[0].value == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("morsify splits the two-line value tie") {
    MorsifyConfig cfg;
    cfg.seed = 1;
    MorsifyResult r = morsify(parse_polynomial("x^2 - y^2", XY), 1.0, cfg);
    CHECK(r.report.passed());
    REQUIRE(r.points.size() == 4);
    for (std::size_t i = 0; i + 1 < r.points.size(); ++i)
        CHECK(r.points[i + 1].value - r.points[i].value > 1e-9);
}

TEST_CASE("morsify precondition") {
    MorsifyConfig cfg;
    cfg.max_attempts = 0;
    CHECK_THROWS_AS(morsify(parse_polynomial("x^2 - y^2", XY), 1.0, cfg), std::invalid_argument);
}

TEST_CASE("exhaustion carries the last report") {
    // t = 0 only (magnitude 0) never splits the tie.
    MorsifyConfig cfg;
    cfg.magnitude = 1e-300;  // collapses to ~0 after halving, never splits
    cfg.max_attempts = 2;
    try {
        morsify(parse_polynomial("x^2 - y^2", XY), 1.0, cfg);
        FAIL("expected exhaustion");
    } catch (const MorsifyExhaustedError& e) {
        CHECK_FALSE(e.last_report.passed());
    }
}

TEST_CASE("fixed-t validation matches the sampled path") {
    Polynomial f = parse_polynomial("x^3 - y^2", XY);
    MorsifyResult r = morsify_with_fixed_t(f, 1.0, Eigen::Vector2d(-3, 0));
    CHECK(r.report.passed());
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[1].value == doctest::Approx(4.0));
    CHECK(r.epsilon == doctest::Approx(std::sqrt(1e-12 * 4.0)));
}

TEST_CASE("index multisets are stable across seeds") {
    struct Case {
        const char* text;
        std::vector<std::string> vars;
        std::vector<int> expected;
    };
    const Case cases[] = {
        {"x^3 - y^2", XY, {1}},
        {"x^2 - y^2", XY, {1, 1}},
        {"x^3 - 3*x*y^2", XY, {1, 1, 1}},
        {"x^2 + y^2 - z^2", XYZ, {1, 2}},
    };
    for (const auto& c : cases) {
        Polynomial f = parse_polynomial(c.text, c.vars);
        auto i1 = positive_fibre_indices(f, 101);
        auto i2 = positive_fibre_indices(f, 202);
        CHECK(i1 == i2);
        CHECK(i1 == c.expected);
    }
}
