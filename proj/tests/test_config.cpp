// Configuration text format: canonical serialization round trip, sectioned and
// unsectioned keys, overrides, and the validation rules.
#include <catch2/catch_amalgamated.hpp>

#include "genfun/config.hpp"

using namespace genfun;
using Catch::Approx;

TEST_CASE("canonical serialization round trips byte for byte") {
    Config c;
    c.model = "euler";
    c.N = 24;
    c.dt = 5e-4;
    c.seed = 42;
    c.initial = "taylor_green";
    c.amplitude = 0.75;
    c.augmented = true;

    const std::string text = serialize_config(c);
    const Config back = parse_config(text);
    REQUIRE(serialize_config(back) == text);
    REQUIRE(back.model == "euler");
    REQUIRE(back.N == 24);
    REQUIRE(back.dt == 5e-4);
    REQUIRE(back.seed == 42);
    REQUIRE(back.initial == "taylor_green");
    REQUIRE(back.amplitude == 0.75);
    REQUIRE(back.augmented);
}

TEST_CASE("parser details") {
    SECTION("comments and blank lines are skipped") {
        const Config c = parse_config(
            "# leading comment\n\n[experiment]\nN = 12\n\n# trailing\ndt = 0.002\n");
        REQUIRE(c.N == 12);
        REQUIRE(c.dt == Approx(0.002));
    }
    SECTION("keys work with or without their section") {
        const Config a = parse_config("N = 9\n");
        REQUIRE(a.N == 9);
        const Config b = parse_config("[model]\nnodes = 17\n");
        REQUIRE(b.nodes == 17);
    }
    SECTION("malformed input is rejected") {
        REQUIRE_THROWS_AS(parse_config("[experiment\nN = 2\n"), ConfigError);
        REQUIRE_THROWS_AS(parse_config("[mystery]\n"), ConfigError);
        REQUIRE_THROWS_AS(parse_config("just words\n"), ConfigError);
        REQUIRE_THROWS_AS(parse_config("N = not_a_number\n"), ConfigError);
        REQUIRE_THROWS_AS(parse_config("unknown_key = 3\n"), ConfigError);
    }
    SECTION("keys must match their section when both are given") {
        REQUIRE_THROWS_AS(parse_config("[initial]\nN = 2\n"), ConfigError);
    }
}

TEST_CASE("overrides") {
    Config c;
    apply_override(c, "N=20");
    REQUIRE(c.N == 20);
    apply_override(c, "experiment.dt=0.01");
    REQUIRE(c.dt == Approx(0.01));
    apply_override(c, "initial.kind=random");
    REQUIRE(c.initial == "random");
    apply_override(c, "model.weight_m=5.5");
    REQUIRE(c.weight_m == Approx(5.5));
    REQUIRE_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
    REQUIRE_THROWS_AS(apply_override(c, "bogus=1"), ConfigError);
}

TEST_CASE("validation") {
    SECTION("defaults are valid") {
        REQUIRE_NOTHROW(validate_config(Config{}));
    }
    SECTION("ranges") {
        Config c;
        c.dt = 0.0;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c = Config{};
        c.z_points = 1;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c = Config{};
        c.taylor_cap = 13;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c = Config{};
        c.rho = -0.5;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
    }
    SECTION("kinetic weight exponent") {
        Config c;
        c.model = "vdb";
        c.initial = "perturbed_maxwellian";
        c.weight_m = 2.0;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c.weight_m = -1.0;  // sentinel: pick the default for the dimension
        REQUIRE_NOTHROW(validate_config(c));
        c.weight_m = 4.0;
        REQUIRE_NOTHROW(validate_config(c));
    }
    SECTION("initial data must suit the model") {
        Config c;
        c.model = "euler";
        c.initial = "sine";
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c.initial = "taylor_green";
        REQUIRE_NOTHROW(validate_config(c));
        c.initial = "random";
        REQUIRE_NOTHROW(validate_config(c));
        c = Config{};
        c.model = "hydrostatic";
        c.initial = "random";
        c.decay = 0.2;
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c.decay = 0.5;
        REQUIRE_NOTHROW(validate_config(c));
    }
    SECTION("unknown names") {
        Config c;
        c.model = "navier";
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
        c = Config{};
        c.initial = "mystery";
        REQUIRE_THROWS_AS(validate_config(c), ConfigError);
    }
}
