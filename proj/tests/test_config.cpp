#include "config.hpp"
#include "units.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace uavsim;

TEST_CASE("empty text resolves to pure defaults with provenance") {
    auto config = cfg::parse_config("");
    CHECK(config.a == 10000.0);
    CHECK(config.k == 12);
    CHECK(config.g == 500.0);
    CHECK(config.q == 35.0);
    CHECK(config.w == -11.0);
    CHECK(config.s == 2.0);
    CHECK(config.e == 500);
    CHECK(config.seeds == 10);
    CHECK_FALSE(config.nr_th.has_value());

    const auto text = cfg::render_config(config);
    CHECK(text.find("scenario default") != std::string::npos);
    CHECK(text.find("engine default") != std::string::npos);
    CHECK(text.find("q = 35") != std::string::npos);
    CHECK(text.find("nr_th = auto") != std::string::npos);
}

TEST_CASE("file overrides are reflected and tagged") {
    auto config = cfg::parse_config("e = 500\nu = 4 # inline comment\n");
    CHECK(config.e == 500);
    CHECK(config.u == 4);
    CHECK(config.provenance.at("u") == cfg::Source::file);
    CHECK(config.provenance.at("g") == cfg::Source::scenario_default);
    const auto text = cfg::render_config(config);
    CHECK(text.find("u = 4") != std::string::npos);
    CHECK(text.find("# u: file") != std::string::npos);
}

TEST_CASE("rendered config is a fixed point of load + render") {
    auto config = cfg::parse_config("e = 123\nnr_th = 0.25\ngamma1 = 0.5\n");
    const auto once = cfg::render_config(config);
    auto reloaded = cfg::parse_config(once);
    CHECK(cfg::render_config(reloaded) == once);
}

TEST_CASE("unknown keys and bad values name the offender") {
    CHECK_THROWS_WITH_AS(cfg::parse_config("bogus = 1\n"),
                         doctest::Contains("bogus"), cfg::config_error);
    try {
        cfg::parse_config("q = abc\n");
        FAIL("expected config_error");
    } catch (const cfg::config_error& e) {
        CHECK(e.key() == "q");
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg::parse_config("e 500\n"), cfg::config_error);
}

TEST_CASE("validation names the violated key") {
    auto config = cfg::default_config();
    config.k = 0;
    try {
        cfg::validate(config);
        FAIL("expected config_error");
    } catch (const cfg::config_error& e) {
        CHECK(e.key() == "k");
    }
    config = cfg::default_config();
    config.alpha = 1.0;
    CHECK_THROWS_AS(cfg::validate(config), cfg::config_error);
    config = cfg::default_config();
    config.failures = "10:99"; // index beyond the fleet
    CHECK_THROWS_AS(cfg::validate(config), cfg::config_error);
}

TEST_CASE("environment overrides use the UAVSIM_ prefix") {
    ::setenv("UAVSIM_E", "42", 1);
    ::setenv("UAVSIM_NR_TH", "0.75", 1);
    auto config = cfg::default_config();
    cfg::apply_env_overrides(config);
    ::unsetenv("UAVSIM_E");
    ::unsetenv("UAVSIM_NR_TH");
    CHECK(config.e == 42);
    CHECK(config.nr_th == 0.75);
    CHECK(config.provenance.at("e") == cfg::Source::env);
}

TEST_CASE("failure schedule parsing") {
    auto config = cfg::parse_config("failures = 10:1; 5:0\n");
    auto parsed = config.parsed_failures();
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0] == std::pair{5.0, 0u}); // sorted by time
    CHECK(parsed[1] == std::pair{10.0, 1u});
    CHECK(cfg::parse_config("failures =\n").parsed_failures().empty());
    CHECK_THROWS_AS(cfg::parse_config("failures = nope\n").parsed_failures(),
                    cfg::config_error);
}

TEST_CASE("radio params convert decibel fields once") {
    auto config = cfg::default_config();
    auto params = cfg::radio_params(config);
    CHECK(params.tx_power_q == doctest::Approx(3162.2776601683795).epsilon(1e-12));
    CHECK(params.antenna_w == doctest::Approx(0.07943282347242814).epsilon(1e-12));
    CHECK(params.thermal_noise_v0 ==
          doctest::Approx(dbm_to_mw(-104.0)).epsilon(1e-12));
    CHECK(params.bandwidth_beta == 10e6);
    CHECK(params.num_bands_n == 5);
}
