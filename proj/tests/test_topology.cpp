#include <catch2/catch_amalgamated.hpp>

#include <dcat/topology.hpp>

#include <set>
#include <vector>

using namespace dcat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using Catch::Matchers::ContainsSubstring;

namespace {

ConverterConfig make_default_config() {
    ConverterConfig cfg;  // four modules, 400 V, defaults everywhere else
    return cfg;
}

}  // namespace

// ============================================================================
// Configuration validation
// ============================================================================

TEST_CASE("Default configuration validates", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    REQUIRE_NOTHROW(cfg.validate());
    REQUIRE(cfg.module_count == 4);
    REQUIRE(cfg.v_dc == 400.0);
    REQUIRE(cfg.active_module_count() == 4);
}

TEST_CASE("Zero source resistance is rejected with an explanation", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    cfg.r_batt = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    REQUIRE_THROWS_WITH(cfg.validate(), ContainsSubstring("r_batt"));
}

TEST_CASE("Switching frequency ordering is enforced", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    cfg.f_tap = 20e3;
    cfg.f_pwm = 10e3;  // f_tap > f_pwm violates the cascade
    REQUIRE_THROWS_WITH(cfg.validate(), ContainsSubstring("f_tap <= f_pwm <= f_bridge"));

    cfg = make_default_config();
    cfg.f_pwm = 200e3;  // f_pwm > f_bridge
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("Degenerate module counts are rejected", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    cfg.module_count = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

    cfg = make_default_config();
    cfg.bypassed_modules = {0, 1, 2, 3};  // nothing left
    REQUIRE_THROWS_WITH(cfg.validate(), ContainsSubstring("at least one module"));

    cfg = make_default_config();
    cfg.bypassed_modules = {4};  // out of range for module_count = 4
    REQUIRE_THROWS_WITH(cfg.validate(), ContainsSubstring("invalid index"));
}

TEST_CASE("Component values must be physical", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    cfg.l_leak = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

    cfg = make_default_config();
    cfg.r_winding = -1e-3;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

    cfg = make_default_config();
    cfg.c_module = -40e-6;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);

    // A zero source voltage is allowed: the network equations stay well posed.
    cfg = make_default_config();
    cfg.v_dc = 0.0;
    REQUIRE_NOTHROW(cfg.validate());
}

TEST_CASE("Active module listing skips bypassed modules in order", "[topology][config]") {
    ConverterConfig cfg = make_default_config();
    cfg.bypassed_modules = {2};
    cfg.validate();
    REQUIRE(cfg.active_module_count() == 3);
    REQUIRE(cfg.active_modules() == std::vector<int>{0, 1, 3});
}

// ============================================================================
// Nominal tap ladder
// ============================================================================

TEST_CASE("Four-module ladder spans the source in equal steps", "[topology][ladder]") {
    ConverterConfig cfg = make_default_config();
    std::vector<double> ladder = nominal_tap_ladder(cfg);
    REQUIRE(ladder.size() == 5);
    std::vector<double> expected = {0.0, 100.0, 200.0, 300.0, 400.0};
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        REQUIRE_THAT(ladder[i], WithinAbs(expected[i], 1e-12));
    }
}

TEST_CASE("Single-module ladder has only the rails", "[topology][ladder]") {
    ConverterConfig cfg = make_default_config();
    cfg.module_count = 1;
    std::vector<double> ladder = nominal_tap_ladder(cfg);
    REQUIRE(ladder.size() == 2);
    REQUIRE_THAT(ladder.front(), WithinAbs(0.0, 0.0));
    REQUIRE_THAT(ladder.back(), WithinAbs(400.0, 1e-12));
}

TEST_CASE("Bypassing a module redistributes the ladder", "[topology][ladder][fault]") {
    ConverterConfig cfg = make_default_config();
    cfg.bypassed_modules = {2};
    std::vector<double> ladder = nominal_tap_ladder(cfg);
    REQUIRE(ladder.size() == 4);
    REQUIRE_THAT(ladder[0], WithinAbs(0.0, 0.0));
    REQUIRE_THAT(ladder[1], WithinRel(400.0 / 3.0, 1e-12));
    REQUIRE_THAT(ladder[2], WithinRel(800.0 / 3.0, 1e-12));
    REQUIRE_THAT(ladder[3], WithinAbs(400.0, 1e-12));
}

TEST_CASE("Ladder spacing is uniform for any module count", "[topology][ladder][property]") {
    for (int m = 1; m <= 12; ++m) {
        ConverterConfig cfg = make_default_config();
        cfg.module_count = m;
        std::vector<double> ladder = nominal_tap_ladder(cfg);
        REQUIRE(static_cast<int>(ladder.size()) == m + 1);
        REQUIRE(ladder.front() == 0.0);
        REQUIRE_THAT(ladder.back(), WithinRel(cfg.v_dc, 1e-12));
        const double step = cfg.v_dc / m;
        for (std::size_t k = 1; k < ladder.size(); ++k) {
            REQUIRE(ladder[k] > ladder[k - 1]);
            REQUIRE_THAT(ladder[k] - ladder[k - 1], WithinRel(step, 1e-9));
        }
    }
}

TEST_CASE("Bypassed ladder matches a fresh converter with one fewer module",
          "[topology][ladder][fault]") {
    ConverterConfig faulted = make_default_config();
    faulted.bypassed_modules = {1};

    ConverterConfig fresh = make_default_config();
    fresh.module_count = 3;

    std::vector<double> a = nominal_tap_ladder(faulted);
    std::vector<double> b = nominal_tap_ladder(fresh);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE_THAT(a[i], WithinAbs(b[i], 1e-12));
    }
}

// ============================================================================
// Fault bypass bookkeeping
// ============================================================================

TEST_CASE("apply_fault_bypass records the module and keeps the rest", "[topology][fault]") {
    ConverterConfig cfg = make_default_config();
    ConverterConfig after = apply_fault_bypass(cfg, 1);
    REQUIRE(after.module_count == 4);
    REQUIRE(after.bypassed_modules == std::set<int>{1});
    REQUIRE(after.active_module_count() == 3);
    REQUIRE(after.active_modules() == std::vector<int>{0, 2, 3});

    ConverterConfig again = apply_fault_bypass(after, 3);
    REQUIRE(again.active_modules() == std::vector<int>{0, 2});
    REQUIRE(again.bypassed_modules == std::set<int>{1, 3});
}

TEST_CASE("apply_fault_bypass rejects bad requests", "[topology][fault]") {
    ConverterConfig cfg = make_default_config();
    REQUIRE_THROWS_WITH(apply_fault_bypass(cfg, 7), ContainsSubstring("unknown module"));
    REQUIRE_THROWS_WITH(apply_fault_bypass(cfg, -1), ContainsSubstring("unknown module"));

    ConverterConfig one_gone = apply_fault_bypass(cfg, 2);
    REQUIRE_THROWS_WITH(apply_fault_bypass(one_gone, 2), ContainsSubstring("already bypassed"));

    ConverterConfig tiny = make_default_config();
    tiny.module_count = 1;
    REQUIRE_THROWS_WITH(apply_fault_bypass(tiny, 0), ContainsSubstring("last active module"));
}

// ============================================================================
// Switch inventory
// ============================================================================

TEST_CASE("Switch inventory counts bridge, tap, and PWM devices", "[topology][inventory]") {
    ConverterConfig cfg = make_default_config();
    SwitchInventory inv = switch_inventory(cfg);
    REQUIRE(inv.bridge == 16);
    REQUIRE(inv.tap == 6);
    REQUIRE(inv.pwm == 2);

    cfg.module_count = 1;
    inv = switch_inventory(cfg);
    REQUIRE(inv.bridge == 4);
    REQUIRE(inv.tap == 0);
    REQUIRE(inv.pwm == 2);

    cfg.module_count = 8;
    inv = switch_inventory(cfg);
    REQUIRE(inv.bridge == 32);
    REQUIRE(inv.tap == 14);
    REQUIRE(inv.pwm == 2);
}

TEST_CASE("Bypassed modules drop their bridge switches from the inventory",
          "[topology][inventory][fault]") {
    ConverterConfig cfg = make_default_config();
    cfg.bypassed_modules = {0};
    SwitchInventory inv = switch_inventory(cfg);
    REQUIRE(inv.bridge == 12);
    // The tap rail hardware stays installed even when a module is bypassed.
    REQUIRE(inv.tap == 6);
    REQUIRE(inv.pwm == 2);
}
