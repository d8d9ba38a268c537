#include <catch2/catch_amalgamated.hpp>

#include <dcat/analysis.hpp>
#include <dcat/waveform.hpp>

#include <cmath>
#include <vector>

using namespace dcat;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = 3.141592653589793;

std::vector<double> sine_samples(int n, int periods, double amplitude) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        s[static_cast<std::size_t>(j)] =
            amplitude * std::sin(2.0 * kPi * periods * j / static_cast<double>(n));
    return s;
}

std::vector<double> square_samples(int n) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = (2 * j < n) ? 1.0 : -1.0;
    return s;
}

Waveform load_waveform(const std::vector<double>& time, const std::vector<double>& i_load) {
    Waveform wf;
    wf.names = {"time", "i_load"};
    wf.columns = {time, i_load};
    return wf;
}

}  // namespace

// ============================================================================
// Harmonic distortion
// ============================================================================

TEST_CASE("A pure sine has no distortion", "[analysis][thd]") {
    const int n = 2000;
    const double f0 = 50.0;
    const double dt = 1.0 / (f0 * n);  // exactly one period
    REQUIRE_THAT(thd(sine_samples(n, 1, 5.0), dt, f0), WithinAbs(0.0, 1e-9));
}

TEST_CASE("A square wave distorts by sqrt(pi^2/8 - 1)", "[analysis][thd]") {
    const int n = 4096;
    const double f0 = 50.0;
    const double dt = 1.0 / (f0 * n);
    const double ideal = std::sqrt(kPi * kPi / 8.0 - 1.0);  // 0.48343...
    REQUIRE_THAT(thd(square_samples(n), dt, f0), WithinRel(ideal, 0.005));
}

TEST_CASE("A staircase approximation beats the square wave", "[analysis][thd]") {
    const int n = 4096;
    const double f0 = 50.0;
    const double dt = 1.0 / (f0 * n);
    std::vector<double> stairs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = std::sin(2.0 * kPi * j / static_cast<double>(n));
        stairs[static_cast<std::size_t>(j)] = std::round(4.0 * v) / 4.0;  // nine levels
    }
    const double staircase_thd = thd(stairs, dt, f0);
    const double square_thd = thd(square_samples(n), dt, f0);
    REQUIRE(staircase_thd > 0.0);
    REQUIRE(staircase_thd < square_thd);
}

TEST_CASE("Distortion is scale invariant", "[analysis][thd]") {
    const int n = 4096;
    const double dt = 1.0 / (50.0 * n);
    std::vector<double> a = square_samples(n);
    std::vector<double> b = a;
    for (double& v : b) v *= 7.3;
    REQUIRE_THAT(thd(b, dt, 50.0), WithinRel(thd(a, dt, 50.0), 1e-12));
}

TEST_CASE("Distortion analysis uses whole periods only", "[analysis][thd]") {
    // two and a half periods: the evaluation truncates to two
    const int n = 1000;
    const double f0 = 50.0;
    const double dt = 2.5 / (f0 * n);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        s[static_cast<std::size_t>(j)] = std::sin(2.0 * kPi * f0 * j * dt);
    REQUIRE_THAT(thd(s, dt, f0), WithinAbs(0.0, 1e-9));
}

TEST_CASE("Distortion analysis rejects unusable inputs", "[analysis][thd]") {
    const std::vector<double> s = sine_samples(2000, 1, 1.0);
    REQUIRE_THROWS_AS(thd(s, 1e-5, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(thd(s, 0.0, 50.0), std::invalid_argument);
    REQUIRE_THROWS_AS(thd(s, 1e-5, 60000.0), std::invalid_argument);  // beyond Nyquist
    const std::vector<double> half(s.begin(), s.begin() + 999);       // under one period
    REQUIRE_THROWS_AS(thd(half, 1e-5, 50.0), std::invalid_argument);
}

TEST_CASE("A silent record has zero distortion", "[analysis][thd]") {
    const std::vector<double> zeros(2000, 0.0);
    REQUIRE(thd(zeros, 1e-5, 50.0) == 0.0);

    // energy at the second harmonic only: the ratio degenerates instead of
    // masquerading as a clean signal
    const std::vector<double> second = sine_samples(2000, 2, 1.0);
    REQUIRE(thd(second, 1.0 / (50.0 * 2000), 50.0) > 1e3);
}

// ============================================================================
// Reference tracking
// ============================================================================

TEST_CASE("Perfect tracking measures zero", "[analysis][tracking]") {
    const std::vector<double> v(1000, 100.0);
    REQUIRE(tracking_error(v, v, 1e-5, 1e3) == 0.0);
}

TEST_CASE("PWM ripple averages out over one PWM period", "[analysis][tracking]") {
    // 100 samples per PWM period, 50% pattern between 200 and 300
    const std::size_t n = 1000;
    std::vector<double> v_out(n);
    for (std::size_t j = 0; j < n; ++j) v_out[j] = (j % 100 < 50) ? 300.0 : 200.0;
    const std::vector<double> v_ref(n, 250.0);
    REQUIRE_THAT(tracking_error(v_out, v_ref, 1e-5, 1e3), WithinAbs(0.0, 1e-12));
}

TEST_CASE("A saturated converter reports the full shortfall", "[analysis][tracking]") {
    const std::vector<double> v_out(1000, 400.0);
    const std::vector<double> v_ref(1000, 450.0);
    REQUIRE_THAT(tracking_error(v_out, v_ref, 1e-5, 1e3), WithinAbs(50.0, 1e-9));
}

TEST_CASE("Tracking analysis rejects unusable inputs", "[analysis][tracking]") {
    const std::vector<double> a(1000, 1.0);
    const std::vector<double> b(999, 1.0);
    REQUIRE_THROWS_AS(tracking_error(a, b, 1e-5, 1e3), std::invalid_argument);

    const std::vector<double> tiny(150, 1.0);  // fewer than two PWM periods
    REQUIRE_THROWS_WITH(tracking_error(tiny, tiny, 1e-5, 1e3),
                        ContainsSubstring("two PWM periods"));
}

// ============================================================================
// Conduction loss
// ============================================================================

TEST_CASE("Constant load current integrates to i^2 R t", "[analysis][conduction]") {
    ConverterConfig cfg;  // r_on_tap = r_on_pwm = 10 mOhm
    std::vector<double> time(101), i_load(101, 10.0);
    for (int j = 0; j <= 100; ++j) time[static_cast<std::size_t>(j)] = j / 100.0;
    const Waveform wf = load_waveform(time, i_load);
    REQUIRE_THAT(conduction_loss(wf, cfg), WithinRel(2.0, 1e-12));
}

TEST_CASE("Winding channels add their own conduction loss", "[analysis][conduction]") {
    ConverterConfig cfg;  // r_winding 40 mOhm + 2 x 10 mOhm bridge = 60 mOhm
    Waveform wf;
    std::vector<double> time(101);
    for (int j = 0; j <= 100; ++j) time[static_cast<std::size_t>(j)] = j / 100.0;
    wf.names = {"time", "i_load", "i_wind0", "i_wind2"};
    wf.columns = {time, std::vector<double>(101, 0.0), std::vector<double>(101, 2.0),
                  std::vector<double>(101, -1.0)};
    // 4 A^2 * 60 mOhm + 1 A^2 * 60 mOhm over one second
    REQUIRE_THAT(conduction_loss(wf, cfg), WithinRel(0.24 + 0.06, 1e-12));
}

TEST_CASE("Loss is additive across a split record", "[analysis][conduction]") {
    ConverterConfig cfg;
    std::vector<double> time, i_load;
    for (int j = 0; j <= 200; ++j) {
        time.push_back(j * 1e-3);
        i_load.push_back(3.0 + std::sin(0.1 * j));
    }
    const Waveform full = load_waveform(time, i_load);
    const Waveform first = load_waveform({time.begin(), time.begin() + 101},
                                         {i_load.begin(), i_load.begin() + 101});
    const Waveform second = load_waveform({time.begin() + 100, time.end()},
                                          {i_load.begin() + 100, i_load.end()});
    REQUIRE_THAT(conduction_loss(full, cfg),
                 WithinRel(conduction_loss(first, cfg) + conduction_loss(second, cfg), 1e-12));
}

TEST_CASE("The load path always counts one tap and one PWM device",
          "[analysis][conduction]") {
    std::vector<double> time(11), i_load(11, 5.0);
    for (int j = 0; j <= 10; ++j) time[static_cast<std::size_t>(j)] = j / 10.0;
    const Waveform wf = load_waveform(time, i_load);
    ConverterConfig two;
    two.module_count = 2;
    ConverterConfig eight;
    eight.module_count = 8;
    REQUIRE(conduction_loss(wf, two) == conduction_loss(wf, eight));
    REQUIRE(conduction_loss(wf, two) > 0.0);
}

TEST_CASE("Degenerate records carry no loss", "[analysis][conduction]") {
    ConverterConfig cfg;
    const Waveform wf = load_waveform({0.0}, {10.0});
    REQUIRE(conduction_loss(wf, cfg) == 0.0);
}

// ============================================================================
// Waveform container
// ============================================================================

TEST_CASE("Waveform channels are found by name", "[analysis][waveform]") {
    Waveform wf;
    wf.names = {"time", "v_out"};
    wf.columns = {{0.0, 1e-6, 2e-6}, {1.0, 2.0, 3.0}};
    REQUIRE(wf.rows() == 3);
    REQUIRE(wf.has_channel("v_out"));
    REQUIRE_FALSE(wf.has_channel("v_cap9"));
    REQUIRE(wf.channel("v_out")[1] == 2.0);
    REQUIRE_THROWS_AS(wf.channel("nope"), std::invalid_argument);
    REQUIRE_THAT(wf.sample_dt(), WithinRel(1e-6, 1e-12));
}
