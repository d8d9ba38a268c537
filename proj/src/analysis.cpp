#include "dcat/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dcat {

double thd(const std::vector<double>& samples, double sample_dt, double f0) {
    if (!(f0 > 0.0))
        throw std::invalid_argument("thd: fundamental frequency must be > 0");
    if (!(sample_dt > 0.0))
        throw std::invalid_argument("thd: sample spacing must be > 0");
    const double nyquist = 0.5 / sample_dt;
    if (f0 > nyquist)
        throw std::invalid_argument("thd: fundamental frequency exceeds the Nyquist frequency");

    const auto n = static_cast<long long>(samples.size());
    auto whole_periods =
        static_cast<long long>(std::floor(static_cast<double>(n) * sample_dt * f0 + 1e-9));
    long long n_use = 0;
    while (whole_periods >= 1) {
        n_use = std::llround(static_cast<double>(whole_periods) / (f0 * sample_dt));
        if (n_use <= n)
            break;
        --whole_periods;
    }
    if (whole_periods < 1 || n_use < 2)
        throw std::invalid_argument("thd: signal must cover at least one full fundamental period");

    const auto harmonics = static_cast<long long>(std::floor(nyquist / f0 + 1e-9));
    double fundamental = 0.0;
    double harmonic_power = 0.0;
    for (long long h = 1; h <= harmonics; ++h) {
        const double theta = -2.0 * std::numbers::pi * static_cast<double>(h) * f0 * sample_dt;
        const double wr = std::cos(theta);
        const double wi = std::sin(theta);
        double cr = 1.0;
        double ci = 0.0;
        double ar = 0.0;
        double ai = 0.0;
        for (long long j = 0; j < n_use; ++j) {
            const double v = samples[static_cast<std::size_t>(j)];
            ar += v * cr;
            ai += v * ci;
            const double nr = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = nr;
        }
        const double amp = 2.0 * std::hypot(ar, ai) / static_cast<double>(n_use);
        if (h == 1)
            fundamental = amp;
        else
            harmonic_power += amp * amp;
    }

    const double residue = std::sqrt(harmonic_power);
    if (fundamental <= 0.0)
        return residue == 0.0 ? 0.0 : throw std::invalid_argument("thd: signal has no fundamental component");
    return residue / fundamental;
}

double tracking_error(const std::vector<double>& v_out, const std::vector<double>& v_ref,
                      double sample_dt, double f_pwm) {
    if (v_out.size() != v_ref.size())
        throw std::invalid_argument("tracking_error: signals must share one grid");
    if (!(sample_dt > 0.0) || !(f_pwm > 0.0))
        throw std::invalid_argument("tracking_error: sample spacing and f_pwm must be > 0");

    const auto n = static_cast<long long>(v_out.size());
    const long long window = std::max<long long>(1, std::llround(1.0 / (f_pwm * sample_dt)));
    if (n < 2 * window + 1)
        throw std::invalid_argument("tracking_error: signals must cover at least two PWM periods");

    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long long j = 0; j < n; ++j)
        prefix[static_cast<std::size_t>(j) + 1] =
            prefix[static_cast<std::size_t>(j)] + v_out[static_cast<std::size_t>(j)];

    double acc = 0.0;
    long long count = 0;
    for (long long j = window; j + window <= n; ++j) {
        const double avg = (prefix[static_cast<std::size_t>(j + window)] -
                            prefix[static_cast<std::size_t>(j)]) /
                           static_cast<double>(window);
        const double err = avg - v_ref[static_cast<std::size_t>(j + window / 2)];
        acc += err * err;
        ++count;
    }
    return std::sqrt(acc / static_cast<double>(count));
}

double conduction_loss(const Waveform& waveform, const ConverterConfig& config) {
    const auto& t = waveform.channel("time");
    const auto& i_load = waveform.channel("i_load");
    std::vector<const std::vector<double>*> windings;
    for (std::size_t c = 0; c < waveform.names.size(); ++c)
        if (waveform.names[c].rfind("i_wind", 0) == 0)
            windings.push_back(&waveform.columns[c]);

    const double r_path = config.r_on_tap + config.r_on_pwm;
    const double r_wind = config.r_winding + 2.0 * config.r_on_bridge;

    const auto power_at = [&](std::size_t j) {
        double p = i_load[j] * i_load[j] * r_path;
        for (const auto* w : windings)
            p += (*w)[j] * (*w)[j] * r_wind;
        return p;
    };

    double loss = 0.0;
    if (t.size() < 2)
        return 0.0;
    double prev = power_at(0);
    for (std::size_t j = 1; j < t.size(); ++j) {
        const double cur = power_at(j);
        loss += 0.5 * (prev + cur) * (t[j] - t[j - 1]);
        prev = cur;
    }
    return loss;
}

} // namespace dcat
