#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dcat {

/// Columnar sampled record on a uniform time grid. The first channel is
/// always "time"; all columns have equal length.
struct Waveform {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

    int index_of(const std::string& name) const;
    bool has_channel(const std::string& name) const { return index_of(name) >= 0; }

    /// Throws std::invalid_argument if the channel does not exist.
    const std::vector<double>& channel(const std::string& name) const;

    /// Sample spacing of the time channel; requires at least two rows.
    double sample_dt() const;
};

} // namespace dcat
