#include "dcat/waveform.hpp"

#include <stdexcept>

namespace dcat {

int Waveform::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return static_cast<int>(i);
    return -1;
}

const std::vector<double>& Waveform::channel(const std::string& name) const {
    const int idx = index_of(name);
    if (idx < 0)
        throw std::invalid_argument("waveform has no channel named '" + name + "'");
    return columns[static_cast<std::size_t>(idx)];
}

double Waveform::sample_dt() const {
    const auto& t = channel("time");
    if (t.size() < 2)
        throw std::invalid_argument("waveform needs at least two samples to define a grid");
    return t[1] - t[0];
}

} // namespace dcat
