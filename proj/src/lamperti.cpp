#include "dsi/lamperti.hpp"

#include <cmath>

namespace dsi {

std::vector<std::string> SampledPath::violations() const {
    std::vector<std::string> v;
    if (times.size() != values.size()) v.push_back("times and values must have equal length");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            v.push_back("times must be strictly increasing");
            break;
        }
    }
    return v;
}

void SampledPath::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

SampledPath lamperti_forward(const SampledPath& path, double hurst, double alpha) {
    if (!(alpha > 1.0)) throw ConfigError({"alpha must be > 1"});
    path.validate();
    SampledPath out;
    out.meta = "dsi";
    out.times.reserve(path.times.size());
    out.values.reserve(path.times.size());
    const double la = std::log(alpha);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k];
        out.times.push_back(std::exp(t * la));
        out.values.push_back(std::exp(t * hurst * la) * path.values[k]);
    }
    return out;
}

SampledPath lamperti_inverse(const SampledPath& path, double hurst, double alpha) {
    if (!(alpha > 1.0)) throw ConfigError({"alpha must be > 1"});
    path.validate();
    SampledPath out;
    out.meta = "pc";
    out.times.reserve(path.times.size());
    out.values.reserve(path.times.size());
    const double la = std::log(alpha);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k];
        if (!(t > 0.0)) throw NonPositiveTimeError("input times must be positive");
        out.times.push_back(std::log(t) / la);
        out.values.push_back(std::pow(t, -hurst) * path.values[k]);
    }
    return out;
}

}  // namespace dsi
