#pragma once

#include <string>
#include <vector>

#include "dsi/errors.hpp"

namespace dsi {

struct SampledPath {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // same length
    std::string meta;            // optional domain tag, e.g. "pc" or "dsi"

    std::vector<std::string> violations() const;
    void validate() const;
};

// L_{H,alpha} Y(t) = t^H Y(log_alpha t), applied gridwise: output times alpha^{t_k},
// values alpha^{t_k H} Y(t_k).
SampledPath lamperti_forward(const SampledPath& path, double hurst, double alpha);

// L^{-1}_{H,alpha} X(t) = alpha^{-tH} X(alpha^t): output times log_alpha(t_k),
// values t_k^{-H} X(t_k). Throws NonPositiveTimeError if any input time <= 0.
SampledPath lamperti_inverse(const SampledPath& path, double hurst, double alpha);

}  // namespace dsi
