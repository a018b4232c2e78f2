#pragma once

#include <netcoh/matrix.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace netcoh {

/// Probability vector over nodes, plus metadata from the iteration that produced it.
struct Distribution {
    std::vector<double> values;
    std::string label;
    /// Perron eigenvalue of the chain; 1 for stochastic chains.
    double eigenvalue = 1.0;
    std::size_t iterations = 0;
    double residual = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Probability matrix over ordered node pairs.
struct JointDistribution {
    Matrix values;
    std::string label;
};

/// Shannon entropy in bits, 0 log 0 = 0.
double entropyBits(const std::vector<double> &p);

} // namespace netcoh
