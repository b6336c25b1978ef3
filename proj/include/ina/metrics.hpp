#pragma once

namespace ina {

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_score(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

}  // namespace ina
