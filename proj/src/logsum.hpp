// SPDX-License-Identifier: Apache-2.0
//
// Sum of positive terms given by their logarithms, accumulated in descending
// order with Neumaier compensation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace fso::detail {

class LogSum {
  public:
    void add(double log_term) {
        if (log_term > -std::numeric_limits<double>::infinity()) logs_.push_back(log_term);
    }

    /// Sum scaled by exp(-shift); returns the value and sets `shift`.
    [[nodiscard]] double scaled(double& shift) {
        if (logs_.empty()) {
            shift = 0.0;
            return 0.0;
        }
        std::sort(logs_.begin(), logs_.end(), std::greater<>());
        shift = logs_.front();
        double sum = 0.0;
        double comp = 0.0;
        for (double l : logs_) {
            const double v = std::exp(l - shift);
            const double t = sum + v;
            comp += std::abs(sum) >= v ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        return sum + comp;
    }

    [[nodiscard]] double value() {
        double shift = 0.0;
        const double s = scaled(shift);
        return s == 0.0 ? 0.0 : std::exp(std::log(s) + shift);
    }

  private:
    std::vector<double> logs_;
};

inline double log_factorial(int n) {
    int sign = 1;
    return ::lgamma_r(n + 1.0, &sign);
}

inline double log_binomial(int n, int k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace fso::detail
