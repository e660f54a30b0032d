// Fixed-step hourly series. The step is one hour, so kW readings double as
// kWh per step throughout the formulation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nemdv {

struct TimeSeries {
    int start_hour = 0;          // offset into the scenario calendar
    std::vector<double> values;

    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> v, int start = 0)
        : start_hour(start), values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double operator[](std::size_t t) const { return values[t]; }
    double& operator[](std::size_t t) { return values[t]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_value() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : values) m = std::max(m, v);
        return m;
    }

    TimeSeries slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > values.size())
            throw std::out_of_range("TimeSeries::slice out of range");
        TimeSeries s;
        s.start_hour = start_hour + static_cast<int>(begin);
        s.values.assign(values.begin() + begin, values.begin() + end);
        return s;
    }

    static TimeSeries constant(double v, std::size_t n, int start = 0) {
        return TimeSeries(std::vector<double>(n, v), start);
    }
};

} // namespace nemdv
