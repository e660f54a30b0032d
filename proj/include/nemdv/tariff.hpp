// Materialized retail tariff: a per-hour energy price plus demand-charge
// periods, each a $/kW price on the masked maximum net demand.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nemdv/time_series.hpp"

namespace nemdv {

struct DemandChargePeriod {
    std::string name;
    double price = 0.0;             // $/kW on the period's maximum net demand
    std::vector<std::uint8_t> mask; // per-hour membership, same length as energy_price
};

struct Tariff {
    TimeSeries energy_price;                    // $/kWh, one value per hour
    std::vector<DemandChargePeriod> demand_periods;

    std::size_t horizon() const { return energy_price.size(); }

    Tariff slice(std::size_t begin, std::size_t end) const {
        Tariff t;
        t.energy_price = energy_price.slice(begin, end);
        for (const auto& p : demand_periods) {
            DemandChargePeriod q;
            q.name = p.name;
            q.price = p.price;
            q.mask.assign(p.mask.begin() + begin, p.mask.begin() + end);
            t.demand_periods.push_back(std::move(q));
        }
        return t;
    }
};

} // namespace nemdv
