// Behind-the-meter asset specifications: PV array, battery storage and
// shiftable flexible demand.
#pragma once

#include <optional>
#include <string>

namespace nemdv {

struct PvSpec {
    double rated_kw = 0.0;           // array power rating
    double inverter_efficiency = 1.0; // fraction in (0, 1]
};

// How the battery may interact with the grid.
enum class BesScheme {
    GridChargeNoBesExport, // may charge from the grid, battery exports prohibited
    PvChargeWithExport,    // may charge only from on-site PV, exports allowed
    GridChargeWithExport,  // may charge from the grid and export
};

inline const char* to_string(BesScheme s) {
    switch (s) {
        case BesScheme::GridChargeNoBesExport: return "grid_charge_no_export";
        case BesScheme::PvChargeWithExport: return "pv_charge_with_export";
        case BesScheme::GridChargeWithExport: return "grid_charge_with_export";
    }
    return "?";
}

inline std::optional<BesScheme> bes_scheme_from_string(const std::string& s) {
    if (s == "grid_charge_no_export") return BesScheme::GridChargeNoBesExport;
    if (s == "pv_charge_with_export") return BesScheme::PvChargeWithExport;
    if (s == "grid_charge_with_export") return BesScheme::GridChargeWithExport;
    return std::nullopt;
}

struct BesSpec {
    double power_kw = 0.0;             // charge and discharge power rating
    double duration_h = 0.0;           // energy capacity = power_kw * duration_h
    double soc_min_kwh = 0.0;
    double soc_init_kwh = 0.0;
    double round_trip_efficiency = 1.0; // applied on charging
    BesScheme scheme = BesScheme::GridChargeNoBesExport;

    double soc_max_kwh() const { return power_kw * duration_h; }

    // Power rating and duration with the default state-of-charge rule:
    // floor at zero, start half full.
    static BesSpec sized(double power_kw, double duration_h, double rte,
                         BesScheme scheme) {
        BesSpec b;
        b.power_kw = power_kw;
        b.duration_h = duration_h;
        b.round_trip_efficiency = rte;
        b.scheme = scheme;
        b.soc_min_kwh = 0.0;
        b.soc_init_kwh = 0.5 * b.soc_max_kwh();
        return b;
    }
};

struct FlexSpec {
    double fraction = 0.0; // share of base demand that can deviate each hour
    int recovery_hours = 1; // rolling-window length, positive
};

} // namespace nemdv
