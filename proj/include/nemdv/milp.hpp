// Solver-facing model: variables with box bounds and objective coefficients,
// sparse linear rows, and an index mapping (role, hour-or-period) pairs to
// variable ids.
#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nemdv {

enum class VarRole {
    NetDemand,       // d_net(t), kW
    PvBtm,           // PV power serving on-site demand
    PvExport,        // PV power exported
    BesCharge,       // battery charging power
    BesDischargeBtm, // battery discharge serving on-site demand
    BesDischargeExp, // battery discharge exported
    FlexUp,          // upward demand deviation
    FlexDown,        // downward demand deviation
    Soc,             // battery state of charge, kWh
    MaxDemand,       // per-period maximum net demand, kW
    ExportFlag,      // binary: 1 when net demand is held at zero to export
    BesMode,         // binary, strict mode only: 1 = charging hour
};

inline const char* to_string(VarRole r) {
    switch (r) {
        case VarRole::NetDemand: return "d_net";
        case VarRole::PvBtm: return "pv_btm";
        case VarRole::PvExport: return "pv_exp";
        case VarRole::BesCharge: return "bes_cha";
        case VarRole::BesDischargeBtm: return "bes_dis_btm";
        case VarRole::BesDischargeExp: return "bes_dis_exp";
        case VarRole::FlexUp: return "flex_up";
        case VarRole::FlexDown: return "flex_dn";
        case VarRole::Soc: return "soc";
        case VarRole::MaxDemand: return "d_max";
        case VarRole::ExportFlag: return "zeta";
        case VarRole::BesMode: return "bes_mode";
    }
    return "?";
}

struct Variable {
    double lower = 0.0;
    double upper = 0.0;
    double cost = 0.0;
    bool is_binary = false;
};

enum class Cmp { LE, EQ, GE };

inline const char* to_string(Cmp c) {
    switch (c) {
        case Cmp::LE: return "<=";
        case Cmp::EQ: return "=";
        case Cmp::GE: return ">=";
    }
    return "?";
}

struct LinearTerm {
    int var = -1;
    double coef = 0.0;
};

enum class RowKind {
    NetDemandDef,   // d_net(t) definition
    PvCap,          // PV split upper bound
    BesDischargeCap,
    SocBalance,     // state-of-charge recursion
    SocTerminal,    // final SOC no less than initial
    PvChargeOnly,   // charging limited to on-site PV
    MaxDemandLink,  // net demand bounded by the period maximum
    ExportCap,      // exports gated by the indicator
    NetZeroOnExport,// big-M link forcing zero net demand when exporting
    FlexBalance,    // horizon deviation balance
    FlexWindow,     // rolling-window no-net-decrease
    StrictCharge,   // strict mode: charge only in charging hours
    StrictDischarge,
};

inline const char* to_string(RowKind k) {
    switch (k) {
        case RowKind::NetDemandDef: return "net_def";
        case RowKind::PvCap: return "pv_cap";
        case RowKind::BesDischargeCap: return "bes_dis_cap";
        case RowKind::SocBalance: return "soc_balance";
        case RowKind::SocTerminal: return "soc_terminal";
        case RowKind::PvChargeOnly: return "pv_charge_only";
        case RowKind::MaxDemandLink: return "d_max_link";
        case RowKind::ExportCap: return "export_cap";
        case RowKind::NetZeroOnExport: return "net_zero_on_export";
        case RowKind::FlexBalance: return "flex_balance";
        case RowKind::FlexWindow: return "flex_window";
        case RowKind::StrictCharge: return "strict_charge";
        case RowKind::StrictDischarge: return "strict_discharge";
    }
    return "?";
}

struct RowId {
    RowKind kind;
    int t = -1; // hour, window start, or -1
    int n = -1; // demand period, or -1

    std::string str() const {
        std::string s = to_string(kind);
        if (t >= 0) s += "[t=" + std::to_string(t) + "]";
        if (n >= 0) s += "[n=" + std::to_string(n) + "]";
        return s;
    }
};

struct ConstraintRow {
    std::vector<LinearTerm> terms;
    Cmp cmp = Cmp::LE;
    double rhs = 0.0;
    RowId id;
};

// Maps (role, index) to variable ids. Per-hour roles are laid out
// hour-major so time-adjacent variables get adjacent ids.
struct VarIndex {
    int horizon = 0;
    int n_periods = 0;
    std::vector<int> s_hours;    // export-window hours, ascending
    bool strict_mode = false;

    static constexpr int kPerHourRoles = 9;

    int count() const {
        return kPerHourRoles * horizon + n_periods + static_cast<int>(s_hours.size()) +
               (strict_mode ? horizon : 0);
    }

    int at(VarRole role, int i) const {
        switch (role) {
            case VarRole::NetDemand: return kPerHourRoles * i + 0;
            case VarRole::PvBtm: return kPerHourRoles * i + 1;
            case VarRole::PvExport: return kPerHourRoles * i + 2;
            case VarRole::BesCharge: return kPerHourRoles * i + 3;
            case VarRole::BesDischargeBtm: return kPerHourRoles * i + 4;
            case VarRole::BesDischargeExp: return kPerHourRoles * i + 5;
            case VarRole::FlexUp: return kPerHourRoles * i + 6;
            case VarRole::FlexDown: return kPerHourRoles * i + 7;
            case VarRole::Soc: return kPerHourRoles * i + 8;
            case VarRole::MaxDemand: return kPerHourRoles * horizon + i;
            case VarRole::ExportFlag: {
                // i is a position into s_hours
                return kPerHourRoles * horizon + n_periods + i;
            }
            case VarRole::BesMode:
                return kPerHourRoles * horizon + n_periods +
                       static_cast<int>(s_hours.size()) + i;
        }
        throw std::logic_error("bad role");
    }

    // Human-readable variable name for dumps and audit reports.
    std::string name(int var) const {
        const int per_hour = kPerHourRoles * horizon;
        if (var < per_hour) {
            static const VarRole roles[kPerHourRoles] = {
                VarRole::NetDemand, VarRole::PvBtm, VarRole::PvExport, VarRole::BesCharge,
                VarRole::BesDischargeBtm, VarRole::BesDischargeExp, VarRole::FlexUp,
                VarRole::FlexDown, VarRole::Soc};
            return std::string(to_string(roles[var % kPerHourRoles])) + "[" +
                   std::to_string(var / kPerHourRoles) + "]";
        }
        int i = var - per_hour;
        if (i < n_periods) return "d_max[" + std::to_string(i) + "]";
        i -= n_periods;
        if (i < static_cast<int>(s_hours.size()))
            return "zeta[" + std::to_string(s_hours[i]) + "]";
        i -= static_cast<int>(s_hours.size());
        return "bes_mode[" + std::to_string(i) + "]";
    }
};

struct MilpModel {
    std::vector<Variable> vars;
    std::vector<ConstraintRow> rows;
    VarIndex index;
    std::vector<int> binary_ids; // ascending
    // Optional starting-basis hint: for row i, a structural column to make
    // basic there (-1 = the row's own logical). Builders that know the model
    // structure can hand the solver a (near-)feasible triangular basis.
    std::vector<int> basis_hint;

    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

namespace detail {
inline std::string fmt_coef(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}
} // namespace detail

// Plain-text listing, one constraint per line, for eyeballing a model or
// feeding an external solver by hand.
inline void dump_lp(const MilpModel& m, std::ostream& os) {
    os << "\\ " << m.num_vars() << " variables, " << m.num_rows() << " rows, "
       << m.binary_ids.size() << " binaries\n";
    os << "min:";
    for (int j = 0; j < m.num_vars(); ++j) {
        if (m.vars[j].cost == 0.0) continue;
        os << (m.vars[j].cost >= 0 ? " +" : " ") << detail::fmt_coef(m.vars[j].cost) << " "
           << m.index.name(j);
    }
    os << ";\n";
    for (const auto& row : m.rows) {
        os << row.id.str() << ":";
        for (const auto& term : row.terms)
            os << (term.coef >= 0 ? " +" : " ") << detail::fmt_coef(term.coef) << " "
               << m.index.name(term.var);
        os << " " << to_string(row.cmp) << " " << detail::fmt_coef(row.rhs) << ";\n";
    }
    for (int j = 0; j < m.num_vars(); ++j) {
        os << detail::fmt_coef(m.vars[j].lower) << " <= " << m.index.name(j)
           << " <= " << detail::fmt_coef(m.vars[j].upper) << ";\n";
    }
    if (!m.binary_ids.empty()) {
        os << "binary:";
        for (int j : m.binary_ids) os << " " << m.index.name(j);
        os << ";\n";
    }
}

} // namespace nemdv
