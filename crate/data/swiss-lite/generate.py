#!/usr/bin/env python3
"""Writes swiss-lite.json and its timeseries. Deterministic; stdlib only.

Run from anywhere: python3 data/swiss-lite/generate.py
"""

import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent
HOURS = 24
TD_DAYS = [21, 49, 93, 112, 181, 192, 206, 258, 259, 313, 318, 351]

# Carbon content of fuels, kt CO2 per GWh.
C = {"GAS": 0.2, "FUEL": 0.265, "WOOD": 0.39, "WET_BIOMASS": 0.36, "MANURE": 0.36,
     "SLUDGE": 0.36, "WASTE": 0.33, "METHANOL": 0.2457, "HVC": 0.26, "PLASTIC": 0.2722}


def sym(nv, dev=30.0):
    return {"nominal_sym": [nv, dev]}


def rng(lb, ub):
    return {"range": [lb, ub]}


# ---------------------------------------------------------------- calendar

def td_weights():
    weights = [0] * len(TD_DAYS)
    for day in range(1, 366):
        def dist(k):
            d = abs(day - TD_DAYS[k]) % 365
            return min(d, 365 - d)
        weights[min(range(len(TD_DAYS)), key=lambda k: (dist(k), k))] += 1
    return weights


WEIGHTS = td_weights()


def summer(day):
    """+1 in mid July, -1 in mid January."""
    return math.cos(2.0 * math.pi * (day - 196) / 365.0)


# Per-day weather: cloudiness for PV, windiness for wind.
CLOUD = [0.45, 0.70, 0.60, 0.85, 0.95, 0.80, 1.00, 0.90, 0.65, 0.50, 0.70, 0.40]
WINDY = [1.30, 1.10, 1.00, 0.85, 0.70, 0.75, 0.65, 0.80, 1.05, 1.20, 0.90, 1.40]


def scale_to(values, target_flh):
    flh = sum(WEIGHTS[k] * sum(values[k * HOURS:(k + 1) * HOURS]) for k in range(len(TD_DAYS)))
    out = [v * target_flh / flh for v in values]
    assert max(out) <= 1.0, (target_flh, max(out))
    return out


def solar(amplitude, seasonal, daylength_swing, clouds):
    values = []
    for k, day in enumerate(TD_DAYS):
        s = summer(day)
        length = 12.0 + daylength_swing * s
        rise = 12.5 - length / 2.0
        peak = (amplitude + seasonal * s) * clouds[k]
        for h in range(HOURS):
            t = h + 0.5
            x = (t - rise) / length
            values.append(peak * math.sin(math.pi * x) ** 1.5 if 0.0 < x < 1.0 else 0.0)
    return values


def wind():
    values = []
    for k, day in enumerate(TD_DAYS):
        base = (0.25 - 0.08 * summer(day)) * WINDY[k]
        for h in range(HOURS):
            values.append(base * (1.0 + 0.15 * math.cos(2.0 * math.pi * (h - 2) / 24.0)))
    return values


def river(mean_cf):
    values = []
    for day in TD_DAYS:
        melt = summer(day - 25)
        values += [mean_cf * (1.0 + 0.55 * melt)] * HOURS
    return values


def dam_inflow():
    values = []
    for day in TD_DAYS:
        values += [0.08 + max(0.0, summer(day - 20) + 0.35) ** 1.6] * HOURS
    return values


def elec_demand():
    values = []
    for k, day in enumerate(TD_DAYS):
        season = 1.0 - 0.12 * summer(day)
        for h in range(HOURS):
            t = h + 0.5
            shape = 0.75 + 0.25 * math.exp(-((t - 11.0) / 3.5) ** 2) + 0.2 * math.exp(-((t - 19.0) / 2.0) ** 2)
            values.append(season * shape)
    return values


def heat_low_t():
    # Space heating follows heating degrees; hot water is flat.
    values = []
    for day in TD_DAYS:
        temperature = 10.0 + 9.5 * summer(day)
        space = max(0.0, 16.0 - temperature) / 15.0
        daily = 0.86 * space + 0.14 * 0.5
        for h in range(HOURS):
            values.append(daily * (1.0 + 0.2 * math.cos(2.0 * math.pi * (h - 8) / 24.0)))
    return values


def cooling():
    values = []
    for day in TD_DAYS:
        hot = max(0.0, summer(day) - 0.3) + 0.02
        for h in range(HOURS):
            values.append(hot * (0.5 + math.exp(-((h + 0.5 - 15.0) / 4.0) ** 2)))
    return values


def write_series(name, values):
    d = HERE / "timeseries"
    d.mkdir(exist_ok=True)
    lines = ["td,hour,value"]
    for k in range(len(TD_DAYS)):
        for h in range(HOURS):
            lines.append(f"{k + 1},{h + 1},{values[k * HOURS + h]:.12g}")
    (d / f"{name}.csv").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- layers

LAYERS = [
    ("ELECTRICITY", "hourly", "GW"),
    ("HEAT_LOW_T_DEC", "daily", "GW"),
    ("HEAT_LOW_T_DHN", "daily", "GW"),
    ("HEAT_HIGH_T", "daily", "GW"),
    ("COOLING", "daily", "GW"),
    ("DAM_WATER", "daily", "GW"),
    ("MOB_PRIVATE", "annual", "Mpkm/h"),
    ("MOB_PUBLIC", "annual", "Mpkm/h"),
    ("MOB_FREIGHT", "annual", "Mtkm/h"),
    ("AVIATION", "annual", "GW"),
    ("GAS", "annual", "GW"),
    ("H2", "annual", "GW"),
    ("FUEL", "annual", "GW"),
    ("METHANOL", "annual", "GW"),
    ("HVC", "annual", "GW"),
    ("PLASTIC", "annual", "GW"),
    ("PLASTIC_WASTE", "annual", "GW"),
    ("WOOD", "annual", "GW"),
    ("WET_BIOMASS", "annual", "GW"),
    ("MANURE", "annual", "GW"),
    ("SLUDGE", "annual", "GW"),
    ("WASTE", "annual", "GW"),
    ("ANERGY_GROUND", "annual", "GW"),
    ("ANERGY_WATER", "annual", "GW"),
    ("CO2_ATM", "annual", "kt/h"),
    ("CO2_IND", "annual", "kt/h"),
    ("CO2_PURE", "annual", "kt/h"),
    ("CARBON_STORED", "annual", "kt/h"),
]

# ---------------------------------------------------------------- resources

BIOGENIC = {"uptake_layer": "CO2_ATM"}


def resource(rid, kind, layer, cost, availability=None, **extra):
    r = {"id": rid, "kind": kind, "layer": layer, "cost": cost}
    if availability is not None:
        r["availability"] = availability
    r.update(extra)
    return r


RESOURCES = [
    resource("ELEC_IMPORT", "import", "ELECTRICITY", rng(0.1, 0.2), sym(31.278, 20), limited_by_ntc=True),
    resource("H2_IMPORT", "import", "H2", rng(0.1342, 0.1876), rng(0.0, 11.111)),
    resource("NG_IMPORT", "import", "GAS", rng(0.0131, 0.0313), rng(0.0, 35.884), carbon_intensity=0.0,
             constant_over_year=True),
    resource("FUEL_IMPORT", "import", "FUEL", rng(0.0138, 0.0497), rng(0.0, 96.882)),
    resource("SFUEL_IMPORT", "import", "FUEL", rng(0.1442, 0.2549), rng(0.0, 17.777),
             carbon_intensity=C["FUEL"], **BIOGENIC),
    resource("METHANOL_IMPORT", "import", "METHANOL", sym(0.0722, 50)),
    resource("HVC_IMPORT", "import", "HVC", sym(0.1041, 50)),
    resource("PLASTIC_IMPORT", "import", "PLASTIC", sym(0.1278, 50)),
    resource("WOOD", "local", "WOOD", sym(0.0299, 20), rng(16.738, 17.549),
             carbon_intensity=C["WOOD"], **BIOGENIC),
    resource("WET_BIOMASS", "local", "WET_BIOMASS", sym(0.0133, 20), rng(3.034, 3.467),
             carbon_intensity=C["WET_BIOMASS"], **BIOGENIC),
    resource("MANURE", "local", "MANURE", sym(0.0041, 20), sym(7.318, 20),
             carbon_intensity=C["MANURE"], **BIOGENIC),
    resource("SLUDGE", "local", "SLUDGE", sym(0.0156, 20), rng(1.545, 1.836),
             carbon_intensity=C["SLUDGE"], **BIOGENIC),
    # Half of the waste carbon is biogenic; the nominal plastic demand is
    # already deducted from the waste potential.
    resource("WASTE", "local", "WASTE", 0.0, rng(19.069 - 5.86, 22.600 - 5.86),
             carbon_intensity=C["WASTE"] / 2.0, **BIOGENIC),
    resource("PLASTIC_WASTE", "local", "PLASTIC_WASTE", 0.0, recycled_from="PLASTIC"),
    resource("ANERGY_GROUND", "local", "ANERGY_GROUND", 0.0, sym(8.0, 20)),
    resource("ANERGY_WATER", "local", "ANERGY_WATER", 0.0, rng(3.0556, 21.111)),
    resource("DAM_INFLOW", "local", "DAM_WATER", 0.0, rng(0.55 * 34.8, 0.55 * 38.4),
             capacity_factor_series="dam_inflow"),
    resource("DAM_SPILL", "export_removal", "DAM_WATER", 0.0),
    resource("CURTAILMENT", "export_removal", "ELECTRICITY", 0.0),
    resource("CO2_REMOVAL", "export_removal", "CO2_PURE", rng(100.0, 200.0), sym(11.7, 50), units="co2"),
    resource("CHAR_REMOVAL", "export_removal", "CARBON_STORED", 0.0, rng(1.785, 2.045), units="co2"),
]

# ---------------------------------------------------------------- technologies

TECHNOLOGIES = []


def tech(tid, dispatch, main, modes, c_inv, c_maint, lifetime, **extra):
    """`modes` maps a mode name to flows per unit of some reference input;
    they are rescaled so the main output carries coefficient 1."""
    norm = []
    for name, flows in modes.items():
        k = flows[main]
        assert k > 0, (tid, name)
        norm.append({"name": name, "flows": {layer: round(v / k, 12) for layer, v in flows.items()}})
    t = {"id": tid, "dispatch": dispatch, "main_output": main, "modes": norm,
         "c_inv": c_inv if isinstance(c_inv, dict) else sym(c_inv),
         "lifetime": lifetime}
    if c_maint is not None:
        t["c_maint"] = c_maint if isinstance(c_maint, dict) else sym(c_maint)
    t.update(extra)
    TECHNOLOGIES.append(t)


def burner(out, fuel, eff, co2_to):
    flows = {out: eff, fuel: -1.0}
    if fuel in C:
        flows[co2_to] = C[fuel]
    return flows


# Electricity
tech("PV", "hourly", "ELECTRICITY", {"on": {"ELECTRICITY": 1.0}}, 870.0, 18.8, 25, c_p="pv", f_max=50.0)
tech("PV_ALPINE", "hourly", "ELECTRICITY", {"on": {"ELECTRICITY": 1.0}}, 2400.0, 35.0, 25,
     c_p="pv_alpine", f_max=6.0)
tech("WIND", "hourly", "ELECTRICITY", {"on": {"ELECTRICITY": 1.0}}, 1400.0, 28.0, 20, c_p="wind", f_max=4.0)
tech("HYDRO_RIVER", "hourly", "ELECTRICITY", {"on": {"ELECTRICITY": 1.0}}, 0.0, 60.0, 80,
     c_p="hydro_river", f_min=3.8, f_max=3.8)
tech("HYDRO_DAM", "hourly", "ELECTRICITY", {"on": {"ELECTRICITY": 1.0, "DAM_WATER": -1.0}}, 0.0, 20.0, 80,
     f_min=8.08, f_max=8.08)
tech("PP_CH4", "hourly", "ELECTRICITY", {
    "gas": burner("ELECTRICITY", "GAS", 0.6, "CO2_IND"),
    "h2": burner("ELECTRICITY", "H2", 0.6, "CO2_IND"),
    "fuel": burner("ELECTRICITY", "FUEL", 0.6, "CO2_IND"),
}, 750.0, 20.0, 25)
tech("CHP_WASTE", "daily", "ELECTRICITY", {
    "dhn": {"ELECTRICITY": 0.119, "HEAT_LOW_T_DHN": 0.663, "WASTE": -1.0, "CO2_IND": C["WASTE"]},
    "elec": {"ELECTRICITY": 0.19, "WASTE": -1.0, "CO2_IND": C["WASTE"]},
    "ht": {"ELECTRICITY": 0.069, "HEAT_HIGH_T": 0.716, "WASTE": -1.0, "CO2_IND": C["WASTE"]},
}, 5500.0, 220.0, 25)
tech("CHP_WOOD", "daily", "ELECTRICITY", {
    "dhn": {"ELECTRICITY": 0.164, "HEAT_LOW_T_DHN": 0.676, "WOOD": -1.0, "CO2_IND": C["WOOD"]},
    "elec": {"ELECTRICITY": 0.234, "WOOD": -1.0, "CO2_IND": C["WOOD"]},
    "ht": {"ELECTRICITY": 0.116, "HEAT_HIGH_T": 0.727, "WOOD": -1.0, "CO2_IND": C["WOOD"]},
}, 4000.0, 160.0, 25)

# Decentralised low-temperature heat
tech("DEC_HP", "daily", "HEAT_LOW_T_DEC", {"on": {"HEAT_LOW_T_DEC": 3.0, "ELECTRICITY": -1.0}}, 1100.0, 30.0, 20)
tech("DEC_GHP", "daily", "HEAT_LOW_T_DEC",
     {"on": {"HEAT_LOW_T_DEC": 4.0, "ELECTRICITY": -1.0, "ANERGY_GROUND": -3.0}}, 1700.0, 40.0, 25)
tech("DEC_DIRECT_ELEC", "daily", "HEAT_LOW_T_DEC", {"on": burner("HEAT_LOW_T_DEC", "ELECTRICITY", 1.0, "")},
     50.0, 1.0, 20)
tech("DEC_BOILER_GAS", "daily", "HEAT_LOW_T_DEC", {"on": burner("HEAT_LOW_T_DEC", "GAS", 0.9, "CO2_ATM")},
     170.0, 5.0, 20)
tech("DEC_BOILER_OIL", "daily", "HEAT_LOW_T_DEC", {"on": burner("HEAT_LOW_T_DEC", "FUEL", 0.85, "CO2_ATM")},
     170.0, 6.0, 20)
tech("DEC_BOILER_WOOD", "daily", "HEAT_LOW_T_DEC", {"on": burner("HEAT_LOW_T_DEC", "WOOD", 0.85, "CO2_ATM")},
     480.0, 18.0, 20)

# District heating
tech("DHN_HP", "daily", "HEAT_LOW_T_DHN",
     {"on": {"HEAT_LOW_T_DHN": 3.5, "ELECTRICITY": -1.0, "ANERGY_WATER": -2.5}}, 800.0, 20.0, 25)
tech("DHN_BOILER_GAS", "daily", "HEAT_LOW_T_DHN", {"on": burner("HEAT_LOW_T_DHN", "GAS", 0.92, "CO2_IND")},
     80.0, 1.5, 25)
tech("DHN_BOILER_WOOD", "daily", "HEAT_LOW_T_DHN", {"on": burner("HEAT_LOW_T_DHN", "WOOD", 0.9, "CO2_IND")},
     150.0, 4.0, 25)
tech("DHN_BIOGAS_MOTOR", "daily", "HEAT_LOW_T_DHN",
     {"on": {"HEAT_LOW_T_DHN": 0.18, "ELECTRICITY": 0.15, "MANURE": -1.0, "CO2_IND": C["MANURE"]}},
     1800.0, 90.0, 20)

# Industrial heat
tech("IND_BURNER_GAS", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "GAS", 0.95, "CO2_IND")}, 80.0, 2.0, 20)
tech("IND_BURNER_H2", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "H2", 0.95, "")}, 90.0, 2.0, 20)
tech("IND_BURNER_FUEL", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "FUEL", 0.9, "CO2_IND")},
     80.0, 2.0, 20)
tech("IND_BURNER_WOOD", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "WOOD", 0.85, "CO2_IND")},
     150.0, 5.0, 20)
tech("IND_BURNER_WASTE", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "WASTE", 0.8, "CO2_IND")},
     180.0, 6.0, 20)
tech("IND_DIRECT_ELEC", "daily", "HEAT_HIGH_T", {"on": burner("HEAT_HIGH_T", "ELECTRICITY", 0.98, "")},
     200.0, 4.0, 20)

# Cooling
tech("COOLING_HP", "daily", "COOLING", {"on": {"COOLING": 3.0, "ELECTRICITY": -1.0}}, 400.0, 12.0, 20)

# Mobility: costs per Mpkm/h (or Mtkm/h) of flat capacity.
tech("CAR_EV", "flat", "MOB_PRIVATE", {"on": {"MOB_PRIVATE": 1.0, "ELECTRICITY": -0.12}}, 9000.0, 250.0, 15)
tech("CAR_FC", "flat", "MOB_PRIVATE", {"on": {"MOB_PRIVATE": 1.0, "H2": -0.3}}, 10500.0, 280.0, 15)
tech("CAR_GAS", "flat", "MOB_PRIVATE", {"on": {"MOB_PRIVATE": 1.0, "GAS": -0.45, "CO2_ATM": 0.45 * C["GAS"]}},
     8000.0, 260.0, 15)
tech("CAR_FUEL", "flat", "MOB_PRIVATE",
     {"on": {"MOB_PRIVATE": 1.0, "FUEL": -0.42, "CO2_ATM": 0.42 * C["FUEL"]}}, 7800.0, 250.0, 15)
tech("TRAIN_PUB", "flat", "MOB_PUBLIC", {"on": {"MOB_PUBLIC": 1.0, "ELECTRICITY": -0.07}}, 9000.0, 300.0, 40,
     f_perc={"layer": "MOB_PUBLIC", "lo_pct": 0.0, "hi_pct": 60.0})
tech("BUS_EV", "flat", "MOB_PUBLIC", {"on": {"MOB_PUBLIC": 1.0, "ELECTRICITY": -0.1}}, 6000.0, 250.0, 15)
tech("BUS_FC", "flat", "MOB_PUBLIC", {"on": {"MOB_PUBLIC": 1.0, "H2": -0.22}}, 6500.0, 260.0, 15)
tech("BUS_FUEL", "flat", "MOB_PUBLIC", {"on": {"MOB_PUBLIC": 1.0, "FUEL": -0.25, "CO2_ATM": 0.25 * C["FUEL"]}},
     4500.0, 220.0, 15)
tech("TRAIN_FREIGHT", "flat", "MOB_FREIGHT", {"on": {"MOB_FREIGHT": 1.0, "ELECTRICITY": -0.07}}, 4000.0, 150.0, 40,
     f_perc={"layer": "MOB_FREIGHT", "lo_pct": 0.0, "hi_pct": 40.0})
tech("TRUCK_EV", "flat", "MOB_FREIGHT", {"on": {"MOB_FREIGHT": 1.0, "ELECTRICITY": -0.3}}, 5500.0, 200.0, 15)
tech("TRUCK_FC", "flat", "MOB_FREIGHT", {"on": {"MOB_FREIGHT": 1.0, "H2": -0.6}}, 5200.0, 200.0, 15)
tech("TRUCK_GAS", "flat", "MOB_FREIGHT", {"on": {"MOB_FREIGHT": 1.0, "GAS": -1.0, "CO2_ATM": 1.0 * C["GAS"]}},
     3600.0, 170.0, 15)
tech("TRUCK_FUEL", "flat", "MOB_FREIGHT", {"on": {"MOB_FREIGHT": 1.0, "FUEL": -0.9, "CO2_ATM": 0.9 * C["FUEL"]}},
     3400.0, 160.0, 15)
tech("AIRCRAFT", "flat", "AVIATION", {"on": {"AVIATION": 1.0, "FUEL": -1.0, "CO2_ATM": C["FUEL"]}}, 0.0, 0.0, 20)

# Fuel conversion
tech("ELECTROLYSIS", "hourly", "H2", {"on": {"H2": 1.0, "ELECTRICITY": -1.45}}, 1000.0, 30.0, 15)
tech("SMR", "flat", "H2", {"on": {"H2": 0.74, "GAS": -1.0, "CO2_IND": C["GAS"]}}, 700.0, 30.0, 25)
tech("SABATIER", "flat", "GAS",
     {"on": {"GAS": 1.0, "H2": -1.25, "CO2_PURE": -C["GAS"], "ELECTRICITY": -0.02}}, 1500.0, 50.0, 25)
tech("POWER_TO_LIQUID", "flat", "FUEL",
     {"on": {"FUEL": 1.0, "H2": -1.35, "CO2_PURE": -C["FUEL"], "ELECTRICITY": -0.1}}, 2000.0, 70.0, 25)
tech("SYN_METHANOLATION", "flat", "METHANOL",
     {"on": {"METHANOL": 1.0, "H2": -1.25, "CO2_PURE": -C["METHANOL"], "ELECTRICITY": -0.05}}, 1600.0, 50.0, 25)
tech("METHANE_TO_METHANOL", "flat", "METHANOL",
     {"on": {"METHANOL": 1.0, "GAS": -1.4, "CO2_IND": 1.4 * C["GAS"] - C["METHANOL"]}}, 1200.0, 40.0, 25)
tech("METHANOL_TO_HVC", "flat", "HVC",
     {"on": {"HVC": 1.0, "METHANOL": -1.9, "ELECTRICITY": -0.1, "CO2_IND": 1.9 * C["METHANOL"] - C["HVC"]}},
     2000.0, 60.0, 25)
tech("OIL_TO_HVC", "flat", "HVC",
     {"on": {"HVC": 1.0, "FUEL": -1.5, "ELECTRICITY": -0.05, "CO2_IND": 1.5 * C["FUEL"] - C["HVC"]}},
     1300.0, 40.0, 25)
tech("HVC_TO_PLASTIC", "flat", "PLASTIC",
     {"on": {"PLASTIC": 1.0, "HVC": -C["PLASTIC"] / C["HVC"], "ELECTRICITY": -0.1}}, 800.0, 30.0, 25)
tech("MECHANICAL_RECYCLING", "flat", "PLASTIC",
     {"on": {"PLASTIC": 1.0, "PLASTIC_WASTE": -1.25, "ELECTRICITY": -0.1, "CO2_IND": 0.25 * C["PLASTIC"]}},
     900.0, 30.0, 20)

# Biomass conversion
tech("BIOMASS_TO_LIQUID", "flat", "FUEL",
     {"on": {"FUEL": 0.45, "WOOD": -1.0, "ELECTRICITY": -0.05, "CO2_IND": C["WOOD"] - 0.45 * C["FUEL"]}},
     2600.0, 90.0, 20)
tech("HTL", "flat", "FUEL",
     {"on": {"FUEL": 0.5, "WET_BIOMASS": -1.0, "ELECTRICITY": -0.06,
             "CO2_IND": C["WET_BIOMASS"] - 0.5 * C["FUEL"]}}, 2200.0, 80.0, 20)
tech("GASIFICATION_SNG", "flat", "GAS",
     {"on": {"GAS": 0.65, "WOOD": -1.0, "ELECTRICITY": -0.03, "CO2_IND": C["WOOD"] - 0.65 * C["GAS"]}},
     2000.0, 70.0, 25)
tech("HTG", "flat", "GAS",
     {"on": {"GAS": 0.6, "WET_BIOMASS": -1.0, "ELECTRICITY": -0.04,
             "CO2_IND": C["WET_BIOMASS"] - 0.6 * C["GAS"]}}, 2400.0, 80.0, 25)
tech("BIOMETHANATION_MANURE", "flat", "GAS",
     {"on": {"GAS": 0.4, "MANURE": -1.0, "ELECTRICITY": -0.02, "CO2_IND": C["MANURE"] - 0.4 * C["GAS"]}},
     1500.0, 60.0, 20)
tech("BIOMETHANATION_WET", "flat", "GAS",
     {"on": {"GAS": 0.5, "WET_BIOMASS": -1.0, "ELECTRICITY": -0.02,
             "CO2_IND": C["WET_BIOMASS"] - 0.5 * C["GAS"]}}, 1700.0, 65.0, 20)
tech("BIOMETHANATION_SLUDGE", "flat", "GAS",
     {"on": {"GAS": 0.45, "SLUDGE": -1.0, "ELECTRICITY": -0.02, "CO2_IND": C["SLUDGE"] - 0.45 * C["GAS"]}},
     1600.0, 60.0, 20)
tech("H2_GASIFICATION", "flat", "H2",
     {"on": {"H2": 0.55, "WOOD": -1.0, "ELECTRICITY": -0.05, "CO2_IND": C["WOOD"]}}, 2200.0, 80.0, 25)
tech("BIOMASS_TO_METHANOL", "flat", "METHANOL",
     {"on": {"METHANOL": 0.55, "WOOD": -1.0, "ELECTRICITY": -0.05,
             "CO2_IND": C["WOOD"] - 0.55 * C["METHANOL"]}}, 2500.0, 85.0, 25)
tech("BIOMASS_TO_HVC", "flat", "HVC",
     {"on": {"HVC": 0.35, "WOOD": -1.0, "ELECTRICITY": -0.08, "CO2_IND": C["WOOD"] - 0.35 * C["HVC"]}},
     3000.0, 100.0, 25)
# Slow pyrolysis keeps half of the wood carbon as char; the rest leaves as
# bio-oil and process CO2.
tech("PYROLYSIS", "flat", "CARBON_STORED",
     {"on": {"CARBON_STORED": 0.5 * C["WOOD"], "WOOD": -1.0, "FUEL": 0.15, "HEAT_LOW_T_DHN": 0.2,
             "CO2_IND": 0.5 * C["WOOD"] - 0.15 * C["FUEL"]}}, 300.0, 12.0, 25)
tech("HTC", "flat", "CARBON_STORED",
     {"on": {"CARBON_STORED": 0.5 * C["WET_BIOMASS"], "WET_BIOMASS": -1.0, "ELECTRICITY": -0.08,
             "CO2_IND": 0.5 * C["WET_BIOMASS"]}}, 350.0, 14.0, 25)

# Carbon handling; costs per kt/h of CO2 throughput.
tech("IND_CC", "flat", "CO2_PURE",
     {"on": {"CO2_PURE": 0.9, "CO2_IND": -1.0, "CO2_ATM": 0.1, "ELECTRICITY": -0.25}}, 900.0, 30.0, 20)
tech("DAC", "flat", "CO2_PURE",
     {"on": {"CO2_PURE": 1.0, "CO2_ATM": -1.0, "ELECTRICITY": -1.1}}, 6000.0, 200.0, 20)
tech("VENT_IND", "flat", "CO2_ATM", {"on": {"CO2_ATM": 1.0, "CO2_IND": -1.0}}, 0.0, 0.0, 20)
tech("VENT_PURE", "flat", "CO2_ATM", {"on": {"CO2_ATM": 1.0, "CO2_PURE": -1.0}}, 0.0, 0.0, 20)

GROUPS = [
    ("Biofuel", ["BIOMASS_TO_LIQUID", "HTL"]),
    ("Biomethane", ["GASIFICATION_SNG", "HTG", "BIOMETHANATION_MANURE", "BIOMETHANATION_WET",
                    "BIOMETHANATION_SLUDGE"]),
    ("Hydrogen", ["H2_GASIFICATION"]),
    ("Low-T heat", ["DEC_BOILER_WOOD", "DHN_BOILER_WOOD"]),
    ("High-T heat", ["IND_BURNER_WOOD"]),
    ("CHP", ["CHP_WOOD", "DHN_BIOGAS_MOTOR"]),
    ("Chemicals", ["BIOMASS_TO_METHANOL", "BIOMASS_TO_HVC"]),
    ("Biochar", ["PYROLYSIS", "HTC"]),
]

# ---------------------------------------------------------------- storage and grids

STORAGES = [
    {"id": "BATTERY", "layer": "ELECTRICITY", "class": "daily", "c_inv": sym(156.66), "c_maint": sym(0.2422),
     "lifetime": 15, "t_charge": 4.0, "t_discharge": 4.0, "eta_in": 0.95, "eta_out": 0.95, "s_loss": 0.0002},
    {"id": "BATT_EV", "layer": "ELECTRICITY", "class": "daily", "c_inv": 0.0, "c_maint": 0.0,
     "lifetime": 15, "t_charge": 4.0, "t_discharge": 10.0, "eta_in": 0.95, "eta_out": 0.95, "s_loss": 0.0002,
     "s_avail": 0.2, "f_min": 150.0, "f_max": 150.0},
    {"id": "DAM_STORAGE", "layer": "DAM_WATER", "class": "seasonal", "c_inv": sym(0.464511),
     "lifetime": 60, "t_charge": 1.0, "t_discharge": 1.0, "eta_in": 1.0, "eta_out": 1.0, "s_loss": 0.0,
     "f_min": 6500.0, "f_max": 8500.0},
]

GRIDS = [
    {"id": "GRID_ELEC", "layer": "ELECTRICITY", "c_inv": sym(62.76), "c_maint": rng(0.02 * 62.76, 0.05 * 62.76),
     "lifetime": 80, "loss_pct": 0.07},
    {"id": "GRID_DHN", "layer": "HEAT_LOW_T_DHN", "c_inv": sym(882.0), "c_maint": rng(0.02 * 882.0, 0.05 * 882.0),
     "lifetime": 60, "loss_pct": 0.05},
]

# ---------------------------------------------------------------- demands

DEMANDS = [
    {"layer": "ELECTRICITY", "annual_total": rng(34.16, 40.92), "profile": "elec_demand"},
    {"layer": "HEAT_LOW_T_DHN", "annual_total": rng(50.07 + 8.70, 53.84 + 10.30), "profile": "heat_low_t",
     "split": {"share": "dhn_pct", "other_layer": "HEAT_LOW_T_DEC"}},
    {"layer": "HEAT_HIGH_T", "annual_total": rng(16.99, 20.46)},
    {"layer": "COOLING", "annual_total": rng(5.5, 8.6), "profile": "cooling"},
    {"layer": "MOB_PUBLIC", "annual_total": rng(124.75, 146.75),
     "split": {"share": "public_mobility_pct", "other_layer": "MOB_PRIVATE"}},
    {"layer": "MOB_FREIGHT", "annual_total": rng(31.63, 38.07)},
    {"layer": "AVIATION", "annual_total": sym(20.59, 20)},
    {"layer": "PLASTIC", "annual_total": sym(5.86, 20)},
    {"layer": "HVC", "annual_total": sym(1.80, 20)},
    {"layer": "METHANOL", "annual_total": sym(0.20, 20)},
]

IMPORT_CAPS = [
    {"id": "CHEMICALS", "resources": ["METHANOL_IMPORT", "HVC_IMPORT", "PLASTIC_IMPORT"],
     "demand_layers": ["METHANOL", "HVC", "PLASTIC"], "share_pct": rng(0.0, 100.0)},
]

GENERAL = {
    "i_rate": rng(1.73, 4.7),
    "recycling_pct": rng(0.0, 90.0),
    "public_mobility_pct": rng(22.3, 28.7),
    "dhn_pct": rng(10.0, 30.0),
    "ntc": {"nominal_pct": [12.9, 30.0, 100.0]},
    "co2_extra": sym(5.7, 20),
    "co2_compensation_cost": 1300.0,
    "net_zero": True,
}


def fixed(v):
    return not isinstance(v, dict) or "fixed" in v


def uncertain_order():
    paths = [f"general.{k}" for k, v in GENERAL.items() if k != "net_zero" and not fixed(v)]
    for r in RESOURCES:
        paths += [f"resources.{r['id']}.{f}" for f in ("cost", "availability") if f in r and not fixed(r[f])]
    for kind, items in (("technologies", TECHNOLOGIES), ("storages", STORAGES), ("grids", GRIDS)):
        for t in items:
            if not fixed(t["c_inv"]):
                paths.append(f"{kind}.{t['id']}.c_inv")
            # An absent maintenance cost defaults to a range around the investment cost.
            if ("c_maint" not in t and not fixed(t["c_inv"])) or ("c_maint" in t and not fixed(t["c_maint"])):
                paths.append(f"{kind}.{t['id']}.c_maint")
    paths += [f"demands.{d['layer']}.annual_total" for d in DEMANDS if not fixed(d["annual_total"])]
    paths += [f"import_caps.{c['id']}.share_pct" for c in IMPORT_CAPS if not fixed(c["share_pct"])]
    return paths


def main():
    model = {
        "name": "swiss-lite",
        "general": GENERAL,
        "layers": [{"id": i, "resolution": r, "unit": u} for i, r, u in LAYERS],
        "resources": RESOURCES,
        "technologies": TECHNOLOGIES,
        "storages": STORAGES,
        "grids": GRIDS,
        "demands": DEMANDS,
        "import_caps": IMPORT_CAPS,
        "time": {"n_typical_days": len(TD_DAYS), "hours_per_day": HOURS, "td_day_indices": TD_DAYS},
        "outputs": {
            "biomass_layers": ["WOOD", "WET_BIOMASS", "MANURE", "SLUDGE"],
            "groups": [{"name": n, "technologies": t} for n, t in GROUPS],
        },
        "atmosphere_layer": "CO2_ATM",
        "uncertain_order": uncertain_order(),
    }
    (HERE / "swiss-lite.json").write_text(json.dumps(model, indent=1) + "\n")
    write_series("pv", scale_to(solar(0.55, 0.2, 3.5, CLOUD), 1226.8))
    write_series("pv_alpine", scale_to(solar(0.7, 0.05, 3.0, [0.5 + c / 2 for c in CLOUD]), 1697.6))
    write_series("wind", scale_to(wind(), 2014.8))
    # Run-of-river output of 45 % of the mean hydro potential.
    write_series("hydro_river", scale_to(river(0.5), 0.45 * 36.6e3 / 3.8))
    write_series("dam_inflow", dam_inflow())
    write_series("elec_demand", elec_demand())
    write_series("heat_low_t", heat_low_t())
    write_series("cooling", cooling())


if __name__ == "__main__":
    main()
