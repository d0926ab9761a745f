#!/usr/bin/env python3
"""Regenerate the bundled fixtures under data/.

mini_fire/         synthetic two-fire study area (road grid, population grid,
                   shelters, candidates, zones, perimeters, scenario configs)
published_totals/  zone populations and the eight open shelters matching the
                   published county totals

Output is fully determined by SEED; rerunning rewrites identical files.
"""

import csv
import json
import math
import random
from pathlib import Path

SEED = 20250107
ROOT = Path(__file__).resolve().parent.parent / "data"

LON0, LAT0 = -118.60, 34.02
KM_PER_DEG = 6371.0 * math.pi / 180.0


def to_lonlat(x_km, y_km):
    lon = LON0 + x_km / (KM_PER_DEG * math.cos(math.radians(LAT0)))
    lat = LAT0 + y_km / KM_PER_DEG
    return round(lon, 7), round(lat, 7)


def haversine_m(a, b):
    lon1, lat1, lon2, lat2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * 6371000.0 * math.asin(math.sqrt(h))


def ring(points_km):
    pts = [list(to_lonlat(x, y)) for x, y in points_km]
    return pts + [pts[0]]


def feature(layer, name, exterior, holes=()):
    return {
        "type": "Feature",
        "properties": {"layer": layer, "name": name},
        "geometry": {"type": "Polygon", "coordinates": [ring(exterior)] + [ring(h) for h in holes]},
    }


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- mini_fire

WEST_ORDER = [(6, 10), (13, 9.5), (14.5, 14), (12, 18.5), (7, 17.5)]
WEST_WARNING = [(3.5, 6.5), (17, 7), (17.5, 20.5), (4, 21)]
EAST_ORDER = [(26, 8), (32.5, 8.5), (33, 15), (26.5, 14.5)]
EAST_WARNING = [(23.5, 5), (36, 5.5), (35.5, 18), (24, 17.5)]
WEST_FIRE = [(8, 12.5), (11.5, 12), (12, 15.5), (8.5, 16)]
EAST_FIRE = [(28, 10), (30.8, 10.2), (30.5, 12.8), (28.2, 12.6)]


def inside(pt, poly):
    x, y = pt
    hit = False
    for i in range(len(poly)):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % len(poly)]
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
            hit = not hit
    return hit


def in_any_zone(pt):
    return inside(pt, WEST_WARNING) or inside(pt, EAST_WARNING)


def gen_roads(rng, out):
    cols, rows, step = 21, 13, 2.0
    nid = lambda c, r: 1000 + r * cols + c
    rows_out = []
    eid = 0

    def highway_for(horizontal, c, r):
        if horizontal and r == 6:
            return "motorway"
        if not horizontal and c in (5, 15):
            return "primary"
        if horizontal and r in (2, 10):
            return "secondary"
        if (c <= 2 and r <= 2) or (c >= 18 and r >= 10):
            return "service"
        return "residential"

    def speed_for(hw):
        if hw == "motorway":
            return "65 mph"
        if hw == "primary":
            return rng.choice(["72", "64", "45 mph", ""])
        if hw == "secondary":
            return rng.choice(["56", "48", "", ""])
        if hw == "service":
            return ""
        return rng.choice(["40", "40", "32", "", "25 mph"])

    def add(c1, r1, c2, r2, horizontal):
        nonlocal eid
        a = (c1 * step, r1 * step)
        b = (c2 * step, r2 * step)
        mid = ((a[0] + b[0]) / 2 + rng.uniform(-0.15, 0.15), (a[1] + b[1]) / 2 + rng.uniform(-0.15, 0.15))
        pts = [to_lonlat(*a), to_lonlat(*mid), to_lonlat(*b)]
        length = haversine_m(pts[0], pts[1]) + haversine_m(pts[1], pts[2])
        hw = highway_for(horizontal, c1, r1)
        oneway = ""
        if hw == "residential":
            roll = rng.random()
            oneway = "yes" if roll < 0.04 else ("-1" if roll < 0.06 else "")
        wkt = "LINESTRING (" + ", ".join(f"{lon} {lat}" for lon, lat in pts) + ")"
        eid += 1
        rows_out.append([f"e{eid:04d}", nid(c1, r1), nid(c2, r2), f"{length:.2f}", hw, speed_for(hw), oneway, wkt])

    for r in range(rows):
        for c in range(cols - 1):
            add(c, r, c + 1, r, True)
    for c in range(cols):
        for r in range(rows - 1):
            add(c, r, c, r + 1, False)
    write_csv(out / "roads.csv", ["edge_id", "u", "v", "length_m", "highway", "maxspeed_kph", "oneway", "wkt_geometry"],
              rows_out)
    return len(rows_out)


def gen_grid(rng, out):
    rows = []
    for j in range(12):
        for i in range(20):
            x, y = 1.0 + 2.0 * i, 1.0 + 2.0 * j
            lon, lat = to_lonlat(x, y)
            if inside((x, y), WEST_ORDER) or inside((x, y), EAST_ORDER):
                pop = rng.randint(150, 420)
            elif in_any_zone((x, y)):
                pop = rng.randint(60, 260)
            else:
                pop = rng.choice([0, rng.randint(10, 180)])
            rows.append([f"c{j:02d}{i:02d}", lon, lat, pop])
    write_csv(out / "grid.csv", ["cell_id", "lon", "lat", "population"], rows)
    return len(rows)


OPEN_SHELTERS = [
    # id, name, x, y, capacity, floor area, unit, occupied
    ("s01", "Ritchie Valens Recreation Center", 1.5, 2.5, 356, "", "", 0),
    ("s02", "Van Nuys/Sherman Oaks Recreation Center", 19.5, 22.5, 100, 15000, "sqft", 0),
    ("s03", "Calvary Community Church", 2.5, 23.0, "", 10573.27, "sqm", 0),
    ("s04", "Pan Pacific Recreation Center", 20.5, 1.5, 598, "", "", 40),
    ("s05", "Westwood Recreation Center", 20.0, 12.5, 855, "", "", 0),
    ("s06", "Stoner Recreation Center", 38.5, 2.0, 350, "", "", 0),
    ("s07", "Pasadena Civic Auditorium", 38.0, 22.5, "", 130000, "sqft", 0),
    ("s08", "Pomona Fairplex", 39.5, 12.0, "", 150686, "sqft", 0),
]


def gen_shelters(rng, out):
    rows = []
    for sid, name, x, y, cap, area, unit, occ in OPEN_SHELTERS:
        lon, lat = to_lonlat(x, y)
        rows.append([sid, name, lon, lat, cap, area, unit, "open", occ])
    write_csv(out / "shelters.csv", ["id", "name", "lon", "lat", "capacity", "floor_area", "area_unit", "status",
                                     "occupied"], rows)

    cands = []
    n = 0
    while len(cands) < 30:
        x, y = rng.uniform(0.5, 39.5), rng.uniform(0.5, 23.5)
        if in_any_zone((x, y)):
            continue
        n += 1
        lon, lat = to_lonlat(x, y)
        kind = n % 5
        if kind == 3:
            cap, area, unit = "", rng.randint(40, 220) * 1000, "sqft"
        elif kind == 4 and n % 2 == 0:
            cap, area, unit = "", round(rng.uniform(3000, 15000), 2), "sqm"
        else:
            cap, area, unit = rng.randint(6, 36) * 50, "", ""
        cands.append([f"k{n:02d}", f"Candidate site {n:02d}", lon, lat, cap, area, unit, "candidate", 0])
    write_csv(out / "candidates.csv", ["id", "name", "lon", "lat", "capacity", "floor_area", "area_unit", "status",
                                       "occupied"], cands)


def gen_layers(out):
    zones = {
        "type": "FeatureCollection",
        "features": [
            feature("evac_order", "West Ridge", WEST_ORDER),
            feature("evac_warning", "West Ridge", WEST_WARNING, [WEST_ORDER]),
            feature("evac_order", "East Canyon", EAST_ORDER),
            feature("evac_warning", "East Canyon", EAST_WARNING, [EAST_ORDER]),
        ],
    }
    write_json(out / "zones.geojson", zones)
    perims = {
        "type": "FeatureCollection",
        "features": [
            feature("fire_perimeter", "West Ridge Fire", WEST_FIRE),
            feature("fire_perimeter", "East Canyon Fire", EAST_FIRE),
        ],
    }
    write_json(out / "perimeters.geojson", perims)


def gen_scenarios(out):
    sc = out / "scenarios"
    sc.mkdir(exist_ok=True)
    inputs = {
        "roads": "../roads.csv",
        "grid": "../grid.csv",
        "shelters": "../shelters.csv",
        "zones": "../zones.geojson",
        "perimeters": "../perimeters.geojson",
    }
    cand_inputs = dict(inputs, candidates="../candidates.csv")
    decay = {"sigma_min": 30, "t0_min": 120}
    congestion = {"buffer_m": 5000, "speed_cap_kph": 10}
    placement = {"k": 2, "ring_step_m": 1609.34}
    configs = {
        "case1": {"case": "case1", "description": "Nearest-shelter minutes, full network", "inputs": inputs},
        "case2": {"case": "case2", "description": "Accessibility with fire closures", "inputs": cand_inputs,
                  "decay": decay},
        "case3": {"case": "case3", "description": "Closures plus congestion overlay", "inputs": cand_inputs,
                  "decay": decay, "congestion": congestion,
                  "classification": {"reference_scenario": "case2.json"}},
        "case4_capacity": {"case": "case4_capacity", "description": "Capacity-based placement", "inputs": cand_inputs,
                           "decay": decay, "congestion": congestion, "placement": placement,
                           "classification": {"reference_scenario": "case2.json"}},
        "case4_distance": {"case": "case4_distance", "description": "Distance-based placement", "inputs": cand_inputs,
                           "decay": decay, "congestion": congestion, "placement": placement,
                           "classification": {"reference_scenario": "case2.json"}},
    }
    for name, cfg in configs.items():
        write_json(sc / f"{name}.json", cfg)
    write_json(out / "workspace.json", {
        "default_scenario": "case3",
        "scenarios": {
            "case2": "scenarios/case2.json",
            "case3": "scenarios/case3.json",
            "case4_capacity": "scenarios/case4_capacity.json",
        },
    })


def gen_mini_fire():
    rng = random.Random(SEED)
    out = ROOT / "mini_fire"
    out.mkdir(parents=True, exist_ok=True)
    edges = gen_roads(rng, out)
    cells = gen_grid(rng, out)
    gen_shelters(rng, out)
    gen_layers(out)
    gen_scenarios(out)
    print(f"mini_fire: {edges} road segments, {cells} cells")


# ---------------------------------------------------------------- published_totals

ORDER_TOTAL = 44348
WARNING_TOTAL = 42263


def split_total(rng, total, parts):
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def gen_published_totals():
    rng = random.Random(SEED + 1)
    out = ROOT / "published_totals"
    out.mkdir(parents=True, exist_ok=True)
    order = [(2, 2), (8, 2), (8, 8), (2, 8)]
    warning = [(0, 0), (10, 0), (10, 10), (0, 10)]
    write_json(out / "zones.geojson", {
        "type": "FeatureCollection",
        "features": [feature("evac_order", "County", order), feature("evac_warning", "County", warning, [order])],
    })
    rows = []
    inner = [(x + 0.5, y + 0.5) for x in range(2, 8) for y in range(2, 8)]
    outer = [(x + 0.5, y + 0.5) for x in range(10) for y in range(10) if not (2 <= x < 8 and 2 <= y < 8)]
    for (x, y), pop in zip(inner, split_total(rng, ORDER_TOTAL, len(inner))):
        rows.append([f"o{len(rows):03d}", *to_lonlat(x, y), pop])
    for (x, y), pop in zip(outer, split_total(rng, WARNING_TOTAL, len(outer))):
        rows.append([f"w{len(rows):03d}", *to_lonlat(x, y), pop])
    rows.append(["x999", *to_lonlat(14, 14), 5000])  # outside both zones
    write_csv(out / "grid.csv", ["cell_id", "lon", "lat", "population"], rows)

    table1 = [
        ("t1", "Ritchie Valens Recreation Center", 356, "", ""),
        ("t2", "Van Nuys/Sherman Oaks Recreation Center", 100, 15000, "sqft"),
        ("t3", "Calvary Community Church", 797, 10573.27, "sqm"),
        ("t4", "Pan Pacific Recreation Center", 598, "", ""),
        ("t5", "Westwood Recreation Center", 855, "", ""),
        ("t6", "Stoner Recreation Center", 350, "", ""),
        ("t7", "Pasadena Civic Auditorium", 910, 130000, "sqft"),
        ("t8", "Pomona Fairplex", 1056, 150686, "sqft"),
    ]
    srows = []
    for i, (sid, name, cap, area, unit) in enumerate(table1):
        srows.append([sid, name, *to_lonlat(11 + 0.3 * i, 11), cap, area, unit, "open", 0])
    write_csv(out / "shelters.csv", ["id", "name", "lon", "lat", "capacity", "floor_area", "area_unit", "status",
                                     "occupied"], srows)

    roads = []
    for i in range(12):
        a, b = to_lonlat(i, 11), to_lonlat(i + 1, 11)
        roads.append([f"r{i:02d}", 1 + i, 2 + i, f"{haversine_m(a, b):.2f}", "secondary", "48", "",
                      f"LINESTRING ({a[0]} {a[1]}, {b[0]} {b[1]})"])
    write_csv(out / "roads.csv", ["edge_id", "u", "v", "length_m", "highway", "maxspeed_kph", "oneway", "wkt_geometry"],
              roads)
    inputs = {"roads": "roads.csv", "grid": "grid.csv", "shelters": "shelters.csv", "zones": "zones.geojson"}
    write_json(out / "published_supply.json", {"case": "case1", "inputs": inputs, "supply_total_override": 5224,
                                               "description": "County totals with the published 5,224 supply"})
    write_json(out / "table_supply.json", {"case": "case1", "inputs": inputs,
                                           "description": "County totals with supply summed from the shelter table"})
    print(f"published_totals: {len(rows)} cells, {len(srows)} shelters")


if __name__ == "__main__":
    gen_mini_fire()
    gen_published_totals()
