"""Writes the synthetic gravity-model panel used by the pipeline tests.

    python3 make_panel.py   # regenerates panel_flows.csv and panel_gdp.csv
"""
import math
import random

rng = random.Random(1981)
countries = [f"K{i:02d}" for i in range(40)]
base_gdp = {c: math.exp(rng.gauss(24.0, 1.6)) for c in countries}
position = {c: (rng.random(), rng.random()) for c in countries}

with open("panel_flows.csv", "w") as flows, open("panel_gdp.csv", "w") as gdp:
    flows.write("year,exporter,importer,value\n")
    gdp.write("year,country,gdp\n")
    for year in (1998, 1999, 2000):
        growth = 1.0 + 0.03 * (year - 1998)
        for c in countries:
            gdp.write(f"{year},{c},{base_gdp[c] * growth:.6e}\n")
        for e in countries:
            for i in countries:
                if e == i:
                    continue
                mass = math.log(base_gdp[e]) + math.log(base_gdp[i])
                link = 1.0 / (1.0 + math.exp(-(mass - 47.5)))
                if rng.random() > link:
                    continue
                dx = position[e][0] - position[i][0]
                dy = position[e][1] - position[i][1]
                dist = 0.05 + math.hypot(dx, dy)
                value = 1e-14 * base_gdp[e] * base_gdp[i] * growth**2 / dist * math.exp(rng.gauss(0, 1))
                flows.write(f"{year},{e},{i},{value:.6e}\n")
