#!/usr/bin/env python3
# Copyright 2026 The ODC Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Writes the bundled one-day harvest/lux trace (synthetic, seeded).

One row per 60 s slot: a clear-sky daylight curve modulated by a slowly
varying cloud factor with a few deep cloud passages.
"""

import argparse
import csv
import math
import random

SLOTS = 1440
SUNRISE = 360
SUNSET = 1140
PEAK_MA = 50.0
PEAK_LUX = 80000.0


def cloud_factors(rng):
    level = 0.9
    out = []
    dip_left = 0
    for _ in range(SLOTS):
        level += 0.08 * (0.85 - level) + rng.gauss(0.0, 0.04)
        level = min(1.0, max(0.3, level))
        if dip_left == 0 and rng.random() < 0.006:
            dip_left = rng.randint(10, 45)
        factor = level
        if dip_left > 0:
            factor *= 0.25
            dip_left -= 1
        out.append(factor)
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=2013)
    parser.add_argument("--out", default="data/day_trace.csv")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    clouds = cloud_factors(rng)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["slot", "harvest_ma", "lux"])
        for t in range(SLOTS):
            if SUNRISE <= t < SUNSET:
                sun = math.sin(math.pi * (t - SUNRISE) / (SUNSET - SUNRISE))
                clear = sun ** 1.5
            else:
                clear = 0.0
            harvest = PEAK_MA * clear * clouds[t]
            lux = PEAK_LUX * clear * clouds[t]
            w.writerow([t, f"{harvest:.3f}", f"{lux:.0f}"])


if __name__ == "__main__":
    main()
