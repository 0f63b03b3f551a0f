#!/usr/bin/env python3
# Realized competitive ratios for a few instance families, next to the envelopes.

from onlinecover.harness import ratio_sweep

config = {"families": [
    {"name": "singletons", "n": 10, "m": 20, "k_max": 1, "seeds": 20},
    {"name": "k<=4", "n": 12, "m": 20, "k_max": 4, "seeds": 20},
    {"name": "k<=8", "n": 12, "m": 20, "k_max": 8, "seeds": 20},
    {"name": "box k<=4", "n": 8, "m": 15, "k_max": 4, "u_max": 3, "seeds": 10,
     "rounding_seeds": 5},
]}

for row in ratio_sweep(config):
    line = (f"{row['family']:>11}: frac max {row['frac_ratio_max']:.3f} "
            f"mean {row['frac_ratio_mean']:.3f} (envelope {row['frac_envelope']})")
    if "int_ratio_mean" in row:
        line += (f"; integral max {row['int_ratio_max']:.3f} mean {row['int_ratio_mean']:.3f} "
                 f"(envelope {row['int_envelope']:.0f})")
    print(line)
