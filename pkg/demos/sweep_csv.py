"""A small end-to-end parameter sweep, the way the CLI `sweep` runs one.

Each cell gets the capacity prediction, the equality verdict, and (when
trials > 0) Monte Carlo error estimates with Wilson intervals.
"""

from winavc.harness import format_csv, sweep

grid = {
    "w": [0.2, 0.3],
    "p": [0.05, 0.15, 0.25],
    "trials": 0,  # capacity-only pass first
    "seed": 1,
}
print("capacity-only sweep:")
print(format_csv(sweep(grid)))

grid_sim = {
    "w": [0.3],
    "p": [0.05],
    "n": [256],
    "w_x": 64,
    "trials": 200,
    "seed": 1,
    "message_bits": 4,
    "field_bits": 4,
    "p_x_weight": 0.1,
    "jammer": ["iid", "spoof", "none"],
}
print("simulation sweep (w=0.3, p=0.05, three jammers):")
print(format_csv(sweep(grid_sim)))
