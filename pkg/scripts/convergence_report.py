#!/usr/bin/env python3
"""Concurrence change under larger Fock cutoffs and smaller thermal tails."""
import argparse

import numpy as np

from xxzbath.entanglement import Method, concurrence_many
from xxzbath.model import thermal_weights
from xxzbath.pipeline import density_series
from xxzbath.scenarios import figure_preset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--figure", default="fig5")
    ap.add_argument("--steps", type=int, default=1001)
    args = ap.parse_args()
    cfg = figure_preset(args.figure).replace(steps=args.steps)
    t = cfg.times()
    for dz, p in cfg.points():
        base = concurrence_many(density_series(p, cfg.init, t, Method.ORACLE, cfg.tail_epsilon))
        print(f"{cfg.sweep.field}={dz:g}  N={thermal_weights(p.g_bath, p.temperature, cfg.tail_epsilon).cutoff}")
        for eps_div, extra in ((1, 2), (2, 0), (2, 2), (10, 4)):
            c = concurrence_many(density_series(p, cfg.init, t, Method.ORACLE,
                                                cfg.tail_epsilon / eps_div, fock_extra=extra))
            print(f"  tail/{eps_div:<3d} fock+{extra}: max change {np.max(np.abs(c - base)):.2e}")


if __name__ == "__main__":
    main()
