#!/usr/bin/env python3
"""Compare the printed closed forms (literal transcription) with the exact oracle.

Prints, per branch component, the largest deviation from oracle amplitudes and
the resulting reduced-density error for the fig1 and fig2 presets.
"""
import numpy as np

from xxzbath.coefficients import Branch, closed_form_grid
from xxzbath.entanglement import assemble_density_series
from xxzbath.model import thermal_weights
from xxzbath.oracle import reduced_density_series
from xxzbath.scenarios import figure_preset

NAMES = ("double_flip", "single_a", "single_b", "stay")


def main():
    t = np.linspace(0.0, 10.0, 1001)
    for fig in ("fig1", "fig2"):
        cfg = figure_preset(fig)
        p = cfg.params
        dist = thermal_weights(p.g_bath, p.temperature)
        ref = reduced_density_series(p, cfg.init, dist, t)
        print(f"== {fig}  (N = {dist.cutoff})")
        grids = {}
        for literal in (True, False):
            g11 = closed_form_grid(p, Branch.ELEVEN, dist.occupations, t, literal=literal)
            g00 = closed_form_grid(p, Branch.ZERO_ZERO, dist.occupations, t, literal=literal)
            grids[literal] = (g11, g00)
            rho = assemble_density_series(g11, g00, cfg.init, dist, p)
            label = "printed " if literal else "corrected"
            print(f"  {label}: max |rho - rho_oracle| = {np.max(np.abs(rho - ref)):.3e}, "
                  f"trace(rho(0)) = {np.trace(rho[0]).real:.6f}")
        for branch, k in ((Branch.ELEVEN, 0), (Branch.ZERO_ZERO, 1)):
            lit, cor = grids[True][k].values, grids[False][k].values
            diffs = np.max(np.abs(lit - cor), axis=(0, 1))
            print(f"  {branch.value}: " + ", ".join(f"{n} {d:.2e}" for n, d in zip(NAMES, diffs)))
        print(f"  printed |00> stay amplitude at t=0, n=0: {grids[True][1].values[0, 0, 3].real:.3f}")


if __name__ == "__main__":
    main()
