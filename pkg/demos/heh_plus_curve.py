"""HeH+ test molecule: potential curves, constants, dipoles and polarizabilities.

Usage: python3 demos/heh_plus_curve.py [output_dir]
"""
import sys
from pathlib import Path

import numpy as np

from ecpci.library import heh_plus
from ecpci.pipeline import Point
from ecpci.properties import compute_properties, hellmann_feynman_check
from ecpci.scan import export, scan_curve, spectroscopic_constants

out = Path(sys.argv[1] if len(sys.argv) > 1 else "heh_plus_out")
grid = np.round(np.concatenate([np.arange(0.9, 3.0, 0.05), np.arange(3.0, 8.01, 0.25)]), 10)
table = scan_curve(heh_plus(), grid, {"1Sigma+": 2, "1Pi": 1, "3Sigma+": 1}, dipoles=True,
                   transitions=[("1Sigma+:0", "1Sigma+:1"), ("1Sigma+:0", "1Pi:0")])
print("curve written to", export(table, out / "curve.csv"))

masses = (4.002602, 1.007825)
c = spectroscopic_constants(table, masses=masses, state="X")
print(f"X: Re = {c.Re:.4f} a.u.  De(to R={c.R_ref:g}) = {c.De:.0f} cm-1  we = {c.omega_e:.1f} cm-1"
      f"  window sensitivity {c.window_sensitivity:.1e}")

for R in (1.2, 1.46, 2.0):
    res = compute_properties(Point(heh_plus(), R))
    hf = hellmann_feynman_check(heh_plus(), R)
    print(f"R={R:4.2f}  mu_z={res.mu_z:+.6f}  <mu_z>={hf.mu_expectation:+.6f}  alpha_par={res.alpha_parallel:.4f}"
          f"  alpha_perp={res.alpha_perp:.4f}  gamma={res.gamma:.4f}")
