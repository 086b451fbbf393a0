"""MgH+ with the Mg2+ core potential: Mg+ levels, X/A constants and the A-C transition dipole.

Needs the core-potential channels: ECPCI_MG_ECP=/path/to/mg_ecp.txt python3 demos/mgh_plus.py [output_dir]
The full 94-point scan takes several minutes.
"""
import os
import sys
from pathlib import Path

import numpy as np

from ecpci.constants import HARTREE_TO_CM
from ecpci.library import mg_system, reference_data
from ecpci.pipeline import Point
from ecpci.scan import default_grid, detect_avoided_crossings, export, label_asymptotes, scan_curve, spectroscopic_constants
from ecpci.scf import atomic_levels

ecp = os.environ.get("ECPCI_MG_ECP")
if not ecp:
    sys.exit("set ECPCI_MG_ECP to a core-potential file with a Mg-C section")
out = Path(sys.argv[1] if len(sys.argv) > 1 else "mgh_plus_out")

p = Point(mg_system(ecp, h_basis=None))
lev = atomic_levels(p.ints.h0, p.ints.S, p.ints.labels)
ref = reference_data().levels
for name, e in (("3s", lev[0][0]), ("3p", lev[1][0]), ("3d", lev[2][0]), ("4s", lev[0][1]), ("4p", lev[1][1])):
    print(f"Mg+ {name}: {e:.6f}  deviation {(e - ref[('Mg+', name)]) * HARTREE_TO_CM:+8.1f} cm-1")

table = scan_curve(mg_system(ecp), default_grid(), {"1Sigma+": 3, "1Pi": 1}, dipoles=True,
                   transitions=[("1Sigma+:1", "1Sigma+:2")])
label_asymptotes(table)
print("curve written to", export(table, out / "curve.csv"))
for s in table.states:
    c = spectroscopic_constants(table, state=s.key)
    if c.bound:
        print(f"{s.label} ({s.key}, {s.asymptote}): Re {c.Re:.4f}  De {c.De:.0f} cm-1  we {c.omega_e:.1f} cm-1")
d = table.transition("A", "C")
flips = [float(table.R[i]) for i in range(len(d) - 1) if np.sign(d[i]) != np.sign(d[i + 1])]
print("A-C tdm sign changes near R =", flips)
print("A/C avoided crossings:", detect_avoided_crossings(table, states=("A", "C")))
