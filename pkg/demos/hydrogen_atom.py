"""Hydrogen atom: basis-set error of the 1s level and the static polarizability."""
from ecpci.constants import HARTREE_TO_CM
from ecpci.library import BUILTIN, atom_spec, load_basis
from ecpci.pipeline import Point
from ecpci.properties import atom_polarizability
from ecpci.scf import atomic_levels


def h_atom(section):
    return atom_spec(load_basis(BUILTIN + "light_basis.txt", section), label="H", charge=1.0)


for section in ("H-s12", "H-s12pd", "H-mol"):
    p = Point(h_atom(section))
    e1s = atomic_levels(p.ints.h0, p.ints.S, p.ints.labels)[0][0]
    print(f"{section:8s} {p.ints.S.shape[0]:3d} AOs  E(1s) = {e1s:.10f}  error = {(e1s + 0.5) * HARTREE_TO_CM:8.2f} cm-1")

for section in ("H-s12pd", "H-mol"):
    print(f"{section:8s} alpha = {atom_polarizability(h_atom(section)):.4f} a.u. (exact 4.5)")
