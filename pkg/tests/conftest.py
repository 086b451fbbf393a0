import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ecpci.basis import AtomCenter, ContractedShell, MoleculeSpec, PrimitiveGaussian, parse_core_potentials  # noqa: E402
from ecpci.library import BUILTIN, diatomic_spec, load_basis, heh_plus  # noqa: E402

# a made-up Mg2+-like core: every channel type and power the parser accepts
TOY_CORE = """
element X
s
0 1.5 0.8
-2 0.3 1.1
p
0 -0.7 0.6
d
-1 0.4 0.9
local
-1 -0.2 0.3
cpp 0.47 0.9 1.25 1.5 0.6
"""


def shell(l, prims, center=0):
    return ContractedShell(l, tuple(PrimitiveGaussian(a, c) for a, c in prims), center)


def toy_core(cutoff="step"):
    ecp, cpp = parse_core_potentials(TOY_CORE)["X"]
    if cutoff != "step":
        from dataclasses import replace

        cpp = replace(cpp, cutoff=cutoff)
    return ecp, cpp


def probe_spec(R=1.4, cutoff="step"):
    """Two centers, s/p/d/f shells, ECP and CPP on center 0."""
    ecp, cpp = toy_core(cutoff)
    shells = [
        shell(0, [(1.2, 0.6), (0.35, 0.5)], 0),
        shell(1, [(0.6, 1.0)], 1),
        shell(2, [(0.8, 1.0)], 0),
        shell(3, [(0.5, 1.0)], 0),
        shell(1, [(0.9, 1.0)], 0),
    ]
    centers = (AtomCenter("X", (0, 0, 0), 2.0, 24.0), AtomCenter("H", (0, 0, R), 1.0, 1.0))
    return MoleculeSpec(centers, shells, {0: ecp}, {0: cpp}, 2, 1)


def small_spec(kind="heh", R=1.5):
    """Few-orbital two-electron systems for brute-force comparisons (<= 12 AOs)."""
    if kind == "heh":
        a = dict(label="He", charge=2.0, mass=4.0, shells=[shell(0, [(3.0, 1.0)]), shell(0, [(0.7, 1.0)]), shell(1, [(1.0, 1.0)])])
        b = dict(label="H", charge=1.0, mass=1.0, shells=[shell(0, [(1.2, 1.0)]), shell(0, [(0.3, 1.0)]), shell(1, [(0.8, 1.0)])])
        return diatomic_spec(a, b, R, 2, 1)
    if kind == "h2":
        h = dict(label="H", charge=1.0, mass=1.0, shells=[shell(0, [(1.3, 1.0)]), shell(0, [(0.25, 1.0)]), shell(1, [(0.9, 1.0)])])
        return diatomic_spec(h, dict(h), R, 2, 0)
    if kind == "core":
        ecp, cpp = toy_core()
        a = dict(label="X", charge=2.0, mass=24.0, ecp=ecp, cpp=cpp,
                 shells=[shell(0, [(0.5, 1.0)]), shell(0, [(0.12, 1.0)]), shell(1, [(0.3, 1.0)]), shell(2, [(0.4, 1.0)])])
        b = dict(label="H", charge=1.0, mass=1.0, shells=[shell(0, [(0.8, 1.0)])])
        return diatomic_spec(a, b, R, 2, 1)
    raise ValueError(kind)


def h_atom(section="H-s12"):
    from ecpci.library import atom_spec

    return atom_spec(load_basis(BUILTIN + "light_basis.txt", section), label="H", charge=1.0, n_valence=1, total_charge=0)


@pytest.fixture(scope="session")
def heh_point():
    from ecpci.pipeline import Point

    return Point(heh_plus(), 1.46)


@pytest.fixture(scope="session")
def core_point():
    from ecpci.pipeline import Point

    return Point(small_spec("core", 2.8))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def all_blocks(point):
    """Every (block, degeneracy) of a two-electron point: Sigma+/-, Lambda > 0, singlet and triplet."""
    from ecpci.ci import Block

    mmax = int(point.mos.m_labels.max())
    out = []
    for mult in (1, 3):
        out += [(Block(mult, 0, 1), mult), (Block(mult, 0, -1), mult)]
        out += [(Block(mult, lam, 0), 2 * mult) for lam in range(1, 2 * mmax + 1)]
    return out


def block_spectrum(point):
    """Sorted FCI eigenvalues over all blocks, each repeated by its degeneracy."""
    from ecpci.ci import build_hamiltonian

    vals = []
    for blk, deg in all_blocks(point):
        basis = point.basis(blk)
        if basis.size:
            e = np.linalg.eigvalsh(build_hamiltonian(basis, point.h_mo, point.eri_mo))
            vals += list(np.repeat(e, deg))
    return np.sort(vals)


def brute_spectrum(point):
    from ecpci.ci import brute_force_hamiltonian

    H, _ = brute_force_hamiltonian(point.h_mo, point.eri_mo)
    return np.linalg.eigvalsh(H)
