"""Shipped data files and helpers that assemble atoms and diatomics from them."""
from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .basis import (
    AtomCenter,
    BasisError,
    MoleculeSpec,
    parse_basis_library,
    parse_core_potentials,
)
from .constants import MASS_H1, MASS_MG24

__all__ = [
    "BUILTIN",
    "read_text",
    "load_basis",
    "load_core",
    "Asymptote",
    "ReferenceData",
    "reference_data",
    "atom_spec",
    "diatomic_spec",
    "heh_plus",
    "mg_core",
    "mg_system",
]

BUILTIN = "builtin:"


def read_text(path) -> str:
    """Read a file; ``builtin:<name>`` refers to the package data directory."""
    p = str(path)
    if p.startswith(BUILTIN):
        name = p[len(BUILTIN):]
        try:
            return resources.files("ecpci.data").joinpath(name).read_text()
        except FileNotFoundError:
            raise BasisError(f"no shipped data file {name!r}") from None
    try:
        return Path(p).read_text()
    except OSError as exc:
        raise BasisError(f"cannot read {p}: {exc.strerror}") from None


def load_basis(path, section: str) -> list:
    lib = parse_basis_library(read_text(path))
    if section not in lib or not lib[section]:
        raise BasisError(f"{path}: no basis section {section!r} (have {sorted(lib)})")
    return list(lib[section])


def load_core(path, section: str):
    """Return (ECPParameters | None, CPPParameters | None) for one section."""
    lib = parse_core_potentials(read_text(path))
    if section not in lib:
        raise BasisError(f"{path}: no core-potential section {section!r} (have {sorted(lib)})")
    return lib[section]


@dataclass(frozen=True)
class Asymptote:
    name: str
    energy: float
    multiplicities: tuple
    lambdas: tuple

    def allows(self, multiplicity: int, lam) -> bool:
        return multiplicity in self.multiplicities and (lam is None or lam in self.lambdas)


@dataclass(frozen=True)
class ReferenceData:
    version: str
    asymptotes: tuple
    levels: dict  # (species, name) -> energy

    @property
    def ground(self) -> float:
        return min(a.energy for a in self.asymptotes)


def reference_data(path=BUILTIN + "reference_levels.txt") -> ReferenceData:
    version = ""
    asy, levels = [], {}
    for lineno, raw in enumerate(read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "version":
                version = tok[1]
            elif tok[0] == "asymptote":
                asy.append(Asymptote(tok[1], float(tok[2]),
                                     tuple(int(x) for x in tok[3].split(",")),
                                     tuple(int(x) for x in tok[4].split(","))))
            elif tok[0] == "level":
                levels[(tok[1], tok[2])] = float(tok[3])
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise BasisError(f"{path}: line {lineno}: cannot parse {line!r}") from None
    return ReferenceData(version, tuple(asy), levels)


def atom_spec(shells, *, label: str, charge: float, mass: float = 1.0, n_valence: int = 1,
              ecp=None, cpp=None, total_charge: int | None = None) -> MoleculeSpec:
    """Single center at the origin."""
    centers = (AtomCenter(label, (0.0, 0.0, 0.0), charge, mass),)
    if total_charge is None:
        total_charge = int(round(charge - n_valence))
    return MoleculeSpec(
        centers, tuple(sh.on_center(0) for sh in shells),
        {0: ecp} if ecp is not None else {}, {0: cpp} if cpp is not None else {},
        n_valence, total_charge,
    )


def diatomic_spec(a: dict, b: dict, R: float, n_valence: int = 2, total_charge: int | None = None) -> MoleculeSpec:
    """Two centers on z: ``a`` at the origin, ``b`` at (0, 0, R).

    Each of ``a``/``b`` is a dict with keys label, charge, mass, shells and
    optionally ecp, cpp.
    """
    centers = (
        AtomCenter(a["label"], (0.0, 0.0, 0.0), a["charge"], a.get("mass", 1.0)),
        AtomCenter(b["label"], (0.0, 0.0, float(R)), b["charge"], b.get("mass", 1.0)),
    )
    shells = tuple(sh.on_center(0) for sh in a["shells"]) + tuple(sh.on_center(1) for sh in b["shells"])
    ecp, cpp = {}, {}
    for i, d in enumerate((a, b)):
        if d.get("ecp") is not None:
            ecp[i] = d["ecp"]
        if d.get("cpp") is not None:
            cpp[i] = d["cpp"]
    if total_charge is None:
        total_charge = int(round(a["charge"] + b["charge"] - n_valence))
    return MoleculeSpec(centers, shells, ecp, cpp, n_valence, total_charge)


def heh_plus(R: float = 1.46) -> MoleculeSpec:
    """HeH+ with bare Coulomb cores and the shipped He-mol/H-mol bases."""
    he = dict(label="He", charge=2.0, mass=4.002602, shells=load_basis(BUILTIN + "light_basis.txt", "He-mol"))
    h = dict(label="H", charge=1.0, mass=1.007825, shells=load_basis(BUILTIN + "light_basis.txt", "H-mol"))
    return diatomic_spec(he, h, R, 2, 1)


def mg_core(ecp_file, section: str = "Mg-C", cutoff: str = "step"):
    """(ECP, CPP) of Mg2+ for one basis variant.

    ECP channels come from ``ecp_file`` (same section names as the shipped
    basis); CPP parameters from that file if it has a ``cpp`` line, else from
    the shipped ``mg_cpp.txt``.
    """
    ecp, cpp = load_core(ecp_file, section)
    if ecp is None:
        raise BasisError(f"{ecp_file}: section {section!r} has no ECP channels")
    if cpp is None:
        _, cpp = load_core(BUILTIN + "mg_cpp.txt", section)
    if cpp.cutoff != cutoff:
        cpp = replace(cpp, cutoff=cutoff)
    return ecp, cpp


def mg_system(ecp_file, section: str = "Mg-C", h_basis: str | None = "H-mol", R: float = 3.0,
              cutoff: str = "step") -> MoleculeSpec:
    """Mg+ (``h_basis=None``) or MgH+ with the shipped Mg and H bases."""
    ecp, cpp = mg_core(ecp_file, section, cutoff)
    mg = dict(label="Mg", charge=2.0, mass=MASS_MG24, shells=load_basis(BUILTIN + "mg_basis.txt", section),
              ecp=ecp, cpp=cpp)
    if h_basis is None:
        return atom_spec(mg["shells"], label="Mg", charge=2.0, mass=MASS_MG24, n_valence=1, ecp=ecp, cpp=cpp)
    h = dict(label="H", charge=1.0, mass=MASS_H1, shells=load_basis(BUILTIN + "light_basis.txt", h_basis))
    return diatomic_spec(mg, h, R, 2, 1)
