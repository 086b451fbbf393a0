"""Gaussian basis sets, diatomic geometries and core-potential parameters.

Basis functions are contracted real solid-harmonic Gaussians

    chi(r) = sum_k c_k S_lm(r - A) exp(-a_k |r - A|^2)

with S_lm the Racah-normalized real solid harmonics (S_00 = 1, S_10 = z,
S_11 = x, S_1-1 = y, ...).  Every function of a shell carries an |m| label
about the z axis (the internuclear axis) and a parity under the xz mirror
plane: m >= 0 components are even, m < 0 components are odd.
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .constants import L_LETTERS

__all__ = [
    "BasisError",
    "PrimitiveGaussian",
    "ContractedShell",
    "AtomCenter",
    "ECPTerm",
    "ECPParameters",
    "CPPParameters",
    "MoleculeSpec",
    "AOLabel",
    "parse_basis",
    "parse_basis_library",
    "serialize_basis",
    "parse_core_potentials",
    "normalize",
    "self_overlap",
    "build_ao_list",
    "cartesian_powers",
    "solid_harmonic_matrix",
    "eval_ao",
    "fingerprint",
]


class BasisError(ValueError):
    """Malformed or inconsistent basis / core-potential input."""


@dataclass(frozen=True)
class PrimitiveGaussian:
    exponent: float
    coefficient: float

    def __post_init__(self):
        if not self.exponent > 0.0:
            raise BasisError(f"exponent must be positive, got {self.exponent}")


@dataclass(frozen=True)
class ContractedShell:
    """One contracted shell.

    When ``normalized`` is False the coefficients are contraction weights of
    unit-normalized primitives (the usual basis-file convention).  After
    :func:`normalize` they multiply bare primitives and the contracted
    function has unit norm.
    """

    l: int
    primitives: tuple[PrimitiveGaussian, ...]
    center_index: int = 0
    normalized: bool = False

    def __post_init__(self):
        if self.l < 0 or self.l > 3:
            raise BasisError(f"angular momentum {self.l} not supported (s,p,d,f only)")
        if len(self.primitives) == 0:
            raise BasisError("shell has no primitives")
        exps = [p.exponent for p in self.primitives]
        if len(set(exps)) != len(exps):
            raise BasisError(f"duplicate exponents in shell: {exps}")
        if exps != sorted(exps, reverse=True):
            object.__setattr__(
                self,
                "primitives",
                tuple(sorted(self.primitives, key=lambda p: -p.exponent)),
            )

    @property
    def exponents(self) -> np.ndarray:
        return np.array([p.exponent for p in self.primitives])

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([p.coefficient for p in self.primitives])

    @property
    def nfunc(self) -> int:
        return 2 * self.l + 1

    def on_center(self, index: int) -> "ContractedShell":
        return replace(self, center_index=index)


@dataclass(frozen=True)
class AtomCenter:
    label: str
    position: tuple[float, float, float]
    effective_charge: float
    mass: float = 1.0

    def __post_init__(self):
        if not self.effective_charge > 0:
            raise BasisError(f"{self.label}: effective charge must be > 0")
        if not self.mass > 0:
            raise BasisError(f"{self.label}: mass must be > 0")
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))


@dataclass(frozen=True)
class ECPTerm:
    n: int
    c: float
    zeta: float

    def __post_init__(self):
        if not self.zeta > 0:
            raise BasisError(f"ECP exponent must be positive, got {self.zeta}")
        if self.n < -2:
            raise BasisError(f"ECP power r^{self.n} not integrable (need n >= -2)")


@dataclass(frozen=True)
class ECPParameters:
    """W = sum_{l<=max_l} |lm> W_l(r) <lm| + W_local(r) (1 - sum_{l<=max_l} P_l)."""

    channels: dict = field(default_factory=dict)  # l -> tuple[ECPTerm]
    local: tuple = ()

    @property
    def max_l(self) -> int:
        return max(self.channels) if self.channels else -1

    def radial(self, l: int | None, r: np.ndarray) -> np.ndarray:
        terms = self.local if l is None else self.channels.get(l, self.local)
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for t in terms:
            out += t.c * r**t.n * np.exp(-t.zeta * r * r)
        return out

    def envelope_radius(self, tol: float = 1e-16) -> float:
        """Radius beyond which every |term| is below ``tol``."""
        rmax = 1.0
        for terms in list(self.channels.values()) + [self.local]:
            for t in terms:
                r = 1.0
                while abs(t.c) * r**t.n * math.exp(-t.zeta * r * r) > tol:
                    r *= 1.1
                rmax = max(rmax, r)
        return rmax


@dataclass(frozen=True)
class CPPParameters:
    core_polarizability: float
    cutoff_radii: dict = field(default_factory=dict)  # l -> rho_l
    cutoff: str = "step"  # or "smooth"

    def __post_init__(self):
        if self.core_polarizability < 0:
            raise BasisError("core polarizability must be >= 0")
        for l, rho in self.cutoff_radii.items():
            if not rho > 0:
                raise BasisError(f"cut-off radius for l={l} must be > 0")
        if self.cutoff not in ("step", "smooth"):
            raise BasisError(f"unknown cut-off form {self.cutoff!r}")

    @property
    def max_l(self) -> int:
        return max(self.cutoff_radii) if self.cutoff_radii else -1

    def field_factor(self, l: int | None, r: np.ndarray) -> np.ndarray:
        """Cut-off factor multiplying the field of an electron at distance r.

        ``l=None`` selects the channel used for all l above the listed ones.
        """
        if l is None or l not in self.cutoff_radii:
            l = self.max_l
        rho = self.cutoff_radii[l]
        r = np.asarray(r, dtype=float)
        if self.cutoff == "step":
            return (r >= rho).astype(float)
        return -np.expm1(-(r / rho) ** 2)


@dataclass(frozen=True)
class MoleculeSpec:
    centers: tuple
    shells: tuple
    ecp: dict = field(default_factory=dict)  # center index -> ECPParameters
    cpp: dict = field(default_factory=dict)  # center index -> CPPParameters
    n_valence_electrons: int = 2
    total_charge: int = 0

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(self, "shells", tuple(self.shells))
        if self.n_valence_electrons not in (1, 2):
            raise BasisError("only one- and two-valence-electron systems are modelled")
        if not self.shells:
            raise BasisError("no shells")
        for sh in self.shells:
            if not 0 <= sh.center_index < len(self.centers):
                raise BasisError(f"shell refers to missing center {sh.center_index}")
        for idx in list(self.ecp) + list(self.cpp):
            if not 0 <= idx < len(self.centers):
                raise BasisError(f"core potential on missing center {idx}")

    @property
    def nao(self) -> int:
        return sum(sh.nfunc for sh in self.shells)

    @property
    def positions(self) -> np.ndarray:
        return np.array([c.position for c in self.centers])

    @property
    def charges(self) -> np.ndarray:
        return np.array([c.effective_charge for c in self.centers])

    @property
    def masses(self) -> np.ndarray:
        return np.array([c.mass for c in self.centers])

    def center_of_mass(self) -> np.ndarray:
        m = self.masses
        return (m[:, None] * self.positions).sum(0) / m.sum()

    def at_distance(self, R: float) -> "MoleculeSpec":
        """Place center 0 at the origin and center 1 at (0, 0, R)."""
        if len(self.centers) == 1:
            return self
        if len(self.centers) != 2:
            raise BasisError("at_distance is defined for diatomics only")
        a, b = self.centers
        return replace(
            self,
            centers=(replace(a, position=(0.0, 0.0, 0.0)), replace(b, position=(0.0, 0.0, float(R)))),
        )

    @property
    def distance(self) -> float:
        if len(self.centers) == 1:
            return 0.0
        p = self.positions
        return float(np.linalg.norm(p[1] - p[0]))

    def nuclear_repulsion(self) -> float:
        e = 0.0
        p, z = self.positions, self.charges
        for i in range(len(z)):
            for j in range(i):
                e += z[i] * z[j] / np.linalg.norm(p[i] - p[j])
        return float(e)

    def normalized(self) -> "MoleculeSpec":
        return replace(self, shells=tuple(normalize(sh) for sh in self.shells))


# ---------------------------------------------------------------- parsing

_L_FROM_LETTER = {ch: i for i, ch in enumerate(L_LETTERS[:4])}
_SEP = re.compile(r"[\s/]+")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _number(tok: str, lineno: int) -> float:
    try:
        return float(tok.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise BasisError(f"line {lineno}: malformed number {tok!r}") from None


def parse_basis_library(text: str) -> dict:
    """Parse a basis file into ``{element label: [ContractedShell, ...]}``.

    Layout: ``element <label>`` starts a section, a lone ``s``/``p``/``d``/``f``
    starts an angular-momentum block, each data line holds ``exponent coefficient``
    (a ``/`` may separate them; a missing coefficient means 1) and blank lines
    separate contractions.  ``#`` starts a comment.
    """
    library: dict = {}
    label = None
    l = None
    block_started = False
    current: list = []

    def flush():
        nonlocal current
        if current:
            library.setdefault(label, []).append(
                ContractedShell(l, tuple(PrimitiveGaussian(a, c) for a, c in current))
            )
        current = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            if raw.split("#", 1)[0].strip() == "" and "#" not in raw:
                flush()
            continue
        toks = [t for t in _SEP.split(line) if t]
        head = toks[0].lower()
        if head == "element":
            if l is not None and not block_started:
                raise BasisError(f"line {lineno}: empty {L_LETTERS[l]} block")
            flush()
            if len(toks) != 2:
                raise BasisError(f"line {lineno}: expected 'element <label>'")
            label = toks[1]
            library.setdefault(label, [])
            l = None
            continue
        if len(toks) == 1 and head in _L_FROM_LETTER:
            if l is not None and not block_started:
                raise BasisError(f"line {lineno}: empty {L_LETTERS[l]} block")
            flush()
            l = _L_FROM_LETTER[head]
            block_started = False
            continue
        if l is None:
            raise BasisError(f"line {lineno}: data before any s/p/d/f block header")
        if len(toks) > 2:
            raise BasisError(f"line {lineno}: expected 'exponent coefficient', got {line!r}")
        a = _number(toks[0], lineno)
        c = _number(toks[1], lineno) if len(toks) == 2 else 1.0
        if not a > 0:
            raise BasisError(f"line {lineno}: exponent must be positive")
        current.append((a, c))
        block_started = True
    if l is not None and not block_started:
        raise BasisError(f"empty {L_LETTERS[l]} block at end of file")
    flush()
    if not any(library.values()):
        raise BasisError("no shells")
    return library


def parse_basis(text: str, element: str | None = None) -> list:
    """Parse basis-file text and return the shells of one element section."""
    lib = parse_basis_library(text)
    if element is None:
        nonempty = [k for k, v in lib.items() if v]
        if len(nonempty) != 1:
            raise BasisError(f"file holds sections {nonempty}; name the element")
        element = nonempty[0]
    if element not in lib or not lib[element]:
        raise BasisError(f"no shells for element {element!r}")
    return list(lib[element])


def serialize_basis(shells, label: str = "X") -> str:
    """Inverse of :func:`parse_basis` for un-normalized shells."""
    out = [f"element {label}"]
    current_l = None
    for sh in shells:
        if sh.l != current_l:
            out.append(L_LETTERS[sh.l])
            current_l = sh.l
        for p in sh.primitives:
            out.append(f"  {p.exponent!r}  {p.coefficient!r}")
        out.append("")
    return "\n".join(out) + "\n"


def parse_core_potentials(text: str) -> dict:
    """Parse an ECP/CPP file into ``{label: (ECPParameters | None, CPPParameters | None)}``.

    Per element section: channel headers ``s``/``p``/``d``/``f`` or ``local``
    followed by ``n c zeta`` lines, and one ``cpp alpha rho_s rho_p rho_d rho_f``
    line (``-`` for an absent radius).
    """
    out: dict = {}
    label = None
    channel = None
    chans: dict = {}
    local: list = []
    cpp = None

    def flush():
        if label is None:
            return
        ecp = None
        if chans or local:
            ecp = ECPParameters({k: tuple(v) for k, v in chans.items()}, tuple(local))
        out[label] = (ecp, cpp)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        head = toks[0].lower()
        if head == "element":
            flush()
            label, channel, chans, local, cpp = toks[1], None, {}, [], None
            continue
        if label is None:
            raise BasisError(f"line {lineno}: data before 'element' header")
        if head == "cpp":
            if len(toks) < 2:
                raise BasisError(f"line {lineno}: cpp line needs a polarizability")
            alpha = _number(toks[1], lineno)
            radii = {}
            for l, tok in enumerate(toks[2:]):
                if tok != "-":
                    radii[l] = _number(tok, lineno)
            cpp = CPPParameters(alpha, radii)
            continue
        if len(toks) == 1 and (head in _L_FROM_LETTER or head == "local"):
            channel = head
            if head != "local":
                chans.setdefault(_L_FROM_LETTER[head], [])
            continue
        if channel is None:
            raise BasisError(f"line {lineno}: ECP term outside a channel block")
        if len(toks) != 3:
            raise BasisError(f"line {lineno}: expected 'n c zeta'")
        try:
            n = int(toks[0])
        except ValueError:
            raise BasisError(f"line {lineno}: power must be an integer") from None
        term = ECPTerm(n, _number(toks[1], lineno), _number(toks[2], lineno))
        if channel == "local":
            local.append(term)
        else:
            chans[_L_FROM_LETTER[channel]].append(term)
    flush()
    return out


def fingerprint(*texts: str) -> str:
    """SHA-256 of whitespace/comment-canonicalized input texts."""
    h = hashlib.sha256()
    for t in texts:
        canon = "\n".join(" ".join(_strip(ln).split()) for ln in t.splitlines() if _strip(ln))
        h.update(canon.encode())
        h.update(b"\0")
    return h.hexdigest()


# ---------------------------------------------------------- normalization

def _radial_overlap(l: int, p: np.ndarray) -> np.ndarray:
    """<S_lm e^{-a r^2} | S_lm e^{-b r^2}> with p = a + b."""
    return 4.0 * math.pi / (2 * l + 1) * math.gamma(l + 1.5) / (2.0 * p ** (l + 1.5))


def self_overlap(shell: ContractedShell) -> float:
    a = shell.exponents
    c = shell.coefficients
    if not shell.normalized:
        c = c / np.sqrt(_radial_overlap(shell.l, 2 * a))
    return float(c @ _radial_overlap(shell.l, a[:, None] + a[None, :]) @ c)


def normalize(shell: ContractedShell) -> ContractedShell:
    """Return the shell with bare-primitive coefficients giving unit norm."""
    a = shell.exponents
    c = shell.coefficients
    if not np.any(c):
        raise BasisError("cannot normalize a contraction with all-zero coefficients")
    if not shell.normalized:
        c = c / np.sqrt(_radial_overlap(shell.l, 2 * a))
    s = c @ _radial_overlap(shell.l, a[:, None] + a[None, :]) @ c
    c = c / math.sqrt(s)
    prims = tuple(PrimitiveGaussian(float(x), float(y)) for x, y in zip(a, c))
    return replace(shell, primitives=prims, normalized=True)


# ------------------------------------------------------ solid harmonics

@lru_cache(maxsize=None)
def cartesian_powers(l: int) -> tuple:
    """Cartesian exponent triples (i, j, k) of degree l, x-major order."""
    return tuple((i, j, l - i - j) for i in range(l, -1, -1) for j in range(l - i, -1, -1))


@lru_cache(maxsize=None)
def solid_harmonic_matrix(l: int) -> np.ndarray:
    """Rows m = -l..l, columns Cartesian monomials: S_lm = sum C[m, c] x^i y^j z^k."""
    cart = cartesian_powers(l)
    index = {p: n for n, p in enumerate(cart)}
    C = np.zeros((2 * l + 1, len(cart)))
    for m in range(-l, l + 1):
        am = abs(m)
        vm = 0.0 if m >= 0 else 0.5
        norm = math.sqrt(2 * math.factorial(l + am) * math.factorial(l - am) / (2.0 if m == 0 else 1.0))
        norm /= 2**am * math.factorial(l)
        for t in range((l - am) // 2 + 1):
            for u in range(t + 1):
                v = vm
                while v <= am / 2 + 1e-9:
                    if abs(2 * v - round(2 * v)) < 1e-9:
                        coef = (
                            (-1) ** int(round(t + v - vm))
                            * 0.25**t
                            * math.comb(l, t)
                            * math.comb(l - t, am + t)
                            * math.comb(t, u)
                            * math.comb(am, int(round(2 * v)))
                        )
                        px = int(round(2 * t + am - 2 * (u + v)))
                        py = int(round(2 * (u + v)))
                        pz = l - 2 * t - am
                        C[m + l, index[(px, py, pz)]] += norm * coef
                    v += 1.0
    return C


@dataclass(frozen=True)
class AOLabel:
    index: int
    center_index: int
    shell_index: int
    l: int
    m: int

    @property
    def abs_m(self) -> int:
        return abs(self.m)

    @property
    def parity(self) -> int:
        """+1 for cos(m phi)-type (even under y -> -y), -1 for sin-type."""
        return 1 if self.m >= 0 else -1

    @property
    def symmetry(self) -> tuple:
        return (self.abs_m, self.parity)

    def __str__(self):
        return f"{self.center_index}:{L_LETTERS[self.l]}{self.m:+d}"


def build_ao_list(spec: MoleculeSpec) -> list:
    """Expand shells into real solid-harmonic AOs (m = -l..l per shell)."""
    pos = spec.positions
    if np.any(np.abs(pos[:, :2]) > 1e-12):
        raise BasisError("all centers must lie on the z axis (diatomic engine)")
    labels = []
    n = 0
    for s, sh in enumerate(spec.shells):
        for m in range(-sh.l, sh.l + 1):
            labels.append(AOLabel(n, sh.center_index, s, sh.l, m))
            n += 1
    return labels


def eval_ao(spec: MoleculeSpec, points: np.ndarray) -> np.ndarray:
    """AO values at ``points`` (shape (..., 3)); returns (..., nao).

    Shells are normalized on the fly if needed.
    """
    pts = np.asarray(points, dtype=float)
    flat = pts.reshape(-1, 3)
    out = np.empty((flat.shape[0], spec.nao))
    col = 0
    pos = spec.positions
    for sh in spec.shells:
        sh = sh if sh.normalized else normalize(sh)
        d = flat - pos[sh.center_index]
        r2 = np.einsum("ij,ij->i", d, d)
        radial = np.exp(-np.outer(r2, sh.exponents)) @ sh.coefficients
        cart = np.stack([d[:, 0] ** i * d[:, 1] ** j * d[:, 2] ** k for i, j, k in cartesian_powers(sh.l)], axis=1)
        out[:, col : col + sh.nfunc] = (cart @ solid_harmonic_matrix(sh.l).T) * radial[:, None]
        col += sh.nfunc
    return out.reshape(pts.shape[:-1] + (spec.nao,))
