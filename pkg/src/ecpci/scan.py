"""Potential-curve scans, asymptote labels, spectroscopic constants and export."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .basis import MoleculeSpec
from .ci import parse_block
from .constants import AMU_TO_ME, HARTREE_TO_CM, MASS_H1, MASS_MG24
from .integrals import cross_overlap
from .library import ReferenceData, reference_data
from .pipeline import Point, Settings
from .properties import DEFAULT_SCHEDULE, compute_properties

__all__ = [
    "STATE_LABELS",
    "default_grid",
    "StateInfo",
    "CurveTable",
    "scan_curve",
    "label_asymptotes",
    "SpectroscopicConstants",
    "spectroscopic_constants",
    "reduced_mass",
    "morse_curve",
    "detect_avoided_crossings",
    "export",
    "read_csv",
]

log = logging.getLogger(__name__)

# spectroscopic letters of the adiabatic roots of MgH+-like systems
STATE_LABELS = {
    ("1Sigma+", 0): "X",
    ("1Sigma+", 1): "A",
    ("1Pi", 0): "B",
    ("1Sigma+", 2): "C",
    ("1Sigma+", 3): "D",
    ("3Sigma+", 0): "a",
    ("3Pi", 0): "b",
    ("3Sigma+", 1): "c",
}

CONTINUITY_THRESHOLD = 0.5


def default_grid() -> np.ndarray:
    """About 100 distances over 1.5-50 a.u., 0.1 a.u. apart in the bonding region."""
    inner = np.round(np.arange(1.5, 8.0 + 1e-9, 0.1), 10)
    mid = np.arange(8.5, 15.0 + 1e-9, 0.5)
    outer = np.array([16, 17, 18, 19, 20, 22, 24, 26, 28, 30, 35, 40, 45, 50], float)
    return np.concatenate([inner, mid, outer])


def state_key(block, root: int) -> str:
    return f"{parse_block(block).name}:{root}"


def _split_key(key: str):
    b, r = key.rsplit(":", 1)
    return parse_block(b), int(r)


@dataclass
class StateInfo:
    key: str
    block: str
    root: int
    label: str = ""
    asymptote: str = ""
    asymptote_error_cm: float = float("nan")
    flags: list = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return parse_block(self.block).multiplicity

    @property
    def lam(self):
        return parse_block(self.block).lam


@dataclass
class CurveTable:
    """Energies (and optional property columns) of several states on an R grid.

    ``columns`` holds every data column except R, keyed by name:
    ``E:<state>``, ``mu_z:<state>``, ``alpha_par:<state>``, ``alpha_perp:<state>``,
    ``tdm_x:<a>|<b>`` / ``tdm_z:<a>|<b>``.  All in atomic units.
    """

    R: np.ndarray
    states: list
    columns: dict
    metadata: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def __post_init__(self):
        self.R = np.asarray(self.R, float)
        if np.any(np.diff(self.R) <= 0):
            raise ValueError("R grid must be strictly ascending")
        for name, col in self.columns.items():
            if len(col) != len(self.R):
                raise ValueError(f"column {name} has {len(col)} values for {len(self.R)} distances")

    def state(self, name: str) -> StateInfo:
        for s in self.states:
            if name in (s.key, s.label):
                return s
        raise KeyError(f"no state {name!r}")

    def energy(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[f"E:{self.state(name).key}"])

    def transition(self, a: str, b: str, component: str = "z") -> np.ndarray:
        ka, kb = self.state(a).key, self.state(b).key
        for x, y, sgn in ((ka, kb, 1.0), (kb, ka, 1.0)):
            name = f"tdm_{component}:{x}|{y}"
            if name in self.columns:
                return sgn * np.asarray(self.columns[name])
        raise KeyError(f"no transition column for {a}-{b}")


# ------------------------------------------------------------------ scan

def _point_data(spec, R, requests, settings, want_dipole, pairs, pol_keys, schedule):
    point = Point(spec, R, settings)
    out = {"R": point.R, "spec": point.spec, "states": {}, "ao": {}, "dipole": {}, "props": {}, "origin": point.ints.origin}
    for block, n in requests:
        states = point.solve(block, n)
        if len(states) < n:
            raise RuntimeError(f"block {block.name} has only {len(states)} functions, {n} roots requested")
        out["states"][block] = states
        out["ao"][block] = [point.ao_coefficients(s) for s in states]
        if want_dipole:
            for s in states:
                out["dipole"][state_key(block, s.root)] = float(point.dipole(s)[2])
    flat = {state_key(b, s.root): s for b, ss in out["states"].items() for s in ss}
    out["tdm"] = {}
    for a, b in pairs:
        out["tdm"][(a, b)] = point.transition(flat[a], flat[b])
    for key in pol_keys:
        blk, root = _split_key(key)
        out["props"][key] = compute_properties(point, blk, root, schedule)
    return out


def _overlap_matrix(spec_a, A, spec_b, B):
    S = cross_overlap(spec_a, spec_b)
    O = np.zeros((len(A), len(B)))
    for i, x in enumerate(A):
        for j, y in enumerate(B):
            O[i, j] = x @ S @ y if x.ndim == 1 else np.sum(x * (S @ y @ S.T))
    return O


def scan_curve(spec: MoleculeSpec, grid, blocks, n_roots: int = 1, settings: Settings | None = None, *,
               dipoles: bool = False, transitions=(), polarizabilities=(), schedule=DEFAULT_SCHEDULE,
               threads: int = 1, fingerprint: str = "") -> CurveTable:
    """Energies of the lowest roots of each block at every grid distance.

    ``blocks`` is a list of block names (``n_roots`` each) or a dict
    name -> n_roots.  Failed points are dropped and recorded in ``failures``.
    Transition-dipole signs follow the CI phase continuity convention: each
    root overlaps positively with the same root at the previous distance
    (in the order the grid was given).
    """
    settings = settings or Settings()
    grid = [float(r) for r in np.atleast_1d(np.asarray(grid, float))]
    if isinstance(blocks, dict):
        requests = [(parse_block(b), int(n)) for b, n in blocks.items()]
    else:
        requests = [(parse_block(b), int(n_roots)) for b in np.atleast_1d(blocks)]
    keys = [state_key(b, r) for b, n in requests for r in range(n)]
    pairs = []
    if transitions == "all":
        pairs = [(a, b) for i, a in enumerate(keys) for b in keys[i + 1:]]
    else:
        for a, b in transitions:
            pair = (state_key(*_split_key(a)), state_key(*_split_key(b)))
            if pair[0] not in keys or pair[1] not in keys:
                raise ValueError(f"transition {pair} refers to states outside the requested roots")
            pairs.append(pair)
    pol_keys = [state_key(*_split_key(k)) for k in polarizabilities]

    def work(R):
        try:
            return R, _point_data(spec, R, requests, settings, dipoles, pairs, pol_keys, schedule), None
        except Exception as exc:  # recorded, scan continues
            log.warning("point R=%.4f failed: %s", R, exc)
            return R, None, exc

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, grid))
    else:
        results = [work(R) for R in grid]

    failures, good = [], []
    for R, data, exc in results:
        if data is None:
            failures.append({"R": R, "module": type(exc).__module__.split(".")[-1], "error": str(exc)})
        else:
            good.append(data)

    # phase continuity along the grid as given
    events = []
    prev = None
    phases = []
    for data in good:
        ph = {}
        for block, states in data["states"].items():
            n = len(states)
            if prev is None:
                ph.update({state_key(block, k): 1.0 for k in range(n)})
                continue
            O = _overlap_matrix(prev["spec"], prev["ao"][block], data["spec"], data["ao"][block])
            rows, cols = linear_sum_assignment(-np.abs(O))
            for k in range(n):
                key = state_key(block, k)
                pk = prev["phase"][key]
                ph[key] = pk * (1.0 if O[k, k] >= 0 else -1.0)
                if abs(O[k, k]) < CONTINUITY_THRESHOLD:
                    match = int(cols[list(rows).index(k)]) if k in rows else -1
                    events.append({"R": data["R"], "R_previous": prev["R"], "state": key,
                                   "overlap": float(abs(O[k, k])), "follows_root": match})
                    log.info("crossing: %s overlap %.3f between R=%.3f and %.3f", key, abs(O[k, k]), prev["R"], data["R"])
        data["phase"] = ph
        phases.append(ph)
        prev = data

    order = np.argsort([d["R"] for d in good])
    good = [good[i] for i in order]
    R = np.array([d["R"] for d in good])
    cols: dict = {}
    for key in keys:
        blk, root = _split_key(key)
        cols[f"E:{key}"] = np.array([d["states"][blk][root].energy for d in good])
    if dipoles:
        for key in keys:
            cols[f"mu_z:{key}"] = np.array([d["dipole"][key] for d in good])
    for a, b in pairs:
        vals = np.array([d["tdm"][(a, b)] * d["phase"][a] * d["phase"][b] for d in good]).reshape(len(good), 3)
        cols[f"tdm_x:{a}|{b}"] = vals[:, 0]
        cols[f"tdm_z:{a}|{b}"] = vals[:, 2]
    for key in pol_keys:
        cols[f"alpha_par:{key}"] = np.array([d["props"][key].alpha_parallel for d in good])
        cols[f"alpha_perp:{key}"] = np.array([d["props"][key].alpha_perp for d in good])
        cols[f"mu_ff:{key}"] = np.array([d["props"][key].mu_z for d in good])
    states = []
    for key in keys:
        blk, root = _split_key(key)
        states.append(StateInfo(key, blk.name, root, STATE_LABELS.get((blk.name, root), "")))
    origin = good[0]["origin"].tolist() if good else []
    meta = {
        "origin": "center of nuclear mass" if settings.origin is None else "user",
        "origin_z_au_at_first_point": origin[2] if origin else None,
        "fingerprint": fingerprint,
        "orbitals": settings.orbitals,
        "cpp_two_electron": settings.cpp_two_electron,
        "cpp_external_field": settings.cpp_external_field,
        "field_schedule_au": list(schedule) if pol_keys else [],
        "masses_amu": spec.masses.tolist(),
    }
    return CurveTable(R, states, cols, meta, failures, events)


# ------------------------------------------------------------ asymptotes

def label_asymptotes(table: CurveTable, reference: ReferenceData | None = None, *,
                     tolerance_cm: float = 500.0, min_R: float = 25.0) -> CurveTable:
    """Tag each state with the nearest symmetry-compatible reference limit.

    The comparison uses the energy at the largest grid distance.  Deviations
    above ``tolerance_cm`` are flagged; two limits within tolerance make the
    match ambiguous (flagged, left unassigned).
    """
    if table.R[-1] < min_R:
        raise ValueError(f"asymptote labels need R >= {min_R} a.u.; grid ends at {table.R[-1]}")
    reference = reference or reference_data()
    for st in table.states:
        st.flags = [f for f in st.flags if f not in ("ambiguous", "mismatch")]
        E = float(table.columns[f"E:{st.key}"][-1])
        cands = [a for a in reference.asymptotes if a.allows(st.multiplicity, st.lam)]
        if not cands:
            st.asymptote = ""
            st.flags.append("mismatch")
            continue
        dev = np.array([(E - a.energy) * HARTREE_TO_CM for a in cands])
        close = np.flatnonzero(np.abs(dev) <= tolerance_cm)
        if len(close) > 1:
            st.asymptote = ""
            st.asymptote_error_cm = float("nan")
            st.flags.append("ambiguous")
            continue
        k = int(np.argmin(np.abs(dev)))
        st.asymptote = cands[k].name
        st.asymptote_error_cm = float(dev[k])
        if abs(dev[k]) > tolerance_cm:
            st.flags.append("mismatch")
    table.metadata["asymptote_reference_version"] = reference.version
    return table


# ------------------------------------------------------------- constants

def reduced_mass(m1: float = MASS_MG24, m2: float = MASS_H1) -> float:
    """Reduced mass in amu."""
    return m1 * m2 / (m1 + m2)


@dataclass(frozen=True)
class SpectroscopicConstants:
    bound: bool
    Re: float = float("nan")
    De: float = float("nan")  # cm-1
    omega_e: float = float("nan")  # cm-1
    reduced_mass: float = float("nan")  # amu
    E_min: float = float("nan")
    E_ref: float = float("nan")
    R_ref: float = float("nan")
    window: float = 0.4
    degree: int = 6
    window_sensitivity: float = float("nan")  # max relative change of (Re, De, omega_e) for window +-0.1

    def as_dict(self) -> dict:
        return asdict(self)


def _fit_minimum(R, E, i0, window, degree):
    sel = np.abs(R - R[i0]) <= window + 1e-12
    x = R[sel] - R[i0]
    if sel.sum() < degree + 1:
        raise ValueError(f"only {sel.sum()} points within +-{window} a.u. of the minimum; need {degree + 1}")
    p = np.polynomial.Polynomial.fit(x, E[sel], degree).convert()
    d1, d2 = p.deriv(1), p.deriv(2)
    x0 = 0.0
    for _ in range(50):
        step = d1(x0) / d2(x0)
        x0 -= step
        if abs(step) < 1e-14:
            break
    if abs(x0) > window:
        raise ValueError("fitted minimum lies outside the fit window")
    return R[i0] + x0, float(p(x0)), float(d2(x0))


def spectroscopic_constants(table_or_R, energies=None, masses=(MASS_MG24, MASS_H1), *, state: str | None = None,
                            window: float = 0.4, degree: int = 6) -> SpectroscopicConstants:
    """Re, De and omega_e from a local polynomial fit around the discrete minimum.

    Pass a CurveTable and ``state`` or explicit (R, E) arrays.  De is taken
    relative to the energy at the largest grid distance.  A curve without
    an interior minimum gives ``bound=False``.
    """
    if isinstance(table_or_R, CurveTable):
        R = table_or_R.R
        E = table_or_R.energy(state)
    else:
        R = np.asarray(table_or_R, float)
        E = np.asarray(energies, float)
    if not 4 <= degree <= 6:
        raise ValueError("fit degree must be 4, 5 or 6")
    mu = reduced_mass(*masses)
    i0 = int(np.argmin(E))
    if i0 == 0 or i0 == len(R) - 1 or E[-1] <= E[i0]:
        return SpectroscopicConstants(False, reduced_mass=mu, R_ref=float(R[-1]), E_ref=float(E[-1]),
                                      window=window, degree=degree)

    def constants(w):
        Re, Emin, k = _fit_minimum(R, E, i0, w, degree)
        omega = math.sqrt(k / (mu * AMU_TO_ME)) * HARTREE_TO_CM
        return Re, (E[-1] - Emin) * HARTREE_TO_CM, omega, Emin

    Re, De, omega, Emin = constants(window)
    sens = 0.0
    for w in (window - 0.1, window + 0.1):
        try:
            alt = constants(w)
        except ValueError:
            continue
        sens = max(sens, *(abs(a / b - 1.0) for a, b in zip(alt[:3], (Re, De, omega))))
    return SpectroscopicConstants(True, float(Re), float(De), float(omega), mu, float(Emin), float(E[-1]),
                                  float(R[-1]), window, degree, sens)


def morse_curve(R, Re: float, De_cm: float, omega_cm: float, masses=(MASS_MG24, MASS_H1), E_inf: float = 0.0):
    """Morse potential (hartree) with the given constants; omega_e fixes the range parameter."""
    R = np.asarray(R, float)
    De = De_cm / HARTREE_TO_CM
    k = (omega_cm / HARTREE_TO_CM) ** 2 * reduced_mass(*masses) * AMU_TO_ME
    a = math.sqrt(k / (2.0 * De))
    return E_inf + De * (1.0 - np.exp(-a * (R - Re))) ** 2 - De


# ------------------------------------------------------- avoided crossings

def detect_avoided_crossings(table_or_R, Ea=None, Eb=None, *, states=None, tol: float = 1e-10) -> list:
    """Local minima of |E_a - E_b| as (R, gap), refined by a parabola through gap^2.

    gap^2 is exactly quadratic near a crossing of linear diabatic curves, so
    the refinement recovers R_c and 2W for a two-level model.
    """
    if isinstance(table_or_R, CurveTable):
        a, b = states
        sa, sb = table_or_R.state(a), table_or_R.state(b)
        if sa.block != sb.block:
            raise ValueError("avoided crossings are defined between states of one block")
        R, Ea, Eb = table_or_R.R, table_or_R.energy(a), table_or_R.energy(b)
    else:
        R = np.asarray(table_or_R, float)
    g = np.abs(np.asarray(Eb, float) - np.asarray(Ea, float))
    out = []
    for i in range(1, len(R) - 1):
        if g[i] < g[i - 1] - tol and g[i] < g[i + 1] - tol:
            x = R[i - 1: i + 2]
            y = g[i - 1: i + 2] ** 2
            c = np.polyfit(x, y, 2)
            if c[0] > 0:
                Rc = -c[1] / (2 * c[0])
                if min(x[0], x[2]) <= Rc <= max(x[0], x[2]):
                    out.append((float(Rc), float(math.sqrt(max(np.polyval(c, Rc), 0.0)))))
                    continue
            out.append((float(R[i]), float(g[i])))
    return out


# ------------------------------------------------------------------ I/O

def _fmt(x) -> str:
    return repr(float(x))


def _csv_text(table: CurveTable) -> str:
    names = [n for n, c in table.columns.items() if len(c) and not np.all(np.isnan(np.asarray(c, float)))]
    buf = io.StringIO()
    buf.write(f"# fingerprint={table.metadata.get('fingerprint', '')}\n")
    buf.write(f"# origin={table.metadata.get('origin', '')}\n")
    for s in table.states:
        buf.write(f"# state {s.key} label={s.label} asymptote={s.asymptote}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R_au"] + names)
    for i, r in enumerate(table.R):
        w.writerow([_fmt(r)] + [_fmt(table.columns[n][i]) for n in names])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _json_text(table: CurveTable, extra=None) -> str:
    names = [n for n, c in table.columns.items() if len(c) and not np.all(np.isnan(np.asarray(c, float)))]
    doc = {
        "units": "atomic units unless the key says cm-1",
        "metadata": table.metadata,
        "states": [asdict(s) for s in table.states],
        "R_au": table.R,
        "columns": {n: table.columns[n] for n in names},
        "failures": table.failures,
        "events": table.events,
    }
    if extra:
        doc.update(extra)
    return json.dumps(_jsonable(doc), indent=1, sort_keys=False) + "\n"


def export(table: CurveTable, path, fmt: str | None = None, extra: dict | None = None) -> Path:
    """Write ``table`` as CSV (one row per R) or JSON (full metadata)."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
    if fmt == "csv":
        text = _csv_text(table)
    elif fmt == "json":
        text = _json_text(table, extra)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_csv(path_or_text) -> CurveTable:
    """Parse a CSV written by :func:`export`."""
    text = str(path_or_text)
    if "\n" not in text:
        text = Path(text).read_text()
    meta, states, body = {}, [], []
    for line in text.splitlines():
        if line.startswith("# state "):
            parts = line[8:].split()
            kv = dict(p.split("=", 1) for p in parts[1:])
            blk, root = _split_key(parts[0])
            states.append(StateInfo(parts[0], blk.name, root, kv.get("label", ""), kv.get("asymptote", "")))
        elif line.startswith("# "):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    header, data = rows[0], np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, len(rows[0]))
    cols = {n: data[:, i] for i, n in enumerate(header) if i > 0}
    return CurveTable(data[:, 0], states, cols, meta)
