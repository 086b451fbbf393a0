"""Key = value run configuration with units in the key names.

Example::

    atom_a_basis = Mg-C
    atom_a_basis_file = builtin:mg_basis.txt
    atom_a_core_file = mg_ecp.txt
    atom_a_charge = 2
    atom_a_mass_amu = 23.985042
    atom_b_basis = H-mol
    atom_b_basis_file = builtin:light_basis.txt
    atom_b_charge = 1
    n_valence_electrons = 2
    r_grid_au = 1.5:10:0.1
    blocks = 1Sigma+:4, 1Pi:1

Every referenced file is read and parsed by :func:`load_config` before any
computation starts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .basis import BasisError, MoleculeSpec, fingerprint
from .constants import MASS_H1, MASS_MG24
from .library import BUILTIN, atom_spec, diatomic_spec, load_basis, load_core, read_text, reference_data
from .pipeline import Settings
from .scan import default_grid

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config_text", "KEYS"]


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


def _bool(v: str) -> bool:
    t = v.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _floats(v: str) -> tuple:
    return tuple(float(x) for x in v.replace(",", " ").split())


# key -> (converter, default)
KEYS = {
    "title": (str, ""),
    "basis_file": (str, None),
    "core_file": (str, None),
    "reference_file": (str, BUILTIN + "reference_levels.txt"),
    "n_valence_electrons": (int, None),
    "total_charge": (int, None),
    "r_au": (float, None),
    "r_grid_au": (str, None),
    "blocks": (str, None),
    "state": (str, None),
    "dipoles": (_bool, False),
    "transitions": (str, ""),
    "polarizability_states": (str, ""),
    "field_schedule_au": (_floats, (8e-4, 4e-4, 2e-4)),
    "origin_z_au": (float, None),
    "orbitals": (str, "cation"),
    "cpp_cutoff": (str, "step"),
    "cpp_two_electron": (_bool, True),
    "cpp_external_field": (_bool, True),
    "ci_method": (str, "auto"),
    "ci_tol": (float, 1e-9),
    "integral_tol": (float, 1e-10),
    "fit_residual_threshold_au": (float, 1e-10),
    "fit_window_au": (float, 0.4),
    "fit_degree": (int, 6),
    "curve_file": (str, None),
    "reference_species": (str, ""),
    "level_n_min": (str, "1,2,3,4"),
    "n_levels": (int, 3),
    "threads": (int, 0),  # 0: all available cores
    "out_dir": (str, "."),
    "format": (str, "csv"),
}
for _c in ("a", "b"):
    KEYS.update({
        f"atom_{_c}_label": (str, None),
        f"atom_{_c}_basis": (str, None),
        f"atom_{_c}_basis_file": (str, None),
        f"atom_{_c}_core": (str, None),
        f"atom_{_c}_core_file": (str, None),
        f"atom_{_c}_charge": (float, None),
        f"atom_{_c}_mass_amu": (float, None),
    })

_DEFAULT_MASS = {"Mg": MASS_MG24, "H": MASS_H1, "He": 4.002602}


@dataclass
class RunConfig:
    values: dict
    spec: MoleculeSpec
    settings: Settings
    grid: np.ndarray | None
    fingerprint: str
    source: str = ""
    files: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def blocks(self) -> dict:
        """Requested blocks -> number of roots."""
        text = self.values["blocks"]
        if not text:
            mult = 2 if self.spec.n_valence_electrons == 1 else 1
            return {f"{mult}Sigma+": 1}
        out = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, n = item.partition(":")
            out[name.strip()] = int(n) if n else 1
        return out

    def list_of(self, key) -> list:
        return [x.strip() for x in self.values[key].split(",") if x.strip()]

    @property
    def transitions(self):
        text = self.values["transitions"].strip()
        if text == "all":
            return "all"
        return [tuple(p.split("|")) for p in self.list_of("transitions")]


def parse_config_text(text: str) -> dict:
    """Parse key = value lines (``#`` comments) into converted values."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in KEYS:
            raise ConfigError(f"unknown config key {k!r}")
        if k in raw:
            raise ConfigError(f"config key {k!r} given twice")
        raw[k] = v
    values = {}
    for k, (conv, default) in KEYS.items():
        if k in raw:
            try:
                values[k] = conv(raw[k])
            except ValueError as exc:
                raise ConfigError(f"config key {k!r}: {exc}") from None
        else:
            values[k] = default
    return values


def _grid(text: str | None, r: float | None):
    if text is None:
        return None if r is None else np.array([r])
    t = text.strip()
    if t == "default":
        return default_grid()
    if ":" in t:
        parts = [float(x) for x in t.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError("r_grid_au range must be start:stop:step")
        n = int(np.floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1
        return np.round(parts[0] + parts[2] * np.arange(n), 10)
    try:
        g = np.array(_floats(t))
    except ValueError:
        raise ConfigError(f"cannot parse r_grid_au {text!r}") from None
    return g


def _resolve(path: str | None, base: Path) -> str | None:
    if path is None or path.startswith(BUILTIN):
        return path
    p = Path(path)
    return str(p if p.is_absolute() else base / p)


def load_config(path=None, text: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read, validate and fully resolve a run configuration (fail fast)."""
    if text is None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    base = Path(path).resolve().parent if path is not None else Path.cwd()
    values = parse_config_text(text)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    if values["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    texts = [text]
    files = {}
    atoms = []
    try:
        for c in ("a", "b"):
            sec = values[f"atom_{c}_basis"]
            if sec is None:
                continue
            bfile = _resolve(values[f"atom_{c}_basis_file"] or values["basis_file"], base)
            if bfile is None:
                raise ConfigError(f"atom_{c}: no basis file given (atom_{c}_basis_file or basis_file)")
            shells = load_basis(bfile, sec)
            texts.append(read_text(bfile))
            files[f"atom_{c}_basis"] = bfile
            label = values[f"atom_{c}_label"] or sec.split("-")[0]
            charge = values[f"atom_{c}_charge"]
            if charge is None:
                raise ConfigError(f"atom_{c}_charge is required")
            mass = values[f"atom_{c}_mass_amu"] or _DEFAULT_MASS.get(label, 1.0)
            ecp = cpp = None
            cfile = _resolve(values[f"atom_{c}_core_file"] or values["core_file"], base)
            csec = values[f"atom_{c}_core"]
            if csec is not None:
                if cfile is None:
                    raise ConfigError(f"atom_{c}_core given without a core file")
                ecp, cpp = load_core(cfile, csec)
                texts.append(read_text(cfile))
                files[f"atom_{c}_core"] = cfile
                if cpp is not None and values["cpp_cutoff"] != cpp.cutoff:
                    cpp = replace(cpp, cutoff=values["cpp_cutoff"])
            atoms.append(dict(label=label, charge=charge, mass=mass, shells=shells, ecp=ecp, cpp=cpp))
        if not atoms:
            raise ConfigError("no basis: set atom_a_basis")
        ref = _resolve(values["reference_file"], base)
        reference_data(ref)
        files["reference"] = ref
        if values["curve_file"] is not None:
            cf = _resolve(values["curve_file"], base)
            if not Path(cf).exists():
                raise ConfigError(f"curve_file {cf} does not exist")
            files["curve"] = cf
        nval = values["n_valence_electrons"] or (2 if len(atoms) == 2 else 1)
        grid = _grid(values["r_grid_au"], values["r_au"])
        if len(atoms) == 1:
            a = atoms[0]
            spec = atom_spec(a["shells"], label=a["label"], charge=a["charge"], mass=a["mass"], n_valence=nval,
                             ecp=a["ecp"], cpp=a["cpp"], total_charge=values["total_charge"])
            grid = None
        else:
            R0 = float(grid[0]) if grid is not None else 3.0
            spec = diatomic_spec(atoms[0], atoms[1], R0, nval, values["total_charge"])
        settings = Settings(
            orbitals=values["orbitals"], cpp_two_electron=values["cpp_two_electron"],
            cpp_external_field=values["cpp_external_field"],
            origin=None if values["origin_z_au"] is None else (0.0, 0.0, values["origin_z_au"]),
            ci_method=values["ci_method"], ci_tol=values["ci_tol"], integral_tol=values["integral_tol"],
        )
    except BasisError as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if grid is not None and (np.any(grid <= 0) or np.any(np.diff(np.sort(grid)) == 0)):
        raise ConfigError("r_grid_au must hold distinct positive distances")
    return RunConfig(values, spec, settings, grid, fingerprint(*texts), str(path or ""), files)
