"""Command-line front end: ``ecpci {atom,curve,props,constants,selftest}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.  Errors
are printed to standard output as one JSON object; logging goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from .ci import CIError, parse_block
from .config import ConfigError, RunConfig, load_config
from .constants import HARTREE_TO_CM
from .integrals import IntegralError
from .library import reference_data
from .pipeline import Point
from .properties import FitError, compute_properties, hellmann_feynman_check
from .scan import (
    _fmt,
    _jsonable,
    export,
    label_asymptotes,
    read_csv,
    scan_curve,
    spectroscopic_constants,
)
from .scf import SCFError, atomic_levels

log = logging.getLogger("ecpci")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
NUMERICAL_ERRORS = (IntegralError, SCFError, CIError, FitError, np.linalg.LinAlgError, FloatingPointError)


class StageError(RuntimeError):
    """Numerical failure tagged with where it happened."""

    def __init__(self, exc: Exception, module: str, R=None, block=None):
        super().__init__(str(exc))
        self.exc, self.module, self.R, self.block = exc, module, R, block


def _write_rows(path: Path, header, rows, fp: str, fmt: str, extra=None):
    path = path.with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# fingerprint={fp}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
        path.write_text(buf.getvalue())
    else:
        doc = {"fingerprint": fp, "columns": list(header), "rows": [list(r) for r in rows]}
        doc.update(extra or {})
        path.write_text(json.dumps(_jsonable(doc), indent=1) + "\n")
    return path


def _state(cfg: RunConfig):
    """(block, root) of the configured state; labels X/A/... map through the scan table."""
    from .scan import STATE_LABELS

    text = cfg["state"]
    if not text:
        mult = 2 if cfg.spec.n_valence_electrons == 1 else 1
        return parse_block(f"{mult}Sigma+"), 0
    for (b, r), lab in STATE_LABELS.items():
        if text == lab:
            return parse_block(b), r
    b, _, r = text.rpartition(":")
    if not b:
        return parse_block(text), 0
    return parse_block(b), int(r)


# ---------------------------------------------------------------- commands

def cmd_atom(cfg: RunConfig, out: Path, fmt: str) -> dict:
    spec = cfg.spec
    if len(spec.centers) != 1:
        raise ConfigError("atom needs a single-center configuration (no atom_b_basis)")
    ref = reference_data(cfg.files["reference"])
    species = cfg["reference_species"] or spec.centers[0].label
    try:
        point = Point(spec, None, cfg.settings)
    except NUMERICAL_ERRORS as exc:
        raise StageError(exc, "integrals") from exc
    rows = []
    if spec.n_valence_electrons == 1:
        n_min = [int(x) for x in cfg["level_n_min"].split(",")]
        levels = atomic_levels(point.ints.h0, point.ints.S, point.ints.labels)
        for l, energies in levels.items():
            for k, e in enumerate(energies[: cfg["n_levels"]]):
                n0 = n_min[l] if l < len(n_min) else l + 1
                rows.append((f"{n0 + k}{'spdfg'[l]}", float(e)))
        rows.sort(key=lambda t: t[1])
    else:
        st = point.solve(point.default_block(), 1)[0]
        cands = [(n, e) for (s, n), e in ref.levels.items() if s == species]
        name = min(cands, key=lambda t: t[1])[0] if cands else "ground"
        rows.append((name, float(st.energy)))
    table = []
    print(f"{'level':>6} {'E/au':>16} {'E/cm-1':>14} {'ref/cm-1':>14} {'dev/cm-1':>10}")
    for name, e in rows:
        r = ref.levels.get((species, name))
        dev = (e - r) * HARTREE_TO_CM if r is not None else float("nan")
        table.append((name, e, e * HARTREE_TO_CM, r * HARTREE_TO_CM if r is not None else float("nan"), dev))
        rs = f"{r * HARTREE_TO_CM:14.1f}" if r is not None else f"{'-':>14}"
        ds = f"{dev:10.1f}" if r is not None else f"{'-':>10}"
        print(f"{name:>6} {e:16.10f} {e * HARTREE_TO_CM:14.1f} {rs} {ds}")
    path = _write_rows(out / "atom_levels", ["level", "energy_au", "energy_cm", "reference_cm", "deviation_cm"],
                       table, cfg.fingerprint, fmt, {"species": species})
    return {"command": "atom", "output": str(path), "levels": len(table)}


def _curve(cfg: RunConfig, threads: int):
    if cfg.grid is None:
        raise ConfigError("curve needs r_au or r_grid_au")
    pol = cfg.list_of("polarizability_states")
    table = scan_curve(cfg.spec, cfg.grid, cfg.blocks, settings=cfg.settings, dipoles=cfg["dipoles"],
                       transitions=cfg.transitions, polarizabilities=pol, schedule=cfg["field_schedule_au"],
                       threads=threads, fingerprint=cfg.fingerprint)
    if len(table.R) and table.R[-1] >= 25.0:
        label_asymptotes(table, reference_data(cfg.files["reference"]))
    return table


def cmd_curve(cfg: RunConfig, out: Path, fmt: str, threads: int) -> dict:
    table = _curve(cfg, threads)
    if not len(table.R):
        f = table.failures[0] if table.failures else {}
        raise StageError(RuntimeError(f.get("error", "no point succeeded")), f.get("module", "scan"), f.get("R"))
    path = export(table, out / f"curve.{fmt}", fmt)
    for s in table.states:
        log.info("state %s label=%s asymptote=%s flags=%s", s.key, s.label, s.asymptote, s.flags)
    return {"command": "curve", "output": str(path), "points": len(table.R), "failures": table.failures}


def cmd_props(cfg: RunConfig, out: Path, fmt: str) -> dict:
    if cfg.grid is None:
        raise ConfigError("props needs r_au or r_grid_au")
    block, root = _state(cfg)
    rows, failures = [], []
    for R in cfg.grid:
        try:
            point = Point(cfg.spec, float(R), cfg.settings)
            res = compute_properties(point, block, root, cfg["field_schedule_au"],
                                     residual_threshold=cfg["fit_residual_threshold_au"])
            mu = float(point.dipole(point.solve(block, root + 1)[root])[2])
        except NUMERICAL_ERRORS as exc:
            failures.append({"R": float(R), "block": block.name, "module": type(exc).__module__.split(".")[-1],
                             "error": str(exc)})
            log.warning("props failed at R=%.4f: %s", R, exc)
            continue
        rows.append((float(R), res.mu_z, mu, res.alpha_parallel, res.alpha_perp, res.alpha_mean, res.gamma,
                     res.fit_residual, int(res.flagged), res.origin[2]))
        print(f"R={R:.4f}  mu_z={res.mu_z:.6f}  alpha_par={res.alpha_parallel:.4f}  alpha_perp={res.alpha_perp:.4f}"
              f"  alpha_mean={res.alpha_mean:.4f}  gamma={res.gamma:.4f}")
    if not rows:
        f = failures[0]
        raise StageError(RuntimeError(f["error"]), f["module"], f["R"], f["block"])
    header = ["R_au", "mu_z_au", "mu_z_expectation_au", "alpha_par_au", "alpha_perp_au", "alpha_mean_au",
              "gamma_au", "fit_residual_au", "flagged", "origin_z_au"]
    path = _write_rows(out / "props", header, rows, cfg.fingerprint, fmt,
                       {"state": f"{block.name}:{root}", "field_schedule_au": list(cfg["field_schedule_au"]),
                        "origin": "center of nuclear mass" if cfg["origin_z_au"] is None else "user",
                        "failures": failures})
    return {"command": "props", "output": str(path), "points": len(rows), "failures": failures}


def cmd_constants(cfg: RunConfig, out: Path, fmt: str, threads: int) -> dict:
    if "curve" in cfg.files:
        table = read_csv(cfg.files["curve"])
    else:
        table = _curve(cfg, threads)
    masses = tuple(c.mass for c in cfg.spec.centers)
    names = [cfg["state"]] if cfg["state"] else [s.key for s in table.states]
    rows = []
    for name in names:
        st = table.state(name)
        try:
            c = spectroscopic_constants(table, masses=masses, state=name, window=cfg["fit_window_au"],
                                        degree=cfg["fit_degree"])
        except ValueError as exc:
            log.warning("constants of %s not determined: %s", st.key, exc)
            print(f"{st.key:>10} {st.label:>2}  fit failed: {exc}")
            rows.append((st.key, st.label, -1) + (float("nan"),) * 6)
            continue
        rows.append((st.key, st.label, int(c.bound), c.Re, c.De, c.omega_e, c.reduced_mass, c.R_ref,
                     c.window_sensitivity))
        if c.bound:
            print(f"{st.key:>10} {st.label:>2}  Re={c.Re:.4f} a.u.  De={c.De:.1f} cm-1  we={c.omega_e:.1f} cm-1"
                  f"  (mu={c.reduced_mass:.6f} amu, De ref R={c.R_ref:g})")
        else:
            print(f"{st.key:>10} {st.label:>2}  unbound")
    header = ["state", "label", "bound", "Re_au", "De_cm", "omega_e_cm", "reduced_mass_amu", "De_reference_R_au",
              "window_sensitivity"]
    path = _write_rows(out / "constants", header, rows, cfg.fingerprint, fmt)
    return {"command": "constants", "output": str(path), "states": len(rows)}


def _selftest_checks():
    from .basis import ContractedShell, PrimitiveGaussian
    from .ci import brute_force_hamiltonian, build_hamiltonian, enumerate_determinants
    from .library import diatomic_spec

    def sh(l, a):
        return ContractedShell(l, (PrimitiveGaussian(a, 1.0),), 0)

    H = dict(label="H", charge=1.0, mass=1.007825, shells=[sh(0, 3.0), sh(0, 0.5), sh(0, 0.12), sh(1, 0.6)])
    He = dict(label="He", charge=2.0, mass=4.002602, shells=[sh(0, 8.0), sh(0, 1.4), sh(0, 0.3), sh(1, 1.0)])
    spec = diatomic_spec(He, H, 1.46, 2)
    point = Point(spec)
    yield "point built", True, ""
    full = np.linalg.eigvalsh(brute_force_hamiltonian(point.h_mo, point.eri_mo)[0])
    blocks = []
    for b in ("1Sigma+", "3Sigma+", "1Pi", "3Pi", "1Sigma-", "3Sigma-", "1Delta", "3Delta"):
        basis = enumerate_determinants(point.mos, b)
        if basis.size:
            e = np.linalg.eigvalsh(build_hamiltonian(basis, point.h_mo, point.eri_mo))
            deg = (2 if parse_block(b).lam else 1) * (3 if b.startswith("3") else 1)
            blocks.extend(np.repeat(e, deg))
    err = float(np.abs(np.sort(blocks) - full).max())
    yield "block FCI = determinant FCI", err < 1e-10, f"max diff {err:.2e}"
    rep = hellmann_feynman_check(point)
    yield "Hellmann-Feynman dipole", rep.discrepancy < 1e-6, f"diff {rep.discrepancy:.2e}"


def cmd_selftest(seed_check: bool) -> int:
    ok = True
    for name, passed, detail in _selftest_checks():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
    if seed_check:
        tests = Path(__file__).resolve().parents[2] / "tests"
        if not tests.is_dir():
            print("FAIL  property suite: tests directory not found next to the package")
            return EXIT_NUMERIC
        rc = subprocess.call([sys.executable, "-m", "pytest", "-q", str(tests)])
        print(f"{'PASS' if rc == 0 else 'FAIL'}  property suite (pytest exit {rc})")
        ok &= rc == 0
    return EXIT_OK if ok else EXIT_NUMERIC


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecpci", description="ECP+CPP two-electron FCI engine for diatomics")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("atom", "curve", "props", "constants", "selftest"):
        s = sub.add_parser(name)
        s.add_argument("--config", help="key = value run configuration")
        s.add_argument("--out", help="output directory (overrides out_dir)")
        s.add_argument("--format", choices=("csv", "json"), help="output format (overrides format)")
        s.add_argument("--threads", type=int, help="worker threads for independent grid points")
        s.add_argument("--seed-check", action="store_true", help="also run the full property-test suite")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def _error(kind: str, exc: Exception, **tags) -> str:
    doc = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    doc.update({k: v for k, v in tags.items() if v is not None})
    return json.dumps(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        try:
            return cmd_selftest(args.seed_check)
        except Exception as exc:  # noqa: BLE001
            print(_error("numerical", exc, module="selftest"))
            return EXIT_NUMERIC
    try:
        if not args.config:
            raise ConfigError("--config is required")
        cfg = load_config(args.config, overrides={"out_dir": args.out, "format": args.format,
                                                   "threads": args.threads})
    except ConfigError as exc:
        print(_error("config", exc))
        return EXIT_CONFIG
    out = Path(cfg["out_dir"])
    fmt = cfg["format"]
    threads = cfg["threads"] if cfg["threads"] > 0 else (os.cpu_count() or 1)
    try:
        if args.command == "atom":
            summary = cmd_atom(cfg, out, fmt)
        elif args.command == "curve":
            summary = cmd_curve(cfg, out, fmt, threads)
        elif args.command == "props":
            summary = cmd_props(cfg, out, fmt)
        else:
            summary = cmd_constants(cfg, out, fmt, threads)
    except ConfigError as exc:
        print(_error("config", exc))
        return EXIT_CONFIG
    except StageError as exc:
        print(_error("numerical", exc.exc, module=exc.module, R=exc.R, block=exc.block))
        return EXIT_NUMERIC
    except (*NUMERICAL_ERRORS, ValueError, KeyError) as exc:
        print(_error("numerical", exc, module=type(exc).__module__.split(".")[-1]))
        return EXIT_NUMERIC
    log.info("%s", summary)
    rc = EXIT_OK
    if args.seed_check:
        rc = cmd_selftest(True)
    return rc


if __name__ == "__main__":
    sys.exit(main())
