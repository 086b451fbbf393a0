"""Acceptance suite: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` to see the report lines.  The
Mg criteria (7-10) need Mg2+ core-potential channels; point the
``ECPCI_MG_ECP`` environment variable at a core-potential file with a
``Mg-C`` section (see README) to enable them.
"""
import os
import time

import numpy as np
import pytest

import oracles
from conftest import block_spectrum, brute_spectrum, h_atom, probe_spec, small_spec
from ecpci.constants import HARTREE_TO_CM
from ecpci.integrals import core_attraction, cpp_matrix, ecp_matrix, eri_tensor, overlap_kinetic_dipole
from ecpci.library import atom_spec, heh_plus, load_basis, mg_system, reference_data
from ecpci.pipeline import Point, Settings
from ecpci.properties import (
    atom_polarizability,
    compute_properties,
    field_energies,
    fit_field_response,
    finite_field_energy,
    hellmann_feynman_check,
    symmetric_schedule,
)
from ecpci.scan import default_grid, detect_avoided_crossings, morse_curve, scan_curve, spectroscopic_constants
from ecpci.scf import atomic_levels

MG_ECP = os.environ.get("ECPCI_MG_ECP")


@pytest.fixture
def needs_mg(request, capsys):
    if not MG_ECP:
        n = int(request.node.name.split("_")[2])
        with capsys.disabled():
            print(f"\nSKIP  criterion {n:>2}: ECPCI_MG_ECP not set (Mg core-potential channels unavailable)")
        pytest.skip("ECPCI_MG_ECP not set: Mg core-potential channels unavailable")


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {detail}")
        assert ok, detail

    return emit


# ------------------------------------------------------------ unconditional

def test_criterion_01_block_fci_vs_brute_force(report):
    t0 = time.perf_counter()
    errs = {}
    for kind, R in (("heh", 1.5), ("h2", 1.4), ("core", 2.8)):
        p = Point(small_spec(kind, R))
        assert p.mos.nmo <= 12
        errs[f"{kind}({p.mos.nmo} orb)"] = float(np.abs(block_spectrum(p) - brute_spectrum(p)).max())
    dt = time.perf_counter() - t0
    worst = max(errs.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    report(1, worst < 1e-10 and dt < 10.0, f"max |block - brute| {worst:.1e} ({detail}); {dt:.1f} s")


def test_criterion_02_integral_oracles(report):
    t0 = time.perf_counter()
    spec = probe_spec()
    idx = [0, 2, 6]  # s, p (other center), d
    ix = np.ix_(idx, idx)
    origin = np.array([0.0, 0.0, 0.3])
    S, T, D = overlap_kinetic_dipole(spec, origin=origin)
    errs = {}
    So, Do = oracles.overlap_dipole(spec, idx, origin)
    errs["S"] = np.abs(So - S[ix]).max()
    errs["dipole"] = max(np.abs(Do[k] - D[k][ix]).max() for k in range(3))
    errs["T"] = np.abs(oracles.kinetic(spec, idx) - T[ix]).max()
    errs["V"] = np.abs(oracles.attraction(spec, idx) - core_attraction(spec)[ix]).max()
    errs["ECP"] = np.abs(oracles.ecp(spec, [9, 12, 16]) - ecp_matrix(spec)[np.ix_([9, 12, 16], [9, 12, 16])]).max()
    C = cpp_matrix(spec)
    W, f = oracles.cpp(spec, idx)
    errs["CPP"] = max(np.abs(W - C.W[ix]).max(), *(np.abs(f[k] - C.field_ops[0][k][ix]).max() for k in range(3)))
    E = eri_tensor(spec)
    eri = max(abs(oracles.eri(spec, q) - E[q]) for q in [(0, 2, 0, 2), (2, 6, 0, 6), (3, 7, 3, 13)])
    dt = time.perf_counter() - t0
    one = max(errs.values())
    detail = ", ".join(f"{k} {v:.0e}" for k, v in errs.items())
    report(2, one < 1e-8 and eri < 1e-6 and dt < 60.0, f"{detail}, ERI {eri:.0e}; {dt:.1f} s")


def test_criterion_03_hydrogen(report):
    t0 = time.perf_counter()
    spec = h_atom("H-s12")
    p = Point(spec)
    e = atomic_levels(p.ints.h0, p.ints.S, p.ints.labels)[0][0]
    dev = (e + 0.5) * HARTREE_TO_CM
    alpha = atom_polarizability(h_atom("H-s12pd"))
    dt = time.perf_counter() - t0
    ok = abs(dev) < 30.0 and abs(alpha / 4.5 - 1) < 0.02 and dt < 30.0
    report(3, ok, f"E(1s) - (-0.5) = {dev:.2f} cm-1; alpha(H) = {alpha:.4f} a.u.; {dt:.1f} s")


def test_criterion_04_variational_and_symmetry(report):
    notes, ok = [], True
    # RHF >= FCI
    gaps = []
    for spec in (small_spec("heh", 1.5), small_spec("h2", 1.4), small_spec("core", 2.8), heh_plus()):
        p = Point(spec, settings=Settings(orbitals="rhf"))
        gaps.append(p.rhf_result.energy - p.energy("1Sigma+"))
    ok &= min(gaps) >= -1e-12
    notes.append(f"min E_RHF - E_FCI {min(gaps):.2e}")
    # interlacing when orbitals are removed
    p = Point(small_spec("heh", 1.5))
    full = brute_spectrum(p)
    worst = 0.0
    for k in range(p.mos.nmo - 1, 1, -2):
        from ecpci.ci import brute_force_hamiltonian

        sub = np.linalg.eigvalsh(brute_force_hamiltonian(p.h_mo[:k, :k], p.eri_mo[:k, :k, :k, :k])[0])
        m = len(full) - len(sub)
        worst = max(worst, (full[: len(sub)] - sub).max(), (sub - full[m:]).max())
    ok &= worst <= 1e-12
    notes.append(f"interlacing violation {max(worst, 0):.1e}")
    # Sigma+ / Pi selection rules
    q = Point(heh_plus())
    x0 = q.solve("1Sigma+", 1)[0]
    pi = q.solve("1Pi", 1)[0]
    perm_perp = max(np.abs(q.dipole(x0)[:2]).max(), np.abs(q.dipole(pi)[:2]).max())
    tdm = q.transition(x0, pi)
    ok &= perm_perp < 1e-12 and abs(tdm[2]) < 1e-12 and abs(tdm[0]) > 1e-4
    notes.append(f"perp permanent dipoles {perm_perp:.0e}, Sigma-Pi tdm_z {abs(tdm[2]):.0e}")
    # alpha_perp from x and y fields
    F = symmetric_schedule()
    ax = fit_field_response(F, field_energies(q, "1Sigma+", 0, 0, F)).alpha
    ay = fit_field_response(F, field_energies(q, "1Sigma+", 0, 1, F)).alpha
    ok &= abs(ax - ay) < 1e-10
    notes.append(f"|alpha_xx - alpha_yy| {abs(ax - ay):.0e}")
    # field-sign symmetry of a neutral homonuclear system
    h2 = Point(small_spec("h2", 1.4))
    sym = 0.0
    for axis in range(3):
        Fv = np.zeros(3)
        Fv[axis] = 5e-4
        sym = max(sym, abs(finite_field_energy(h2, None, Fv) - finite_field_energy(h2, None, -Fv)))
    ok &= sym < 1e-12
    notes.append(f"H2 |E(F) - E(-F)| {sym:.0e}")
    report(4, ok, "; ".join(notes))


def test_criterion_05_hellmann_feynman(report):
    reps = [hellmann_feynman_check(heh_plus(), R, "1Sigma+", 0) for R in (1.2, 1.46, 2.0)]
    worst = max(r.discrepancy for r in reps)
    detail = ", ".join(f"R={r.R:g}: {r.discrepancy:.1e}" for r in reps)
    report(5, worst < 1e-6, f"HeH+ |mu_ff - <mu>| {detail}")


def test_criterion_06_morse_round_trip(report):
    R = default_grid()
    worst, rows = 0.0, []
    for Re, De, we in ((3.095, 16553.0, 1599.0), (3.79, 9000.0, 900.0)):
        c = spectroscopic_constants(R, morse_curve(R, Re, De, we, E_inf=-1.05))
        err = max(abs(c.Re / Re - 1), abs(c.De / De - 1), abs(c.omega_e / we - 1))
        worst = max(worst, err)
        rows.append(f"({Re}, {De:g}, {we:g}) -> ({c.Re:.4f}, {c.De:.1f}, {c.omega_e:.2f})")
    report(6, worst < 1e-3, f"max relative error {worst:.1e} on {len(R)}-point grid; " + "; ".join(rows))


# -------------------------------------------------------------- conditional

@pytest.fixture(scope="module")
def mg_scan():
    if not MG_ECP:
        return None, 0.0
    spec = mg_system(MG_ECP, R=3.0)
    t0 = time.perf_counter()
    table = scan_curve(spec, default_grid(), {"1Sigma+": 3}, transitions=[("1Sigma+:1", "1Sigma+:2")],
                       threads=os.cpu_count() or 1)
    return table, time.perf_counter() - t0


def test_criterion_07_mg_ion_levels(needs_mg, report):
    spec = mg_system(MG_ECP, h_basis=None)
    p = Point(spec)
    lev = atomic_levels(p.ints.h0, p.ints.S, p.ints.labels)
    calc = {"3s": lev[0][0], "4s": lev[0][1], "5s": lev[0][2], "3p": lev[1][0], "4p": lev[1][1], "3d": lev[2][0]}
    ref = {k: reference_data().levels[("Mg+", k)] for k in calc}
    dev = {k: (calc[k] - ref[k]) * HARTREE_TO_CM for k in ("3s", "3p", "3d")}
    exc = {k: (calc[k] - calc["3s"]) / (ref[k] - ref["3s"]) - 1 for k in ("4s", "4p", "5s")}
    ok = all(abs(v) <= 100.0 for v in dev.values()) and all(abs(v) <= 0.015 for v in exc.values())
    detail = ", ".join(f"{k} {v:+.1f} cm-1" for k, v in dev.items())
    detail += "; excitation " + ", ".join(f"{k} {100 * v:+.2f}%" for k, v in exc.items())
    report(7, ok, detail)


def test_criterion_08_mgh_constants(needs_mg, report, mg_scan):
    table, dt = mg_scan
    x = spectroscopic_constants(table, state="X")
    a = spectroscopic_constants(table, state="A")
    errs = [abs(x.Re / 3.095 - 1) / 0.01, abs(x.De / 16553 - 1) / 0.03, abs(x.omega_e / 1599 - 1) / 0.03,
            abs(a.Re / 3.79 - 1) / 0.01]
    ok = x.bound and a.bound and max(errs) <= 1.0 and dt < 1800.0 and not table.failures
    report(8, ok, f"X: Re {x.Re:.4f}, De {x.De:.0f} cm-1, we {x.omega_e:.1f} cm-1; A: Re {a.Re:.4f}; "
                  f"{len(table.R)}-point scan {dt:.0f} s, {len(table.failures)} failed points")


def test_criterion_09_polarizability_sum_rule(needs_mg, report):
    p = Point(mg_system(MG_ECP, R=50.0))
    res = compute_properties(p)
    mg = atom_polarizability(mg_system(MG_ECP, h_basis=None))
    h = atom_polarizability(atom_spec(load_basis("builtin:light_basis.txt", "H-mol"), label="H", charge=1.0))
    total = mg + h
    ep, eq = res.alpha_parallel / total - 1, res.alpha_perp / total - 1
    report(9, abs(ep) <= 0.015 and abs(eq) <= 0.015,
           f"alpha_par {res.alpha_parallel:.3f}, alpha_perp {res.alpha_perp:.3f} vs Mg+ {mg:.3f} + H {h:.3f}"
           f" = {total:.3f} ({100 * ep:+.2f}%, {100 * eq:+.2f}%)")


def test_criterion_10_ac_sign_change(needs_mg, report, mg_scan):
    table, _ = mg_scan
    R = table.R
    d = table.transition("A", "C", "z")
    flips = [R[i] - d[i] * (R[i + 1] - R[i]) / (d[i + 1] - d[i])
             for i in range(len(R) - 1) if np.sign(d[i]) * np.sign(d[i + 1]) < 0]
    xs = [rc for rc, _ in detect_avoided_crossings(table, states=("A", "C"))]
    ok = False
    if flips and xs:
        rf = min(flips, key=lambda r: abs(r - 6.0))
        rc = min(xs, key=lambda r: abs(r - rf))
        ok = abs(rf - 6.0) <= 0.5 and abs(rf - rc) <= 0.5
    report(10, ok, f"A-C tdm_z sign changes at R = {[round(float(r), 3) for r in flips]}; "
                   f"A/C avoided crossings at R = {[round(float(r), 3) for r in xs]}")
