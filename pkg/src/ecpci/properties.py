"""Finite-field dipole moments and static polarizabilities.

Energies are fitted to

    E(F) = E0 - mu F - alpha F^2 / 2 - beta F^3 / 6 - gamma4 F^4 / 24

along z (parallel) and x (perpendicular).  The field couples as
``+F . (r - O)`` per electron, so mu is the dipole about the origin O.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .basis import MoleculeSpec
from .ci import CIState, parse_block
from .pipeline import MAX_FIELD, Point, Settings

__all__ = [
    "DEFAULT_SCHEDULE",
    "FitError",
    "FieldFit",
    "PropertyResult",
    "fit_field_response",
    "symmetric_schedule",
    "finite_field_energy",
    "field_energies",
    "compute_properties",
    "atom_polarizability",
    "HellmannFeynmanReport",
    "hellmann_feynman_check",
]

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (8e-4, 4e-4, 2e-4)
RESIDUAL_THRESHOLD = 1e-10


class FitError(ValueError):
    """The field schedule cannot determine the response coefficients."""


@dataclass(frozen=True)
class FieldFit:
    e0: float
    mu: float
    alpha: float
    beta: float
    gamma4: float
    residual: float
    mu_inner: float
    alpha_inner: float
    fields: tuple
    energies: tuple

    @property
    def richardson(self) -> tuple:
        """(|mu - mu_inner|, |alpha - alpha_inner|) from the inner-half refit."""
        return abs(self.mu - self.mu_inner), abs(self.alpha - self.alpha_inner)


def symmetric_schedule(magnitudes=DEFAULT_SCHEDULE) -> np.ndarray:
    """Sorted fields -m..., 0, ...+m for the given magnitudes."""
    m = np.unique(np.abs(np.asarray(magnitudes, float)))
    m = m[m > 0]
    return np.concatenate([-m[::-1], [0.0], m])


def _poly_fit(F, E):
    s = np.abs(F).max()
    x = F / s
    deg = min(4, len(F) - 1)
    A = np.vander(x, deg + 1, increasing=True)
    if np.linalg.cond(A) > 1e10:
        raise FitError("field schedule gives an ill-conditioned fit")
    c, *_ = np.linalg.lstsq(A, E, rcond=None)
    c = np.concatenate([c, np.zeros(5 - len(c))])
    res = float(np.sqrt(np.mean((A @ c[: deg + 1] - E) ** 2)))
    scale = np.array([1.0, s, s**2, s**3, s**4])
    return c / scale, res


def fit_field_response(fields, energies) -> FieldFit:
    """Least-squares quartic fit of E(F) on a symmetric schedule (>= 5 points)."""
    F = np.asarray(fields, float)
    E = np.asarray(energies, float)
    if F.shape != E.shape or F.ndim != 1:
        raise FitError("fields and energies must be equal-length 1-D sequences")
    if len(F) < 5:
        raise FitError(f"need at least 5 field points, got {len(F)}")
    if np.abs(F).max() == 0.0:
        raise FitError("all fields are zero")
    if not np.allclose(np.sort(F), np.sort(-F), rtol=0, atol=1e-12 * np.abs(F).max()):
        raise FitError("field schedule is not symmetric about zero")
    if len(np.unique(F)) < 5:
        raise FitError("need at least 5 distinct field values")
    c, res = _poly_fit(F, E)
    inner = np.abs(F) <= 0.5 * np.abs(F).max() * (1 + 1e-12)
    if len(np.unique(F[inner])) >= 3:
        ci, _ = _poly_fit(F[inner], E[inner])
        mu_in, al_in = -ci[1], -2.0 * ci[2]
    else:
        mu_in, al_in = np.nan, np.nan
    return FieldFit(
        e0=float(c[0]), mu=float(-c[1]), alpha=float(-2.0 * c[2]), beta=float(-6.0 * c[3]),
        gamma4=float(-24.0 * c[4]), residual=res, mu_inner=float(mu_in), alpha_inner=float(al_in),
        fields=tuple(F.tolist()), energies=tuple(E.tolist()),
    )


# ------------------------------------------------------------- energies

def _as_point(system, R, settings):
    if isinstance(system, Point):
        if R is not None and abs(system.R - R) > 1e-12:
            raise ValueError(f"point is at R={system.R}, not {R}")
        return system
    return Point(system, R, settings)


def _target(point: Point, block, root: int, perpendicular: bool):
    """Block and root index that follow state (block, root) in the given field direction."""
    block = parse_block(block)
    if not perpendicular or block.lam is None:
        return block, root
    gen = point.general_block(block)
    state = point.solve(block, root + 1)[root]
    return gen, point.embed_root(state, gen, n_search=max(12, 3 * (root + 1)))


def finite_field_energy(system, R: float | None, field, block=None, root: int = 0,
                        settings: Settings | None = None) -> float:
    """Total energy of state (block, root) in a uniform field (clamped nuclei).

    ``system`` is a MoleculeSpec (a new point is built at R) or a Point.
    Perpendicular fields switch to the Lambda-mixing block that contains the
    state.
    """
    F = np.asarray(field, float)
    if F.shape != (3,):
        raise ValueError("field must be a 3-vector")
    if np.linalg.norm(F) > MAX_FIELD:
        raise ValueError(f"|F| = {np.linalg.norm(F):.3g} a.u. is outside the perturbative range (<= {MAX_FIELD})")
    point = _as_point(system, R, settings)
    block = point.default_block() if block is None else block
    blk, r = _target(point, block, root, bool(F[0] or F[1]))
    return point.energy(blk, r, field=F)


def field_energies(point: Point, block, root: int, axis: int, fields) -> np.ndarray:
    """Energies of one state for fields of the given values along ``axis`` (0, 1 or 2)."""
    blk, r = _target(point, block, root, axis != 2)
    out = []
    for f in fields:
        F = np.zeros(3)
        F[axis] = f
        out.append(point.energy(blk, r, field=F))
    return np.array(out)


# ------------------------------------------------------------ properties

@dataclass(frozen=True)
class PropertyResult:
    mu_z: float
    mu_x: float
    alpha_parallel: float
    alpha_perp: float
    alpha_mean: float
    gamma: float
    field_schedule: tuple
    fit_residual: float
    origin: tuple
    flagged: bool
    R: float = float("nan")
    block: str = ""
    root: int = 0
    fits: dict = field(default_factory=dict, repr=False)

    @staticmethod
    def combine(alpha_parallel, alpha_perp):
        """(mean, anisotropy) from the two tensor components."""
        return (alpha_parallel + 2.0 * alpha_perp) / 3.0, alpha_parallel - alpha_perp


def compute_properties(point: Point, block=None, root: int = 0, schedule=DEFAULT_SCHEDULE, *,
                       perpendicular: bool = True, residual_threshold: float = RESIDUAL_THRESHOLD) -> PropertyResult:
    """Finite-field mu_z, alpha_zz and (optionally) alpha_xx of one state."""
    block = point.default_block() if block is None else parse_block(block)
    F = symmetric_schedule(schedule)
    fz = fit_field_response(F, field_energies(point, block, root, 2, F))
    fits = {"z": fz}
    if perpendicular:
        fx = fit_field_response(F, field_energies(point, block, root, 0, F))
        fits["x"] = fx
        alpha_perp, mu_x = fx.alpha, fx.mu
    else:
        alpha_perp, mu_x = float("nan"), float("nan")
    mean, gamma = PropertyResult.combine(fz.alpha, alpha_perp)
    resid = max(f.residual for f in fits.values())
    flagged = resid > residual_threshold
    if flagged:
        log.warning("finite-field fit residual %.2e above %.1e at R=%.4f", resid, residual_threshold, point.R)
    return PropertyResult(
        mu_z=fz.mu, mu_x=mu_x, alpha_parallel=fz.alpha, alpha_perp=alpha_perp, alpha_mean=mean,
        gamma=gamma, field_schedule=tuple(float(x) for x in np.unique(np.abs(F[F != 0]))),
        fit_residual=resid, origin=tuple(float(x) for x in point.ints.origin), flagged=flagged,
        R=point.R, block=block.name, root=root, fits=fits,
    )


def atom_polarizability(spec: MoleculeSpec, schedule=DEFAULT_SCHEDULE, settings: Settings | None = None) -> float:
    """Static dipole polarizability of the ground state of a single-center system."""
    point = Point(spec, None, settings)
    return compute_properties(point, perpendicular=False, schedule=schedule).alpha_parallel


# -------------------------------------------------------- Hellmann-Feynman

@dataclass(frozen=True)
class HellmannFeynmanReport:
    R: float
    mu_finite_field: float
    mu_expectation: float
    discrepancy: float
    origin: tuple


def hellmann_feynman_check(system, R: float | None = None, block=None, root: int = 0,
                           schedule=DEFAULT_SCHEDULE, settings: Settings | None = None) -> HellmannFeynmanReport:
    """Compare the finite-field mu_z with the expectation-value dipole of the same state."""
    point = _as_point(system, R, settings)
    block = point.default_block() if block is None else parse_block(block)
    F = symmetric_schedule(schedule)
    fit = fit_field_response(F, field_energies(point, block, root, 2, F))
    state: CIState = point.solve(block, root + 1)[root]
    mu = float(point.dipole(state)[2])
    return HellmannFeynmanReport(point.R, fit.mu, mu, abs(fit.mu - mu), tuple(point.ints.origin.tolist()))
