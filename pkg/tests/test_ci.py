import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_blocks, block_spectrum, brute_spectrum, small_spec
from ecpci.ci import (
    Block,
    CIError,
    brute_force_hamiltonian,
    build_hamiltonian,
    cisd_energies,
    davidson,
    diagonalize,
    enumerate_determinants,
    parse_block,
    transition_dipole,
)
from ecpci.pipeline import Point, Settings


@pytest.fixture(scope="module", params=["heh", "h2", "core"])
def point(request):
    return Point(small_spec(request.param, 1.5 if request.param != "core" else 2.8))


@pytest.mark.parametrize(
    "text, block",
    [
        ("1Sigma+", Block(1, 0, 1)),
        ("3sigma-", Block(3, 0, -1)),
        ("1Pi", Block(1, 1, 0)),
        ("3Delta", Block(3, 2, 0)),
        ("2Sigma+", Block(2, 0, 1)),
        ("1any+", Block(1, None, 1)),
        ("3any", Block(3, None, 0)),
    ],
)
def test_parse_block(text, block):
    assert parse_block(text) == block
    assert parse_block(block.name) == block


@pytest.mark.parametrize("text", ["1Sigma", "4Sigma+", "1Pi+", "Sigma+", "1Gamma", ""])
def test_parse_block_rejects(text):
    with pytest.raises(CIError):
        parse_block(text)


def test_block_dimensions_add_up(point):
    n = point.mos.nmo
    singlets = sum(point.basis(b).size * d for b, d in all_blocks(point) if b.multiplicity == 1)
    triplets = sum(point.basis(b).size * d // 3 for b, d in all_blocks(point) if b.multiplicity == 3)
    assert singlets == n * (n + 1) // 2
    assert triplets == n * (n - 1) // 2
    assert point.basis("1any+").size + point.basis("1any-").size == n * (n + 1) // 2


def test_block_fci_equals_brute_force(point):
    assert np.abs(block_spectrum(point) - brute_spectrum(point)).max() < 1e-10


def test_brute_force_counts():
    h = np.diag([0.0, 1.0, 2.0])
    eri = np.zeros((3,) * 4)
    H, dets = brute_force_hamiltonian(h, eri)
    assert len(dets) == 15
    # non-interacting: energies are sums of two orbital energies over spin orbitals
    expect = sorted(a + b for i, a in enumerate(np.repeat([0.0, 1.0, 2.0], 2))
                    for j, b in enumerate(np.repeat([0.0, 1.0, 2.0], 2)) if i < j)
    assert np.allclose(np.linalg.eigvalsh(H), expect)


def test_cisd_equals_fci_for_two_electrons(point):
    e_cisd = cisd_energies(point.h_mo, point.eri_mo, n_roots=6)
    assert np.abs(e_cisd - brute_spectrum(point)[:6]).max() < 1e-10


def test_rhf_above_fci(point):
    p = Point(point.spec, settings=Settings(orbitals="rhf"))
    e_fci = p.energy("1Sigma+")
    assert p.rhf_result.energy >= e_fci - 1e-12
    # the CI is complete in the orbital span: orbital choice does not matter
    assert e_fci == pytest.approx(point.energy("1Sigma+"), abs=1e-10)


def test_orbital_rotation_invariance(point, rng):
    n = point.mos.nmo
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    h = U.T @ point.h_mo @ U
    g = np.einsum("pqrs,pi,qj,rk,sl->ijkl", point.eri_mo, U, U, U, U, optimize=True)
    H, _ = brute_force_hamiltonian(h, g)
    assert np.abs(np.linalg.eigvalsh(H) - brute_spectrum(point)).max() < 1e-10


def test_interlacing_when_orbitals_are_added(point):
    """Removing an orbital deletes determinants: a principal submatrix, so eigenvalues interlace."""
    n = point.mos.nmo
    full = brute_spectrum(point)
    h, g = point.h_mo, point.eri_mo
    for k in (n - 1, n - 3):
        H, dets = brute_force_hamiltonian(h[:k, :k], g[:k, :k, :k, :k])
        sub = np.linalg.eigvalsh(H)
        m = len(full) - len(sub)
        assert np.all(full[: len(sub)] <= sub + 1e-12)
        assert np.all(sub <= full[m:] + 1e-12)


def test_davidson_matches_dense(heh_point):
    H = heh_point.hamiltonian("1any+")
    H = H[:300, :300]
    assert H.shape == (300, 300)
    e_dense = np.linalg.eigvalsh(H)[:4]
    e_dav, X = davidson(H, 4, tol=1e-10)
    assert np.abs(e_dav - e_dense).max() < 1e-10
    assert np.abs(H @ X - X * e_dav).max() < 1e-9


def test_davidson_matvec_operator(rng):
    """Any object with @ and diagonal() works."""
    A = rng.standard_normal((120, 120))
    A = A + A.T + np.diag(np.arange(120.0) * 3)

    class Op:
        shape = A.shape

        def __matmul__(self, v):
            return A @ v

        def diagonal(self):
            return np.diag(A)

    e, _ = davidson(Op(), 2, tol=1e-10)
    assert np.allclose(e, np.linalg.eigvalsh(A)[:2], atol=1e-9)


def test_diagonalize_methods_agree(heh_point):
    H = heh_point.hamiltonian("1Sigma+")
    b = heh_point.basis("1Sigma+")
    dense = diagonalize(H, 3, basis=b, method="dense")
    dav = diagonalize(H, 3, basis=b, method="davidson", tol=1e-10)
    for x, y in zip(dense, dav):
        assert x.energy == pytest.approx(y.energy, abs=1e-10)
        assert abs(x.vector @ y.vector) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(CIError):
        diagonalize(H + np.triu(np.ones_like(H), 1), 1)


def test_pi_block_states_are_degenerate_pairs(heh_point):
    """The Lambda = 1 states appear twice in the general (no axial symmetry) block."""
    e_pi = heh_point.solve("1Pi", 2)
    e_any = [s.energy for s in heh_point.solve("1any", 12)]
    for s in e_pi:
        close = [e for e in e_any if abs(e - s.energy) < 1e-9]
        assert len(close) == 2


def test_singlet_triplet_and_symmetry_selection_rules(heh_point):
    p = heh_point
    x0, x1 = p.solve("1Sigma+", 2)
    pi = p.solve("1Pi", 1)[0]
    sm = p.solve("1Sigma-", 1)[0]
    t = p.solve("3Sigma+", 1)[0]
    # Sigma+ - Sigma+: parallel only
    d = p.transition(x0, x1)
    assert abs(d[0]) < 1e-12 and abs(d[1]) < 1e-12 and abs(d[2]) > 1e-4
    # Sigma+ - Pi(cos component): perpendicular (x) only
    d = p.transition(x0, pi)
    assert abs(d[2]) < 1e-12 and abs(d[1]) < 1e-12 and abs(d[0]) > 1e-4
    # Sigma+ - Sigma-: forbidden
    assert np.abs(p.transition(x0, sm)).max() < 1e-12
    # spin-forbidden
    assert np.abs(p.transition(x0, t)).max() == 0.0
    # permanent dipoles: Sigma along z only, Pi has no perpendicular part
    assert np.abs(p.dipole(x0)[:2]).max() < 1e-12
    assert np.abs(p.dipole(pi)[:2]).max() == 0.0


def test_transition_dipole_symmetric(heh_point):
    a, b = heh_point.solve("1Sigma+", 2)
    g = heh_point.g_mo
    assert np.allclose(transition_dipole(a, b, g), transition_dipole(b, a, g), atol=1e-14)


def test_one_electron_blocks():
    from conftest import h_atom

    p = Point(h_atom("H-s12pd"))
    s = p.solve("2Sigma+", 2)
    e_mo = np.sort(p.mos.orbital_energies[(p.mos.m_labels == 0) & (p.mos.parity_labels == 1)])
    assert [x.energy for x in s] == pytest.approx(list(e_mo[:2]), abs=1e-10)
    with pytest.raises(CIError):
        p.basis("1Sigma+")


def test_enumerate_requires_symmetry_labels(heh_point):
    from dataclasses import replace

    mos = replace(heh_point.mos, m_labels=-np.ones_like(heh_point.mos.m_labels))
    with pytest.raises(CIError):
        enumerate_determinants(mos, "1Pi")


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10_000))
def test_random_integrals_block_vs_brute(n, seed):
    """Random symmetric integrals over sigma orbitals: block singlet+triplet spectrum = brute force."""
    from ecpci.scf import MOSet

    r = np.random.default_rng(seed)
    h = r.standard_normal((n, n))
    h = h + h.T
    g = r.standard_normal((n,) * 4)
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    mos = MOSet(np.eye(n), np.zeros(n), np.zeros(n, int), np.ones(n, int), -np.ones(n, int))
    vals = []
    for mult in (1, 3):
        b = enumerate_determinants(mos, Block(mult, 0, 1))
        if b.size:
            vals += list(np.repeat(np.linalg.eigvalsh(build_hamiltonian(b, h, g)), mult))
    H, _ = brute_force_hamiltonian(h, g)
    assert np.allclose(np.sort(vals), np.linalg.eigvalsh(H), atol=1e-10)
