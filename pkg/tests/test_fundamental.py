import numpy as np
import pytest

import gammaops as g
from gammaops import matcore
from gammaops.exceptions import NotContraction


def _solve_residual_scale(pair):
    return 1e-9 * (1.0 + pair.norm_s)


def test_defect_basics():
    p = np.diag([0.6, 0.0]).astype(complex)
    dd = g.defect(p, "for_P")
    assert np.allclose(dd.d, np.diag([0.8, 1.0]), atol=1e-12)
    assert dd.rank == 2
    unit = g.defect(np.eye(3, dtype=complex), "for_P")
    assert unit.rank == 0
    assert matcore.fro_norm(unit.d) <= 1e-6
    with pytest.raises(ValueError):
        g.defect(p, "sideways")
    with pytest.raises(NotContraction):
        g.defect(1.2 * np.eye(2), "for_P")


def test_defect_pair_lift_identity():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        pair = g.random_pure_gamma(n, seed=int(rng.integers(1 << 30)))
        dp, dps = g.defect_pair(pair.p)
        assert matcore.fro_norm(pair.p @ dp.d - dps.d @ pair.p) <= 1e-9


def test_scalar_closed_form_frozen():
    assert g.scalar_fundamental(1.0, 0.25) == pytest.approx(0.8, abs=1e-15)
    assert g.scalar_fundamental(1.0, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_solver_matches_scalar_closed_form():
    rng = np.random.default_rng(9)
    for _ in range(100):
        z1 = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        z2 = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        s, p = z1 + z2, z1 * z2
        pair = g.validate(np.array([[s]]), np.array([[p]]))
        fp = g.solve_fundamental(pair)
        assert fp.f.shape == (1, 1)
        assert fp.f[0, 0] == pytest.approx(g.scalar_fundamental(s, p), abs=1e-12)
        assert fp.f_star[0, 0] == pytest.approx(
            g.scalar_fundamental(np.conj(s), np.conj(p)), abs=1e-12)


def test_solver_residuals_and_radius(corpus500):
    for pair, fp in corpus500[:120]:
        scale = _solve_residual_scale(pair)
        assert fp.residual_f <= scale
        assert fp.residual_f_star <= scale
        assert fp.w_f <= 1.0 + 1e-8
        assert fp.w_f_star <= 1.0 + 1e-8


def test_defining_equation_ambient(corpus500):
    # reassemble D_P F^ D_P against S - S*P in the ambient space
    for pair, fp in corpus500[:40]:
        f_amb = matcore.lift(fp.defect_p.basis, fp.f)
        lhs = fp.defect_p.d @ f_amb @ fp.defect_p.d
        rhs = pair.s - matcore.dagger(pair.s) @ pair.p
        assert matcore.fro_norm(lhs - rhs) <= 1e-8 * (1.0 + pair.norm_s)


def test_gamma_unitary_has_empty_defect():
    gu = g.random_gamma_unitary(3, seed=13)
    fp = g.solve_fundamental(gu)
    assert fp.f.shape == (0, 0) and fp.f_star.shape == (0, 0)
    # S = S*P exactly on gamma-unitaries, so the leftover residual vanishes
    assert fp.residual_f <= 1e-9 * (1.0 + gu.norm_s)
    assert fp.w_f == 0.0


def test_pf_intertwining(corpus500):
    for pair, fp in corpus500[:80]:
        assert g.check_pf_intertwining(pair, fp) <= 1e-8 * (1.0 + pair.norm_s)


def test_partial_isometry_defect_rank_drop():
    # P = 0.5 * shift has a rank deficient defect on one side only
    p = np.array([[0, 0.0], [0.5, 0]], dtype=complex)
    s = np.zeros((2, 2), dtype=complex)
    pair = g.validate(s, p)
    fp = g.solve_fundamental(pair)
    assert fp.defect_p.rank == 2 and fp.defect_p_star.rank == 2
    assert fp.residual_f <= 1e-12
