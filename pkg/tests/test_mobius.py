import numpy as np
import pytest

import gammaops as g
from gammaops import matcore
from gammaops.exceptions import SingularResolvent
from gammaops.gamma_domain import SymPoint


def _random_auto(rng, max_a=0.9):
    a = max_a * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    return g.DiscAutomorphism(a=a, beta=np.exp(2j * np.pi * rng.uniform()))


def test_transport_matches_scalar_action():
    rng = np.random.default_rng(10)
    for _ in range(50):
        z1 = 0.95 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        z2 = 0.95 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        pair = g.validate(np.array([[z1 + z2]]), np.array([[z1 * z2]]))
        m = _random_auto(rng)
        tau = g.transport_pair(pair, m)
        want = g.mobius_point(SymPoint(z1 + z2, z1 * z2), m)
        assert tau.s[0, 0] == pytest.approx(want.s, abs=1e-11)
        assert tau.p[0, 0] == pytest.approx(want.p, abs=1e-11)


def test_transport_moves_joint_spectrum():
    rng = np.random.default_rng(11)
    for _ in range(20):
        pair = g.random_pure_gamma(int(rng.integers(2, 6)),
                                   seed=int(rng.integers(1 << 30)))
        m = _random_auto(rng, max_a=0.8)
        tau = g.transport_pair(pair, m)
        assert tau.necessary_ok
        moved = sorted((g.mobius_point(pt, m) for pt in pair.joint_spectrum),
                       key=lambda q: (round(q.s.real, 7), round(q.s.imag, 7)))
        got = sorted(tau.joint_spectrum,
                     key=lambda q: (round(q.s.real, 7), round(q.s.imag, 7)))
        for a, b in zip(moved, got):
            assert abs(a.s - b.s) <= 1e-7 and abs(a.p - b.p) <= 1e-7


def test_transport_identity_automorphism():
    pair = g.random_pure_gamma(4, seed=40)
    ident = g.DiscAutomorphism(a=0.0, beta=1.0)
    tau = g.transport_pair(pair, ident)
    assert matcore.fro_norm(tau.s - pair.s) <= 1e-12
    assert matcore.fro_norm(tau.p - pair.p) <= 1e-12


def test_transport_group_property():
    # transporting by m then by a second automorphism equals one combined map
    rng = np.random.default_rng(12)
    pair = g.random_pure_gamma(3, seed=41)
    m1 = _random_auto(rng, max_a=0.5)
    m2 = _random_auto(rng, max_a=0.5)
    two_step = g.transport_pair(g.transport_pair(pair, m1), m2)
    back = g.transport_pair(g.transport_pair(two_step, m2.inverse()), m1.inverse())
    assert matcore.fro_norm(back.s - pair.s) <= 1e-9 * (1 + pair.norm_s)
    assert matcore.fro_norm(back.p - pair.p) <= 1e-9 * (1 + pair.norm_p)


def test_singular_resolvent_raises():
    # scalar pair with root exactly at 1/conj(a)
    a = 0.5
    s = np.array([[2.0 + 0.1]]); p = np.array([[0.2]])
    with pytest.raises(SingularResolvent):
        g.transport_pair(g.validate(s, p), g.DiscAutomorphism(a=a, beta=1.0))


def test_crosscheck_residuals_small():
    rng = np.random.default_rng(13)
    for k in range(30):
        pair = g.random_pure_gamma(1 + k % 5, seed=300 + k)
        m = _random_auto(rng, max_a=0.9)
        res = g.transport_crosscheck(pair, m)
        scale = 1.0 + matcore.op_norm(res.f_tau_direct)
        assert res.crosscheck_residual <= 1e-7 * scale
        assert res.x_identity_residual <= 1e-8 * (1.0 + pair.norm_p)
        assert res.u_unitarity_defect <= 1e-8


def test_crosscheck_scalar_closed_form():
    pair = g.validate(np.array([[1.0]]), np.array([[0.25]]))
    m = g.DiscAutomorphism(a=0.3, beta=1.0)
    res = g.transport_crosscheck(pair, m)
    s_t, p_t = res.pair_tau.s[0, 0], res.pair_tau.p[0, 0]
    want = g.scalar_fundamental(s_t, p_t)
    assert res.f_tau_closed[0, 0] == pytest.approx(want, abs=1e-12)
    assert res.f_tau_direct[0, 0] == pytest.approx(want, abs=1e-12)


def test_radius_bound_preserved():
    rng = np.random.default_rng(14)
    for k in range(15):
        pair = g.random_pure_gamma(1 + k % 4, seed=500 + k)
        m = _random_auto(rng, max_a=0.85)
        res = g.transport_crosscheck(pair, m)
        assert res.fp_tau.w_f <= 1.0 + 1e-8
        assert res.fp_tau.w_f_star <= 1.0 + 1e-8
