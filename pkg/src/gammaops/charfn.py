"""Characteristic function of a contraction, restricted to defect bases.

Theta(z) = (-P + z D_P* (I - z P*)^(-1) D_P) restricted to Ran D_P, taking
values in maps Ran D_P -> Ran D_P*.  Taylor coefficients are Theta_0 = -P
and Theta_k = D_P* P*^(k-1) D_P for k >= 1, both compressed to the bases.
Two characteristic functions coincide when unitaries sigma, sigma_* between
the defect spaces satisfy sigma_* Theta_A(z) = Theta_B(z) sigma on the disc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .exceptions import OutsideLambdaP
from .fundamental import DefectData, defect_pair

#: sigma_min floor for I - z P* at evaluation points.
EVAL_FLOOR = 1e-12

#: Residual level declaring two characteristic functions coincident.
COINCIDE_TOL = 1e-8


@dataclass(frozen=True)
class CharFn:
    """Characteristic function data of a single contraction P."""

    p: np.ndarray
    defect_p: DefectData
    defect_p_star: DefectData
    coeffs: tuple[np.ndarray, ...]

    @property
    def basis_p(self) -> matcore.RangeBasis:
        return self.defect_p.basis

    @property
    def basis_p_star(self) -> matcore.RangeBasis:
        return self.defect_p_star.basis

    @property
    def rank_p(self) -> int:
        return self.defect_p.rank

    @property
    def rank_p_star(self) -> int:
        return self.defect_p_star.rank


def theta_coeffs(p, n_coeffs: int,
                 rel_tol: float = matcore.REL_RANK_TOL) -> CharFn:
    """Characteristic function with the first ``n_coeffs`` Taylor coefficients."""
    if n_coeffs < 1:
        raise ValueError("n_coeffs must be at least 1")
    p = matcore.as_cmatrix(p, square=True, name="P")
    dp, dps = defect_pair(p, rel_tol=rel_tol)
    q, q_star = dp.basis.q, dps.basis.q
    left = matcore.dagger(q_star) @ dps.d      # r* x n
    right = dp.d @ q                           # n x r
    coeffs = [-(matcore.dagger(q_star) @ p @ q)]
    p_star_pow = np.eye(p.shape[0], dtype=complex)
    for _ in range(1, n_coeffs):
        coeffs.append(left @ p_star_pow @ right)
        p_star_pow = p_star_pow @ matcore.dagger(p)
    return CharFn(p=p, defect_p=dp, defect_p_star=dps,
                  coeffs=tuple(coeffs))


def theta_at(cf: CharFn, z: complex) -> np.ndarray:
    """Evaluate Theta at z by a direct resolvent solve.

    Valid wherever I - z P* is numerically invertible, which extends past
    the closed disc whenever the spectrum of P permits.
    """
    z = complex(z)
    p = cf.p
    n = p.shape[0]
    m = np.eye(n, dtype=complex) - z * matcore.dagger(p)
    smin = float(np.linalg.svd(m, compute_uv=False)[-1]) if n else 1.0
    if smin <= EVAL_FLOOR:
        raise OutsideLambdaP(f"I - z P* has sigma_min = {smin:.3e} at z = {z}")
    core = -p + z * (cf.defect_p_star.d @ np.linalg.solve(m, cf.defect_p.d))
    return matcore.dagger(cf.basis_p_star.q) @ core @ cf.basis_p.q


def theta_series_at(cf: CharFn, z: complex) -> np.ndarray:
    """Partial Taylor sum at z, for resummation checks against theta_at."""
    z = complex(z)
    total = np.zeros((cf.rank_p_star, cf.rank_p), dtype=complex)
    for k, c in enumerate(cf.coeffs):
        total += (z ** k) * c
    return total


def toeplitz_mult(cf: CharFn, n_blocks: int) -> np.ndarray:
    """Truncated multiplication operator of Theta as a lower block Toeplitz matrix.

    Block (i, j) is Theta_{i-j} for i >= j, zero above, so column block j
    carries Theta_0 ... Theta_{n_blocks-1-j}.  Needs at least ``n_blocks``
    stored coefficients.
    """
    if n_blocks < 1:
        raise ValueError("n_blocks must be at least 1")
    if len(cf.coeffs) < n_blocks:
        raise ValueError(
            f"need {n_blocks} coefficients, have {len(cf.coeffs)}")
    r_star, r = cf.rank_p_star, cf.rank_p
    out = np.zeros((n_blocks * r_star, n_blocks * r), dtype=complex)
    for i in range(n_blocks):
        for j in range(i + 1):
            out[i * r_star:(i + 1) * r_star, j * r:(j + 1) * r] = cf.coeffs[i - j]
    return out


def kernel_identity_residual(cf: CharFn, zs, ws) -> float:
    """Max residual of the reproducing identity on given disc points.

    I - Theta(w) Theta(z)* = (1 - w conj(z)) D_P* (I - w P*)^(-1)
    (I - conj(z) P)^(-1) D_P*, compressed to the defect basis of P*.
    """
    p = cf.p
    n = p.shape[0]
    q_star = cf.basis_p_star.q
    d_star = cf.defect_p_star.d
    eye = np.eye(n, dtype=complex)
    worst = 0.0
    for z in np.atleast_1d(zs):
        rz = np.linalg.inv(eye - np.conj(complex(z)) * p)
        th_z = theta_at(cf, z)
        for w in np.atleast_1d(ws):
            rw = np.linalg.inv(eye - complex(w) * matcore.dagger(p))
            lhs = (np.eye(cf.rank_p_star, dtype=complex)
                   - theta_at(cf, w) @ matcore.dagger(th_z))
            rhs = ((1.0 - complex(w) * np.conj(complex(z)))
                   * matcore.dagger(q_star) @ d_star @ rw @ rz @ d_star @ q_star)
            worst = max(worst, matcore.fro_norm(lhs - rhs))
    return worst


def default_coincidence_grid() -> np.ndarray:
    """Default evaluation grid: radii 0, 0.3, 0.6, 0.9 by 16 angles."""
    radii = np.array([0.0, 0.3, 0.6, 0.9])
    angles = np.exp(2j * np.pi * np.arange(16) / 16)
    return np.unique(np.outer(radii, angles).ravel())


@dataclass(frozen=True)
class CoincidenceResult:
    """Outcome of a coincidence check between two characteristic functions."""

    max_residual: float
    ranks_match: bool

    @property
    def coincide(self) -> bool:
        return self.ranks_match and self.max_residual <= COINCIDE_TOL


def coincide_check(cf_a: CharFn, cf_b: CharFn, sigma: np.ndarray,
                   sigma_star: np.ndarray, grid=None) -> CoincidenceResult:
    """Max over the grid of |sigma_* Theta_A(z) - Theta_B(z) sigma|.

    The convention is sigma_* Theta_A(z) = Theta_B(z) sigma with sigma
    mapping the defect space of P_A to that of P_B (and sigma_* likewise on
    the adjoint side).  Mismatched defect ranks give an infinite residual
    with the flag cleared rather than an exception.
    """
    if cf_a.rank_p != cf_b.rank_p or cf_a.rank_p_star != cf_b.rank_p_star:
        return CoincidenceResult(max_residual=float("inf"), ranks_match=False)
    sigma = matcore.as_cmatrix(sigma, name="sigma")
    sigma_star = matcore.as_cmatrix(sigma_star, name="sigma_star")
    if (sigma.shape != (cf_b.rank_p, cf_a.rank_p)
            or sigma_star.shape != (cf_b.rank_p_star, cf_a.rank_p_star)):
        return CoincidenceResult(max_residual=float("inf"), ranks_match=False)
    if grid is None:
        grid = default_coincidence_grid()
    worst = 0.0
    for z in np.atleast_1d(grid):
        resid = matcore.op_norm(sigma_star @ theta_at(cf_a, z)
                                - theta_at(cf_b, z) @ sigma)
        worst = max(worst, resid)
    return CoincidenceResult(max_residual=worst, ranks_match=True)
