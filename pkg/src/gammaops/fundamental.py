"""Fundamental operators of a commuting pair via its defect spaces.

For a contraction P the defect operator is D_P = (I - P*P)^(1/2).  The
fundamental operator F is the solution, represented on an orthonormal basis
of the range of D_P, of

    S - S* P = D_P X D_P,

and F_* is the analogous solution for the adjoint pair (S*, P*).  For pairs
genuinely attached to the domain the solution exists, is unique on the
defect space and has numerical radius at most one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .exceptions import NotContraction, NumericalContractBreach
from .gamma_pair import CONTRACTION_TOL, GammaPair

#: Eigenvalue clamp used when forming defect Gramians; looser than the
#: global default because |P| may legitimately reach 1 + 1e-10.
DEFECT_EIG_CLAMP = 1e-9

#: The commuting-lift identity P D_P = D_P* P must hold to this accuracy.
DEFECT_INTERTWINE_TOL = 1e-9


@dataclass(frozen=True)
class DefectData:
    """Defect operator with an orthonormal basis of its range.

    ``which`` records the side: "for_P" carries D_P = (I - P*P)^(1/2),
    "for_P_star" carries D_P* = (I - PP*)^(1/2).
    """

    d: np.ndarray
    basis: matcore.RangeBasis
    which: str

    @property
    def rank(self) -> int:
        return self.basis.rank


def defect(p, which: str = "for_P",
           rel_tol: float = matcore.REL_RANK_TOL) -> DefectData:
    """Defect operator and range basis for a contraction."""
    if which not in ("for_P", "for_P_star"):
        raise ValueError(f"which must be 'for_P' or 'for_P_star', got {which!r}")
    p = matcore.as_cmatrix(p, square=True, name="P")
    norm_p = matcore.op_norm(p)
    if norm_p > 1.0 + CONTRACTION_TOL:
        raise NotContraction(f"|P| = {norm_p:.12g} exceeds 1")
    gram = (np.eye(p.shape[0]) - matcore.dagger(p) @ p if which == "for_P"
            else np.eye(p.shape[0]) - p @ matcore.dagger(p))
    # exact-arithmetic Hermitian; symmetrize so roundoff in a near-zero
    # Gramian (P close to unitary) cannot trip the relative check
    gram = 0.5 * (gram + matcore.dagger(gram))
    d = matcore.herm_sqrt_psd(gram, eig_clamp=DEFECT_EIG_CLAMP)
    return DefectData(d=d, basis=matcore.range_onb(d, rel_tol=rel_tol), which=which)


def defect_pair(p, rel_tol: float = matcore.REL_RANK_TOL
                ) -> tuple[DefectData, DefectData]:
    """Both defect operators, verifying the lift identity P D_P = D_P* P."""
    dp = defect(p, "for_P", rel_tol)
    dps = defect(p, "for_P_star", rel_tol)
    p = matcore.as_cmatrix(p, square=True, name="P")
    resid = matcore.fro_norm(p @ dp.d - dps.d @ p)
    if resid > DEFECT_INTERTWINE_TOL:
        raise NumericalContractBreach(
            f"|P D_P - D_P* P| = {resid:.3e} exceeds {DEFECT_INTERTWINE_TOL:.1e}")
    return dp, dps


@dataclass(frozen=True)
class FundamentalPair:
    """Fundamental operators of a pair, with solve residuals and radii.

    ``f`` is r x r on the basis of Ran D_P, ``f_star`` is r* x r* on the
    basis of Ran D_P*.  Residuals are Frobenius norms of the defining
    equations after reassembly; ``w_f`` and ``w_f_star`` are numerical radii.
    """

    f: np.ndarray
    f_star: np.ndarray
    residual_f: float
    residual_f_star: float
    w_f: float
    w_f_star: float
    defect_p: DefectData
    defect_p_star: DefectData


def _solve_side(s: np.ndarray, p: np.ndarray, dd: DefectData
                ) -> tuple[np.ndarray, float]:
    """Least-squares solution of S - S*P = A F A* with A = D restricted to its range."""
    rhs = s - matcore.dagger(s) @ p
    a = dd.d @ dd.basis.q
    if dd.rank == 0:
        return np.zeros((0, 0), dtype=complex), matcore.fro_norm(rhs)
    a_pinv = np.linalg.pinv(a)
    f = a_pinv @ rhs @ matcore.dagger(a_pinv)
    resid = matcore.fro_norm(a @ f @ matcore.dagger(a) - rhs)
    return f, resid


def solve_fundamental(pair: GammaPair,
                      rel_tol: float = matcore.REL_RANK_TOL) -> FundamentalPair:
    """Both fundamental operators of a validated pair.

    Rank-zero defects (P unitary) yield empty operators; the recorded
    residual is then the full norm of the left side, which must be about
    zero exactly when the pair has unitary structure.
    """
    dp, dps = defect_pair(pair.p, rel_tol=rel_tol)
    f, res_f = _solve_side(pair.s, pair.p, dp)
    f_star, res_fs = _solve_side(matcore.dagger(pair.s), matcore.dagger(pair.p), dps)
    return FundamentalPair(
        f=f, f_star=f_star,
        residual_f=res_f, residual_f_star=res_fs,
        w_f=matcore.numerical_radius(f),
        w_f_star=matcore.numerical_radius(f_star),
        defect_p=dp, defect_p_star=dps,
    )


def check_pf_intertwining(pair: GammaPair, fp: FundamentalPair) -> float:
    """Residual of P F = F_*^adj P on the defect space of P, ambient lifted.

    Returns |P F^ Pi - F_*^adj P Pi|_F where F^ and F_*^ are the ambient
    lifts and Pi projects onto Ran D_P.
    """
    f_amb = matcore.lift(fp.defect_p.basis, fp.f)
    fs_amb = matcore.lift(fp.defect_p_star.basis, fp.f_star)
    q = fp.defect_p.basis.q
    proj = q @ matcore.dagger(q)
    left = pair.p @ f_amb @ proj
    right = matcore.dagger(fs_amb) @ pair.p @ proj
    return matcore.fro_norm(left - right)


def scalar_fundamental(s: complex, p: complex) -> complex:
    """Closed form (s - conj(s) p) / (1 - |p|^2) for scalar pairs, |p| < 1."""
    return (s - np.conj(s) * p) / (1.0 - abs(p) ** 2)
