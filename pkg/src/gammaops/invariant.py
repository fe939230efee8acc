"""Complete unitary invariant for pure commuting pairs.

Two pure pairs are unitarily equivalent exactly when their adjoint-side
fundamental operators are unitarily equivalent and their characteristic
functions coincide.  This module is verification-first: a Witness carrying
the defect unitaries is checked against both halves of the invariant, and a
model-level confirmation is reported on success.  The witness search is a
labeled heuristic whose only conclusive negative is the trace-word screen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import matcore
from .charfn import CharFn, CoincidenceResult, coincide_check, theta_at, theta_coeffs
from .exceptions import DimensionMismatch, NotIntertwining, NotPure
from .fundamental import FundamentalPair, solve_fundamental
from .gamma_pair import GammaPair, is_pure
from .model import auto_truncation, model_operators, model_space

WITNESS_UNITARY_TOL = 1e-10
AMBIENT_INTERTWINE_TOL = 1e-8
FSTAR_MATCH_TOL = 1e-8
MODEL_CONFIRM_TOL = 1e-7
SCREEN_TOL = 1e-6
SCREEN_MAX_LEN = 6

VERDICT_EQUIVALENT = "EQUIVALENT"
VERDICT_NOT_EQUIVALENT = "NOT_EQUIVALENT"

SEARCH_FOUND = "FOUND"
SEARCH_NOT_FOUND = "NOT_FOUND"
SEARCH_DISTINCT = "DISTINCT"


def unitarity_defect(u: np.ndarray) -> float:
    """Two-sided deviation of u from unitarity in operator norm."""
    u = np.asarray(u, dtype=complex)
    if u.size == 0:
        return 0.0 if u.shape[0] == u.shape[1] else float("inf")
    if u.shape[0] != u.shape[1]:
        return float("inf")
    eye = np.eye(u.shape[0])
    return max(matcore.op_norm(matcore.dagger(u) @ u - eye),
               matcore.op_norm(u @ matcore.dagger(u) - eye))


@dataclass(frozen=True)
class Witness:
    """Defect unitaries asserting equivalence of two pairs.

    ``eta1`` intertwines the adjoint-side fundamental operators, ``sigma``
    and ``sigma_star`` realize the coincidence of characteristic functions.
    For witnesses induced by an ambient unitary the two adjoint-side maps
    agree, so ``sigma_star`` is ``eta1``; independently supplied witnesses
    may keep them distinct.  Every present matrix must be unitary.
    """

    eta1: np.ndarray
    sigma: np.ndarray
    sigma_star: np.ndarray
    u_ambient: np.ndarray | None = None

    def __post_init__(self):
        for field in ("eta1", "sigma", "sigma_star", "u_ambient"):
            m = getattr(self, field)
            if m is None:
                continue
            m = matcore.as_cmatrix(m, name=field)
            defect = unitarity_defect(m)
            if defect > WITNESS_UNITARY_TOL:
                raise ValueError(
                    f"witness matrix {field} is not unitary "
                    f"(defect {defect:.3e} > {WITNESS_UNITARY_TOL:.1e})")
            m.flags.writeable = False
            object.__setattr__(self, field, m)


def induced_defect_unitary(u, pair_a: GammaPair, pair_b: GammaPair,
                           which: str = "for_P",
                           fp_a: FundamentalPair | None = None,
                           fp_b: FundamentalPair | None = None,
                           tol: float = AMBIENT_INTERTWINE_TOL,
                           ) -> tuple[np.ndarray, dict]:
    """Restrict an ambient intertwining unitary to a defect space.

    Given unitary u with u S_A = S_B u and u P_A = P_B u, the compression
    V = Q_B* u Q_A to the chosen defect bases is again unitary, intertwines
    the defect operators, and conjugates the corresponding fundamental
    operator of A onto that of B.  All three facts are returned as measured
    residuals rather than assumed.
    """
    u = matcore.as_cmatrix(u, square=True, name="U")
    if pair_a.n != pair_b.n or u.shape[0] != pair_a.n:
        raise DimensionMismatch(
            f"ambient sizes disagree: U is {u.shape[0]}, pairs are "
            f"{pair_a.n} and {pair_b.n}")
    u_defect = unitarity_defect(u)
    if u_defect > tol:
        raise ValueError(f"ambient map is not unitary (defect {u_defect:.3e})")
    res_s = matcore.op_norm(u @ pair_a.s - pair_b.s @ u)
    res_p = matcore.op_norm(u @ pair_a.p - pair_b.p @ u)
    if (res_s > tol * (1.0 + matcore.op_norm(pair_a.s))
            or res_p > tol * (1.0 + matcore.op_norm(pair_a.p))):
        raise NotIntertwining(
            f"|US - S'U| = {res_s:.3e}, |UP - P'U| = {res_p:.3e} "
            f"exceed tolerance {tol:.1e}")
    if fp_a is None:
        fp_a = solve_fundamental(pair_a)
    if fp_b is None:
        fp_b = solve_fundamental(pair_b)
    da = fp_a.defect_p if which == "for_P" else fp_a.defect_p_star
    db = fp_b.defect_p if which == "for_P" else fp_b.defect_p_star
    fa = fp_a.f if which == "for_P" else fp_a.f_star
    fb = fp_b.f if which == "for_P" else fp_b.f_star
    v = matcore.dagger(db.basis.q) @ u @ da.basis.q
    rep_a = matcore.restrict(da.basis, da.d)
    rep_b = matcore.restrict(db.basis, db.d)
    conj = (matcore.fro_norm(v @ fa @ matcore.dagger(v) - fb)
            if v.shape[0] == v.shape[1] else float("inf"))
    residuals = {
        "unitarity": unitarity_defect(v),
        "defect_intertwine": (matcore.fro_norm(v @ rep_a - rep_b @ v)
                              if v.shape[0] == v.shape[1] else float("inf")),
        "conjugation": conj,
    }
    return v, residuals


def witness_from_ambient(u, pair_a: GammaPair, pair_b: GammaPair,
                         fp_a: FundamentalPair | None = None,
                         fp_b: FundamentalPair | None = None,
                         ) -> tuple[Witness, dict]:
    """Full witness induced by an ambient intertwining unitary.

    The adjoint-side restriction serves both as eta1 and as sigma_star;
    for ambient-induced witnesses these coincide exactly.
    """
    if fp_a is None:
        fp_a = solve_fundamental(pair_a)
    if fp_b is None:
        fp_b = solve_fundamental(pair_b)
    sigma, res_p = induced_defect_unitary(
        u, pair_a, pair_b, which="for_P", fp_a=fp_a, fp_b=fp_b)
    eta1, res_ps = induced_defect_unitary(
        u, pair_a, pair_b, which="for_P_star", fp_a=fp_a, fp_b=fp_b)
    witness = Witness(eta1=eta1, sigma=sigma, sigma_star=eta1,
                      u_ambient=matcore.as_cmatrix(u, square=True, name="U"))
    return witness, {"for_P": res_p, "for_P_star": res_ps}


@dataclass(frozen=True)
class EquivalenceReport:
    """Verdict with the residual ledger behind it.

    A NOT_EQUIVALENT verdict is conclusive only for structural mismatches
    (ambient dimension or defect ranks); residual failures may reflect a
    wrong witness rather than genuinely inequivalent pairs.
    """

    verdict: str
    conclusive: bool
    reason: str
    fstar_residual: float
    coincidence: CoincidenceResult | None
    model_confirmation: dict | None = None

    @property
    def equivalent(self) -> bool:
        return self.verdict == VERDICT_EQUIVALENT


def _structural_report(reason: str) -> EquivalenceReport:
    return EquivalenceReport(
        verdict=VERDICT_NOT_EQUIVALENT, conclusive=True, reason=reason,
        fstar_residual=float("inf"), coincidence=None)


def _model_confirmation(pair_a: GammaPair, pair_b: GammaPair,
                        fp_a: FundamentalPair, fp_b: FundamentalPair,
                        eta1: np.ndarray) -> dict:
    """Compression of I (x) eta1 between the two model spaces.

    For a true witness this compression is the unitary conjugating the model
    operators of A onto those of B, so its unitarity defect and conjugation
    residual certify equivalence end to end, not only at the defect level.
    """
    n_common = max(auto_truncation(pair_a.p), auto_truncation(pair_b.p))
    md_a = model_operators(pair_a, fp_a,
                           model_space(pair_a, n_common, complement=False))
    md_b = model_operators(pair_b, fp_b,
                           model_space(pair_b, n_common, complement=False))
    eta_full = np.kron(np.eye(n_common, dtype=complex), eta1)
    u_hat = matcore.dagger(md_b.model_basis.q) @ eta_full @ md_a.model_basis.q
    conj = max(
        matcore.fro_norm(u_hat @ md_a.s1 @ matcore.dagger(u_hat) - md_b.s1),
        matcore.fro_norm(u_hat @ md_a.p1 @ matcore.dagger(u_hat) - md_b.p1))
    return {
        "n_trunc": float(n_common),
        "unitarity": unitarity_defect(u_hat),
        "conjugation": conj,
    }


def verify_equivalence(pair_a: GammaPair, pair_b: GammaPair, w: Witness,
                       fp_a: FundamentalPair | None = None,
                       fp_b: FundamentalPair | None = None,
                       confirm_model: bool = True) -> EquivalenceReport:
    """Check a witness against both halves of the complete invariant.

    Verdict is EQUIVALENT exactly when eta1 intertwines the adjoint-side
    fundamental operators to 1e-8 and the characteristic functions coincide
    under (sigma, sigma_star) to 1e-8.  On success the model-level unitary
    induced by eta1 is constructed and its conjugation residual reported.
    """
    for label, pair in (("first", pair_a), ("second", pair_b)):
        if not is_pure(pair.p):
            raise NotPure(f"{label} pair is not pure; the invariant is "
                          "stated for pure pairs only")
    if pair_a.n != pair_b.n:
        return _structural_report(
            f"ambient dimensions differ: {pair_a.n} vs {pair_b.n}")
    if fp_a is None:
        fp_a = solve_fundamental(pair_a)
    if fp_b is None:
        fp_b = solve_fundamental(pair_b)
    ranks_a = (fp_a.defect_p.rank, fp_a.defect_p_star.rank)
    ranks_b = (fp_b.defect_p.rank, fp_b.defect_p_star.rank)
    if ranks_a != ranks_b:
        return _structural_report(
            f"defect ranks differ: {ranks_a} vs {ranks_b}")
    if w.eta1.shape != (ranks_b[1], ranks_a[1]):
        raise DimensionMismatch(
            f"eta1 has shape {w.eta1.shape}, expected "
            f"{(ranks_b[1], ranks_a[1])}")
    fstar_residual = matcore.fro_norm(
        w.eta1 @ fp_a.f_star - fp_b.f_star @ w.eta1)
    fstar_ok = fstar_residual <= FSTAR_MATCH_TOL * (
        1.0 + matcore.op_norm(fp_a.f_star))
    cf_a = theta_coeffs(pair_a.p, 1)
    cf_b = theta_coeffs(pair_b.p, 1)
    coincidence = coincide_check(cf_a, cf_b, w.sigma, w.sigma_star)
    if fstar_ok and coincidence.coincide:
        confirmation = None
        if confirm_model:
            confirmation = _model_confirmation(pair_a, pair_b,
                                               fp_a, fp_b, w.eta1)
        return EquivalenceReport(
            verdict=VERDICT_EQUIVALENT, conclusive=True,
            reason="both invariant halves hold",
            fstar_residual=fstar_residual, coincidence=coincidence,
            model_confirmation=confirmation)
    if not fstar_ok and not coincidence.coincide:
        reason = "fundamental operators and characteristic functions both fail"
    elif not fstar_ok:
        reason = "adjoint-side fundamental operators are not intertwined"
    else:
        reason = "characteristic functions do not coincide"
    return EquivalenceReport(
        verdict=VERDICT_NOT_EQUIVALENT, conclusive=False,
        reason=reason + " under this witness",
        fstar_residual=fstar_residual, coincidence=coincidence)


def _trace_words(m: np.ndarray, max_len: int) -> dict[str, complex]:
    """Traces of all words in m and its adjoint up to the given length."""
    letters = (m, matcore.dagger(m))
    out: dict[str, complex] = {}
    for length in range(1, max_len + 1):
        for word in itertools.product((0, 1), repeat=length):
            prod = letters[word[0]]
            for k in word[1:]:
                prod = prod @ letters[k]
            out["".join("ab"[k] for k in word)] = complex(np.trace(prod))
    return out


@dataclass(frozen=True)
class ScreenResult:
    """Outcome of the trace-word screen.

    ``mismatch`` True is conclusive: no unitary can relate the two pairs.
    ``worst_word`` spells the offending word, letter a for the operator and
    b for its adjoint, prefixed by which fundamental operator it is over.
    """

    max_gap: float
    mismatch: bool
    worst_word: str


def trace_word_screen(fp_a: FundamentalPair, fp_b: FundamentalPair,
                      max_len: int = SCREEN_MAX_LEN,
                      tol: float = SCREEN_TOL) -> ScreenResult:
    """Compare unitary-invariant trace words of the fundamental operators.

    Words in each operator and its adjoint up to ``max_len`` letters are
    invariant under unitary conjugation, so any gap beyond tolerance rules
    out equivalence conclusively.  Agreement proves nothing.
    """
    if (fp_a.f.shape != fp_b.f.shape
            or fp_a.f_star.shape != fp_b.f_star.shape):
        return ScreenResult(max_gap=float("inf"), mismatch=True,
                            worst_word="rank")
    max_gap, worst = 0.0, ""
    for tag, ma, mb in (("f:", fp_a.f, fp_b.f),
                        ("f_star:", fp_a.f_star, fp_b.f_star)):
        words_a = _trace_words(ma, max_len)
        words_b = _trace_words(mb, max_len)
        for word, ta in words_a.items():
            tb = words_b[word]
            gap = abs(ta - tb) / max(1.0, abs(ta), abs(tb))
            if gap > max_gap:
                max_gap, worst = gap, tag + word
    return ScreenResult(max_gap=max_gap, mismatch=max_gap > tol,
                        worst_word=worst)


def _intertwiner_starts(pair_a: GammaPair, pair_b: GammaPair,
                        count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Unitary polar factors of joint *-intertwiners of the two pairs.

    A unitary conjugator solves K X_A = X_B K for X in {S, P, S*, P*}; for
    any invertible K satisfying all four, K K* commutes with the second
    pair, so the polar factor is itself a conjugator.  The nullspace is
    sampled by basis vectors first, then random combinations.  Row-major
    vectorization: (A X).ravel() = kron(A, I) x, (X B).ravel() = kron(I, B.T) x.
    """
    n = pair_a.n
    eye = np.eye(n, dtype=complex)
    blocks = []
    for x_a, x_b in ((pair_a.s, pair_b.s), (pair_a.p, pair_b.p),
                     (matcore.dagger(pair_a.s), matcore.dagger(pair_b.s)),
                     (matcore.dagger(pair_a.p), matcore.dagger(pair_b.p))):
        blocks.append(np.kron(x_b, eye) - np.kron(eye, x_a.T))
    basis = scipy.linalg.null_space(np.vstack(blocks), rcond=1e-10)
    if basis.size == 0:
        return []
    dim = basis.shape[1]
    out: list[np.ndarray] = []
    for j in range(count):
        if j < dim:
            vec = basis[:, j]
        else:
            vec = basis @ (rng.standard_normal(dim)
                           + 1j * rng.standard_normal(dim))
        k_mat = vec.reshape(n, n)
        sv = np.linalg.svd(k_mat, compute_uv=False)
        if sv[-1] <= 1e-8 * max(float(sv[0]), 1e-300):
            continue
        out.append(matcore.polar_unitary(k_mat))
    return out


def _ambient_procrustes(pair_a: GammaPair, pair_b: GammaPair,
                        u0: np.ndarray, iters: int) -> np.ndarray:
    """Alternating polar iteration toward u S_A = S_B u, u P_A = P_B u."""
    sa, pa, sb, pb = pair_a.s, pair_a.p, pair_b.s, pair_b.p
    sa_h, pa_h = matcore.dagger(sa), matcore.dagger(pa)
    sb_h, pb_h = matcore.dagger(sb), matcore.dagger(pb)
    scale = 1.0 + matcore.op_norm(sa) + matcore.op_norm(pa)
    u = u0
    for _ in range(iters):
        m = (sb @ u @ sa_h + sb_h @ u @ sa
             + pb @ u @ pa_h + pb_h @ u @ pa)
        u_next = matcore.polar_unitary(m)
        if matcore.fro_norm(u_next - u) <= 1e-14 * scale:
            return u_next
        u = u_next
    return u


def _defect_alternation(fp_a: FundamentalPair, fp_b: FundamentalPair,
                        cf_a: CharFn, cf_b: CharFn,
                        sigma0: np.ndarray, eta0: np.ndarray,
                        iters: int, zs: np.ndarray,
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Alternating polar updates for (sigma, eta1) with sigma_star tied to eta1.

    Each step maximizes alignment of the fundamental-operator conjugation
    and of the characteristic-function samples, holding the other unknown
    fixed; both updates keep the iterates exactly unitary.
    """
    th_a = [theta_at(cf_a, z) for z in zs]
    th_b = [theta_at(cf_b, z) for z in zs]
    fa, fb = fp_a.f, fp_b.f
    fas, fbs = fp_a.f_star, fp_b.f_star
    sigma, eta = sigma0, eta0
    for _ in range(iters):
        m_eta = (fbs @ eta @ matcore.dagger(fas)
                 + matcore.dagger(fbs) @ eta @ fas)
        for ta, tb in zip(th_a, th_b):
            m_eta = m_eta + tb @ sigma @ matcore.dagger(ta)
        eta = matcore.polar_unitary(m_eta)
        m_sig = (fb @ sigma @ matcore.dagger(fa)
                 + matcore.dagger(fb) @ sigma @ fa)
        for ta, tb in zip(th_a, th_b):
            m_sig = m_sig + matcore.dagger(tb) @ eta @ ta
        sigma = matcore.polar_unitary(m_sig)
    return sigma, eta


@dataclass(frozen=True)
class SearchResult:
    """Outcome of the heuristic witness search.

    FOUND carries a witness that passed full verification.  DISTINCT means
    the trace screen or a structural mismatch ruled equivalence out, which
    is conclusive.  NOT_FOUND is inconclusive by design.
    """

    status: str
    witness: Witness | None
    report: EquivalenceReport | None
    screen: ScreenResult | None
    restarts_used: int


def _search_grid() -> np.ndarray:
    """Sample points for the coincidence alignment, radii by eight angles."""
    radii = np.array([0.3, 0.6, 0.9])
    angles = np.exp(2j * np.pi * np.arange(8) / 8)
    return np.outer(radii, angles).ravel()


def search_witness(pair_a: GammaPair, pair_b: GammaPair,
                   restarts: int = 20, iters: int = 150,
                   seed: int = 0) -> SearchResult:
    """Heuristic search for an equivalence witness.

    The conclusive trace screen runs first.  Candidates then come from two
    families: ambient alternating Procrustes iterations compressed to the
    defect spaces, and defect-level alternation on (sigma, eta1) directly.
    Every candidate must pass verify_equivalence before it is returned;
    restart order is deterministic for a given seed.
    """
    for label, pair in (("first", pair_a), ("second", pair_b)):
        if not is_pure(pair.p):
            raise NotPure(f"{label} pair is not pure; the invariant is "
                          "stated for pure pairs only")
    if pair_a.n != pair_b.n:
        return SearchResult(status=SEARCH_DISTINCT, witness=None, report=None,
                            screen=None, restarts_used=0)
    fp_a = solve_fundamental(pair_a)
    fp_b = solve_fundamental(pair_b)
    screen = trace_word_screen(fp_a, fp_b)
    if screen.mismatch:
        return SearchResult(status=SEARCH_DISTINCT, witness=None, report=None,
                            screen=screen, restarts_used=0)
    ranks_a = (fp_a.defect_p.rank, fp_a.defect_p_star.rank)
    ranks_b = (fp_b.defect_p.rank, fp_b.defect_p_star.rank)
    if ranks_a != ranks_b:
        return SearchResult(status=SEARCH_DISTINCT, witness=None, report=None,
                            screen=screen, restarts_used=0)

    rng = np.random.default_rng(seed)
    n = pair_a.n
    r, r_star = ranks_a
    cf_a = theta_coeffs(pair_a.p, 1)
    cf_b = theta_coeffs(pair_b.p, 1)
    zs = _search_grid()
    best_report: EquivalenceReport | None = None
    used = 0

    def gate(witness: Witness) -> EquivalenceReport:
        return verify_equivalence(pair_a, pair_b, witness,
                                  fp_a=fp_a, fp_b=fp_b, confirm_model=False)

    total = max(1, restarts)
    warm = _intertwiner_starts(pair_a, pair_b, min(4, total), rng)
    starts = warm[:total - 1] + [np.eye(n, dtype=complex)]
    for k in range(total):
        used = k + 1
        u0 = starts[k] if k < len(starts) else matcore.haar_unitary(n, rng)
        u = _ambient_procrustes(pair_a, pair_b, u0, iters)
        try:
            witness, _ = witness_from_ambient(u, pair_a, pair_b,
                                              fp_a=fp_a, fp_b=fp_b)
        except (NotIntertwining, ValueError):
            witness = None
        if witness is not None:
            report = gate(witness)
            if report.equivalent:
                final = verify_equivalence(pair_a, pair_b, witness,
                                           fp_a=fp_a, fp_b=fp_b)
                return SearchResult(status=SEARCH_FOUND, witness=witness,
                                    report=final, screen=screen,
                                    restarts_used=used)
            best_report = report

    for k in range(max(1, restarts)):
        used += 1
        if k == 0:
            sigma0 = np.eye(r, dtype=complex)
            eta0 = np.eye(r_star, dtype=complex)
        else:
            sigma0 = matcore.haar_unitary(r, rng)
            eta0 = matcore.haar_unitary(r_star, rng)
        sigma, eta = _defect_alternation(fp_a, fp_b, cf_a, cf_b,
                                         sigma0, eta0, iters, zs)
        try:
            witness = Witness(eta1=eta, sigma=sigma, sigma_star=eta)
        except ValueError:
            continue
        report = gate(witness)
        if report.equivalent:
            final = verify_equivalence(pair_a, pair_b, witness,
                                       fp_a=fp_a, fp_b=fp_b)
            return SearchResult(status=SEARCH_FOUND, witness=witness,
                                report=final, screen=screen,
                                restarts_used=used)
        if best_report is None:
            best_report = report

    return SearchResult(status=SEARCH_NOT_FOUND, witness=None,
                        report=best_report, screen=screen, restarts_used=used)
