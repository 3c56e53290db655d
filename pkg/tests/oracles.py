"""Independent reference implementations the test suite checks the engine against.

Everything here is deliberately written with a different method from the
engine: dense eigendecompositions instead of power iteration, explicit loops
instead of vectorized algebra, exact rational arithmetic instead of floats.
Agreement is then evidence, not tautology.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np


# -- matrix pipeline by direct formula ----------------------------------------

def rca_oracle(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, float)
    total = X.sum()
    out = np.zeros_like(X)
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            denom = X[i].sum() * X[:, j].sum()
            if denom > 0:
                out[i, j] = X[i, j] * total / denom
    return out


def proximity_oracle(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, int)
    n_act = M.shape[1]
    u = M.sum(axis=0)
    phi = np.zeros((n_act, n_act))
    for p in range(n_act):
        for q in range(n_act):
            if p == q:
                continue
            co = int((M[:, p] * M[:, q]).sum())
            phi[p, q] = co / max(u[p], u[q])
    return phi


def density_oracle(M: np.ndarray, phi: np.ndarray) -> np.ndarray:
    M = np.asarray(M, int)
    out = np.zeros((M.shape[0], M.shape[1]))
    for c in range(M.shape[0]):
        for p in range(M.shape[1]):
            denom = phi[p].sum()
            if denom > 0:
                out[c, p] = (M[c] * phi[p]).sum() / denom
    return out


# -- spectral scores by dense eigendecomposition ------------------------------

def _second_eigvec_dense(op: np.ndarray) -> tuple[np.ndarray, float]:
    """Eigenvector of the second-largest (real) eigenvalue of a dense operator."""
    lam, vec = np.linalg.eig(op)
    order = np.argsort(-lam.real)
    second = order[1]
    return vec[:, second].real, float(lam[second].real)


def _zscore_signed(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    z = (v - v.mean()) / v.std()
    r = np.corrcoef(z, reference)[0, 1] if reference.std() > 0 else np.nan
    if np.isfinite(r) and abs(r) > 1e-10:
        return -z if r < 0 else z
    k = int(np.nonzero(np.abs(z) > 1e-8 * np.max(np.abs(z)))[0][0])
    return -z if z[k] < 0 else z


def eci_pci_oracle(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """(eci, pci, second eigenvalue) from dense eigendecompositions.

    Location side: D^-1 M U^-1 M^T; activity side: U^-1 M^T D^-1 M. Signs are
    normalized exactly as documented by the engine: corr(ECI, diversity) >= 0,
    corr(PCI, mean ECI of holders) >= 0, max-|component|-positive fallback.
    """
    M = np.asarray(M, float)
    d = M.sum(axis=1)
    u = M.sum(axis=0)
    loc_op = np.diag(1 / d) @ M @ np.diag(1 / u) @ M.T
    act_op = np.diag(1 / u) @ M.T @ np.diag(1 / d) @ M
    v_loc, lam = _second_eigvec_dense(loc_op)
    v_act, _ = _second_eigvec_dense(act_op)
    eci = _zscore_signed(v_loc, d)
    pci = _zscore_signed(v_act, (M.T @ eci) / u)
    return eci, pci, lam


def eigengap_ok(M: np.ndarray, min_gap: float = 1e-6) -> bool:
    """True when the second eigenvalue is simple enough to define the scores.

    A (near-)repeated second eigenvalue makes the eigenvector — and hence the
    score — ill-posed for any implementation, so sweep generators screen on
    this before comparing engine and oracle.
    """
    M = np.asarray(M, float)
    d = M.sum(axis=1)
    u = M.sum(axis=0)
    for op in (
        np.diag(1 / d) @ M @ np.diag(1 / u) @ M.T,
        np.diag(1 / u) @ M.T @ np.diag(1 / d) @ M,
    ):
        lam = np.sort(np.linalg.eigvals(op).real)[::-1]
        if lam.size < 2:
            return False
        gaps = [abs(lam[1] - lam[0])]
        if lam.size > 2:
            gaps.append(abs(lam[1] - lam[2]))
        if min(gaps) < min_gap:
            return False
    return True


def fitness_oracle(M: np.ndarray, max_iters: int = 1000,
                   tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray, bool]:
    """Loop-coded fitness recursion on the engine's exact schedule."""
    M = np.asarray(M, int)
    n_loc, n_act = M.shape
    F = [1.0] * n_loc
    Q = [1.0] * n_act
    converged = False
    for _ in range(max_iters):
        Ft = [sum(M[c][p] * Q[p] for p in range(n_act)) for c in range(n_loc)]
        Qt = [1.0 / sum(M[c][p] / F[c] for c in range(n_loc)) for p in range(n_act)]
        fm = sum(Ft) / n_loc
        qm = sum(Qt) / n_act
        Fn = [x / fm for x in Ft]
        Qn = [x / qm for x in Qt]
        if not all(np.isfinite(Fn)) or not all(np.isfinite(Qn)):
            break
        residual = max(
            max(abs(a - b) / b for a, b in zip(Fn, F)),
            max(abs(a - b) / b for a, b in zip(Qn, Q)),
        )
        F, Q = Fn, Qn
        if residual <= tol:
            converged = True
            break
    return np.array(F), np.array(Q), converged


# -- dominance ----------------------------------------------------------------

def pareto_oracle(omega: np.ndarray, value: np.ndarray) -> np.ndarray:
    """O(n^2) dominance filter by full pairwise comparison."""
    omega = np.asarray(omega, float)[:, None]
    value = np.asarray(value, float)[:, None]
    ge = (omega.T >= omega) & (value.T >= value)
    gt = (omega.T > omega) | (value.T > value)
    dominated = (ge & gt).any(axis=1)
    return ~dominated


# -- strategy expectations in exact arithmetic --------------------------------

def _neighbors(edges) -> dict:
    adj: dict[str, set[str]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def greedy_expectation(edges, active) -> tuple[Fraction, list[str]]:
    """Exact expected time of the myopic policy (lowest-id tie-break)."""
    adj = _neighbors(edges)
    active = set(active)
    inactive = sorted(n for n in adj if n not in active)
    total = Fraction(0)
    plan = []
    while inactive:
        best, best_p = None, Fraction(-1)
        for n in inactive:  # ascending id; strict > keeps the lowest id on ties
            p = Fraction(len(adj[n] & active), len(adj[n]))
            if p > best_p:
                best, best_p = n, p
        if best_p <= 0:
            raise ValueError("stuck: no reachable inactive node")
        total += 1 / best_p
        plan.append(best)
        active.add(best)
        inactive.remove(best)
    return total, plan


def dp_expectation(edges, active) -> Fraction:
    """Exact optimal expected completion time by memoized subset recursion."""
    adj = _neighbors(edges)
    start = frozenset(active)
    inactive0 = frozenset(n for n in adj if n not in start)
    memo: dict[frozenset, Fraction] = {}

    def value(remaining: frozenset) -> Fraction:
        if not remaining:
            return Fraction(0)
        if remaining in memo:
            return memo[remaining]
        active_now = (set(adj) - set(remaining)) | start
        best = None
        for n in sorted(remaining):
            k = len(adj[n] & active_now)
            if k == 0:
                continue
            v = Fraction(len(adj[n]), k) + value(remaining - {n})
            if best is None or v < best:
                best = v
        if best is None:
            raise ValueError("stuck: no reachable inactive node")
        memo[remaining] = best
        return best

    return value(inactive0)


def pearson_oracle(a, b) -> float:
    return float(np.corrcoef(np.asarray(a, float), np.asarray(b, float))[0, 1])
