"""Core relatedness and complexity metrics on binary specialization matrices.

Pipeline: intensity matrix -> RCA -> binarized specialization matrix M ->
margins (diversity/ubiquity) -> activity proximity -> relatedness density,
plus two complexity families: spectral ECI/PCI and the iterative
fitness/Q-complexity recursion. Everything here is deterministic: repeated
runs on the same input are bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ActivityMatrix, _frozen
from .errors import ConvergenceError, DisconnectedSpecializationError

#: |corr| at or below this is treated as "no usable direction" for sign fixing.
_SIGN_CORR_EPS = 1e-10


@dataclass(frozen=True, eq=False)
class RcaMatrix:
    """Revealed-comparative-advantage ratios (scale invariant, >= 0)."""

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    period: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))


@dataclass(frozen=True, eq=False)
class SpecializationMatrix:
    """Binary location x activity matrix M (1 = specialized), with its threshold."""

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    period: str
    values: np.ndarray
    threshold: float = 1.0

    def __post_init__(self):
        v = np.ascontiguousarray(self.values)
        if not np.isin(v, (0, 1)).all():
            raise ValueError("specialization matrix entries must be 0/1")
        object.__setattr__(self, "values", _frozen(v, dtype=np.uint8))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpecializationMatrix)
            and self.locations == other.locations
            and self.activities == other.activities
            and self.period == other.period
            and np.array_equal(self.values, other.values)
        )

    def specialized_in(self, location: str) -> tuple[str, ...]:
        i = self.locations.index(location)
        return tuple(a for j, a in enumerate(self.activities) if self.values[i, j])


@dataclass(frozen=True, eq=False)
class Margins:
    """Row/column sums of M: diversity per location, ubiquity per activity."""

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    diversity: np.ndarray
    ubiquity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diversity", _frozen(self.diversity))
        object.__setattr__(self, "ubiquity", _frozen(self.ubiquity))


@dataclass(frozen=True, eq=False)
class ProximityNetwork:
    """Symmetric activity-activity proximity (co-occurrence / max ubiquity)."""

    activities: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Relatedness density: proximity-weighted share of each activity's neighborhood."""

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    def row(self, location: str) -> dict[str, float]:
        i = list(self.locations).index(location)
        return {a: float(self.values[i, j]) for j, a in enumerate(self.activities)}


@dataclass(frozen=True, eq=False)
class ComplexityScores:
    """Standardized spectral complexity: ECI per location, PCI per activity.

    ``sign_convention`` records which orientation rule fixed each sign:
    the primary rule correlates ECI with diversity (PCI with the mean ECI of
    its specialized locations); when that correlation is undefined or
    indistinguishable from zero, the first component of significant
    magnitude is made positive so results stay deterministic.
    """

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    eci: np.ndarray
    pci: np.ndarray
    sign_convention: tuple[str, str]
    second_eigenvalue_locations: float
    second_eigenvalue_activities: float

    def __post_init__(self):
        object.__setattr__(self, "eci", _frozen(self.eci))
        object.__setattr__(self, "pci", _frozen(self.pci))

    def eci_of(self, location: str) -> float:
        return float(self.eci[list(self.locations).index(location)])


@dataclass(frozen=True, eq=False)
class FitnessScores:
    """Iterative fitness (locations) and Q-complexity (activities), mean 1 each."""

    locations: tuple[str, ...]
    activities: tuple[str, ...]
    fitness: np.ndarray
    q: np.ndarray
    iterations: int
    residual: float
    converged: bool

    def __post_init__(self):
        object.__setattr__(self, "fitness", _frozen(self.fitness))
        object.__setattr__(self, "q", _frozen(self.q))


def rca(matrix: ActivityMatrix) -> RcaMatrix:
    """Balassa revealed comparative advantage.

    RCA[c, p] = (X[c,p] / sum_p X[c,p]) / (sum_c X[c,p] / sum_cp X[c,p]).
    Scale invariant: rca(lambda * X) == rca(X) for any lambda > 0.
    """
    X = matrix.values
    row = X.sum(axis=1, keepdims=True)
    col = X.sum(axis=0, keepdims=True)
    total = X.sum()
    if total == 0:
        raise ValueError("cannot compute RCA of an all-zero matrix")
    values = (X / row) / (col / total)
    return RcaMatrix(matrix.locations, matrix.activities, matrix.period, values)


def binarize(r: RcaMatrix, threshold: float = 1.0) -> SpecializationMatrix:
    """M[c, p] = 1 iff RCA[c, p] >= threshold (inclusive). threshold must be > 0."""
    if not threshold > 0:
        raise ValueError(f"rca threshold must be > 0, got {threshold}")
    return SpecializationMatrix(
        r.locations, r.activities, r.period,
        (r.values >= threshold).astype(np.uint8), threshold,
    )


def margins(m: SpecializationMatrix) -> Margins:
    M = m.values.astype(float)
    return Margins(m.locations, m.activities, M.sum(axis=1), M.sum(axis=0))


def proximity(m: SpecializationMatrix) -> ProximityNetwork:
    """phi[p, q] = co-occurrence count / max(ubiquity_p, ubiquity_q); diagonal 0."""
    M = m.values.astype(float)
    co = M.T @ M
    u = M.sum(axis=0)
    denom = np.maximum.outer(u, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(denom > 0, co / denom, 0.0)
    np.fill_diagonal(phi, 0.0)
    return ProximityNetwork(m.activities, phi)


def relatedness_density(m: SpecializationMatrix, phi: ProximityNetwork) -> DensityMatrix:
    """omega[c, p] = sum_q M[c,q] phi[p,q] / sum_q phi[p,q]; 0 where the row sum is 0."""
    if m.activities != phi.activities:
        raise ValueError("activity identifiers of matrix and proximity differ")
    M = m.values.astype(float)
    P = phi.values
    denom = P.sum(axis=1)
    num = M @ P  # phi symmetric: (M @ P)[c, p] = sum_q M[c,q] phi[q,p]
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(denom > 0, num / denom, 0.0)
    return DensityMatrix(m.locations, m.activities, omega)


def _bipartite_components(m: SpecializationMatrix):
    """Connected components of the location-activity occupancy graph."""
    M = m.values
    nloc, nact = M.shape
    seen_l = [False] * nloc
    seen_a = [False] * nact
    comps = []
    for start in range(nloc):
        if seen_l[start]:
            continue
        locs, acts, stack = [], [], [("L", start)]
        seen_l[start] = True
        while stack:
            side, idx = stack.pop()
            if side == "L":
                locs.append(idx)
                for j in np.nonzero(M[idx])[0]:
                    if not seen_a[j]:
                        seen_a[j] = True
                        stack.append(("A", int(j)))
            else:
                acts.append(idx)
                for i in np.nonzero(M[:, idx])[0]:
                    if not seen_l[i]:
                        seen_l[i] = True
                        stack.append(("L", int(i)))
        comps.append((
            tuple(m.locations[i] for i in sorted(locs)),
            tuple(m.activities[j] for j in sorted(acts)),
        ))
    # activities never touched by any location (all-zero columns)
    orphan = [j for j in range(nact) if not seen_a[j]]
    for j in orphan:
        comps.append(((), (m.activities[j],)))
    return comps


def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        return None
    r = float(((a - a.mean()) * (b - b.mean())).mean() / (sa * sb))
    return max(-1.0, min(1.0, r))  # guard against |r| > 1 float drift


def _orient(z: np.ndarray, reference: np.ndarray) -> tuple[np.ndarray, str]:
    """Fix the global sign of a standardized score vector deterministically.

    Primary rule: nonnegative correlation with the reference. When that
    correlation is numerically zero (antisymmetric structure) the fallback
    makes the first component of significant magnitude positive — an index
    rule, not a magnitude rule, because magnitudes come in exactly tied pairs
    in precisely these cases and argmax over them is float-noise roulette.
    """
    r = _pearson(z, reference)
    if r is not None and abs(r) > _SIGN_CORR_EPS:
        if r < 0:
            return -z, "corr-with-reference >= 0 (flipped)"
        return z, "corr-with-reference >= 0"
    significant = np.nonzero(np.abs(z) > 1e-8 * np.max(np.abs(z)))[0]
    k = int(significant[0])
    if z[k] < 0:
        return -z, "reference direction undefined; first-significant-component > 0 (flipped)"
    return z, "reference direction undefined; first-significant-component > 0"


def _zscore(v: np.ndarray) -> np.ndarray:
    s = v.std()
    if s == 0:
        raise ValueError("cannot standardize a constant score vector")
    return (v - v.mean()) / s


def _second_eigenpair(sym: np.ndarray, weights: np.ndarray,
                      tol: float) -> tuple[np.ndarray, float]:
    """Second-largest eigenpair of W^-1 S via its symmetric similar form.

    W^-1 S is row stochastic and similar to A = W^-1/2 S W^-1/2, which is
    symmetric: a full symmetric eigendecomposition is exact, deterministic
    for fixed input bits, and — unlike iterative schemes started from any
    fixed vector — cannot get trapped in an invariant subspace on
    structurally symmetric instances (e.g. mirrored duplicate locations,
    where a ramp start is exactly antisymmetric and power iteration
    converges to a spurious interior eigenvector). The returned vector is
    for W^-1 S (i.e. W^-1/2 y); the eigenpair residual is verified
    against ``tol``.
    """
    sq = np.sqrt(weights)
    A = sym / np.outer(sq, sq)
    try:
        lam, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigendecomposition failed: {exc}") from exc
    y = vecs[:, -2]  # eigh sorts ascending; -1 is the stochastic lead (lambda = 1)
    lam2 = float(lam[-2])
    resid = float(np.linalg.norm(A @ y - lam2 * y, ord=np.inf))
    if resid > tol:
        raise ConvergenceError(
            f"second eigenpair residual {resid:.3e} exceeds tol={tol}"
        )
    return y / sq, lam2


def eci_pci(m: SpecializationMatrix, *, tol: float = 1e-12) -> ComplexityScores:
    """Spectral complexity scores.

    ECI is the z-scored eigenvector for the second-largest eigenvalue of
    D^-1 M U^-1 M^T (D = diag(diversity), U = diag(ubiquity)); PCI is the dual
    construction on activities. Signs: corr(ECI, diversity) >= 0 and
    corr(PCI, mean ECI of each activity's specialized locations) >= 0.

    Raises DisconnectedSpecializationError when the occupancy graph has more
    than one component (the second eigenvalue is then degenerate and
    cross-component comparisons are meaningless).
    """
    M = m.values.astype(float)
    nloc, nact = M.shape
    if nloc < 2 or nact < 2:
        raise ValueError("need at least 2 locations and 2 activities for spectral scores")
    d = M.sum(axis=1)
    u = M.sum(axis=0)
    if (d == 0).any() or (u == 0).any():
        raise ValueError("zero-diversity rows / zero-ubiquity columns are not allowed")
    comps = _bipartite_components(m)
    if len(comps) > 1:
        raise DisconnectedSpecializationError(comps)

    s_loc = (M / u[None, :]) @ M.T           # S[c,c'] = sum_p M_cp M_c'p / u_p
    raw_eci, lam_loc = _second_eigenpair(s_loc, d, tol)
    eci, rule_eci = _orient(_zscore(raw_eci), d)

    s_act = (M.T / d[None, :]) @ M           # S[p,q] = sum_c M_cp M_cq / d_c
    raw_pci, lam_act = _second_eigenpair(s_act, u, tol)
    mean_eci_of_holders = (M.T @ eci) / u
    pci, rule_pci = _orient(_zscore(raw_pci), mean_eci_of_holders)

    return ComplexityScores(
        m.locations, m.activities, eci, pci,
        sign_convention=(f"eci: {rule_eci}", f"pci: {rule_pci}"),
        second_eigenvalue_locations=lam_loc,
        second_eigenvalue_activities=lam_act,
    )


def fitness_complexity(m: SpecializationMatrix, *, max_iters: int = 1000,
                       tol: float = 1e-9) -> FitnessScores:
    """Iterative fitness / Q-complexity fixed point.

    Updates (simultaneous, from the previous iterate, starting from ones):
        F~_c = sum_p M[c,p] Q_p          then mean-normalized
        Q~_p = 1 / sum_c M[c,p] (1/F_c)  then mean-normalized
    Stops when the max relative change of both vectors is <= tol. Some
    matrices never converge (scores collapse toward 0 on a geometric path);
    that is reported via ``converged=False``, never raised.

    Requires a matrix with no zero rows or columns (the fixed point is
    undefined otherwise).
    """
    M = m.values.astype(float)
    if (M.sum(axis=1) == 0).any() or (M.sum(axis=0) == 0).any():
        raise ValueError("fitness iteration requires no zero rows/columns")
    F = np.ones(M.shape[0])
    Q = np.ones(M.shape[1])
    residual = np.inf
    iterations = 0
    # In exact arithmetic both iterates stay strictly positive; the floor only
    # repairs float underflow on geometric-collapse paths, where the overflow
    # of intermediate reciprocals is likewise benign (1/inf -> 0 -> floored).
    tiny = np.finfo(float).tiny
    for iterations in range(1, max_iters + 1):
        with np.errstate(over="ignore"):
            Qt = np.maximum(1.0 / (M.T @ (1.0 / F)), tiny)
            Ft = M @ Q
            Fn = np.maximum(Ft / Ft.mean(), tiny)
            Qn = np.maximum(Qt / Qt.mean(), tiny)
            residual = float(max(
                np.max(np.abs(Fn - F) / F),
                np.max(np.abs(Qn - Q) / Q),
            ))
        F, Q = Fn, Qn
        if residual <= tol:
            break
    return FitnessScores(
        m.locations, m.activities, F, Q,
        iterations=iterations, residual=residual, converged=residual <= tol,
    )
