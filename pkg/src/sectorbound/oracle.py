"""Constructive reference oracles backing the multiplier theory.

This module turns the constructive arguments behind the multiplier classes
into executable checks: the extreme piecewise-linear sector map and the
two-way translation between its incremental pairs and sector input/output
pairs, quadratic-constraint evaluation, exact copositivity testing by
simplex partitioning, the ordinary-copositivity (PSD + nonnegative)
decomposition, and the repeated-nonlinearity counterexample construction.
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    SectorViolation,
    SolverFailure,
    WitnessNotStrict,
)
from . import sdp
from .sdp import ProgramBuilder, SolverOptions
from .symmetric import SymMatrix, svec, tri_len
from .system import Sector


def f_ab(sector: Sector, x: float) -> float:
    """Extreme sector map: alpha*x for x <= 0, beta*x for x > 0."""
    return sector.alpha * x if x <= 0.0 else sector.beta * x


def f_ab_vec(sector: Sector, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, sector.beta * x, sector.alpha * x)


@dataclasses.dataclass(frozen=True)
class IncrementalPair:
    """Two points on the graph of the repeated extreme map, stored with the
    sector that generated them."""

    sector: Sector
    vbar: np.ndarray
    vhat: np.ndarray
    wbar: np.ndarray
    what: np.ndarray

    def __post_init__(self):
        for name in ("vbar", "vhat", "wbar", "what"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, arr)
        if not (self.vbar.shape == self.vhat.shape == self.wbar.shape
                == self.what.shape):
            raise DimensionMismatch("incremental pair arrays differ in length")
        scale = 1.0 + max(np.abs(self.vbar).max(initial=0.0),
                          np.abs(self.vhat).max(initial=0.0))
        if np.max(np.abs(self.wbar - f_ab_vec(self.sector, self.vbar))) > 1e-12 * scale \
                or np.max(np.abs(self.what - f_ab_vec(self.sector, self.vhat))) > 1e-12 * scale:
            raise SectorViolation("pair does not lie on the extreme map graph")

    @classmethod
    def from_inputs(cls, sector: Sector, vbar, vhat) -> "IncrementalPair":
        vbar = np.atleast_1d(np.asarray(vbar, dtype=float))
        vhat = np.atleast_1d(np.asarray(vhat, dtype=float))
        return cls(sector, vbar, vhat, f_ab_vec(sector, vbar),
                   f_ab_vec(sector, vhat))

    @property
    def m(self) -> int:
        return len(self.vbar)

    @property
    def dv(self) -> np.ndarray:
        return self.vbar - self.vhat

    @property
    def dw(self) -> np.ndarray:
        return self.wbar - self.what


def increments_to_sector(pair: IncrementalPair, sector: Sector) -> np.ndarray:
    """Per-channel slopes g with dw = diag(g) dv and g in [alpha, beta];
    channels with dv = 0 get the sector center."""
    dv, dw = pair.dv, pair.dw
    g = np.full(pair.m, sector.c)
    nz = dv != 0.0
    g[nz] = dw[nz] / dv[nz]
    return g


def _check_sector_pair(v, w, sector: Sector, tol: float = 1e-9):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if v.shape != w.shape:
        raise DimensionMismatch("v and w differ in length")
    scale = 1.0 + max(1.0, np.abs(v).max(initial=0.0)) ** 2 * max(
        1.0, abs(sector.alpha), abs(sector.beta)
    ) ** 2
    prod = (w - sector.alpha * v) * (sector.beta * v - w)
    if np.min(prod, initial=0.0) < -tol * scale:
        raise SectorViolation(
            f"pair violates the sector inequality (min product {prod.min():.3e})"
        )
    return v, w


def sector_to_increments(v, w, sector: Sector) -> IncrementalPair:
    """Represent a sector input/output pair as an increment of the extreme
    map: returns a pair with dv = v and dw = w (to rounding).

    Degenerate sectors (alpha = beta) use the shifted construction
    vbar = 1 + v, vhat = 1.
    """
    v, w = _check_sector_pair(v, w, sector)
    a, b = sector.alpha, sector.beta
    if sector.degenerate:
        vbar = 1.0 + v
        vhat = np.ones_like(v)
        return IncrementalPair.from_inputs(sector, vbar, vhat)
    span = b - a
    g = np.full(len(v), sector.c)
    nz = v != 0.0
    g[nz] = w[nz] / v[nz]
    g = np.clip(g, a, b)
    vbar = np.where(v >= 0.0, (g - a) / span * v, (b - g) / span * v)
    vhat = np.where(v >= 0.0, (g - b) / span * v, (a - g) / span * v)
    return IncrementalPair.from_inputs(sector, vbar, vhat)


def qc_value(M: SymMatrix, v, w) -> float:
    """Quadratic form [v; w]' M [v; w]."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    z = np.concatenate([v, w])
    if M.n != len(z):
        raise DimensionMismatch(f"M is {M.n}x{M.n}, vector has length {len(z)}")
    return float(z @ M.mat @ z)


def gamma_from_io(v, w, sector: Sector) -> np.ndarray:
    """Diagonal slopes with w = diag(g) v: w_i/v_i where v_i != 0, the sector
    center otherwise; raises on sector violation."""
    v, w = _check_sector_pair(v, w, sector)
    g = np.full(len(v), sector.c)
    nz = v != 0.0
    g[nz] = w[nz] / v[nz]
    return np.clip(g, sector.alpha, sector.beta)


# ---------------------------------------------------------------------------
# copositivity oracles


class CopositivityVerdict(enum.Enum):
    COPOSITIVE = "Copositive"
    NOT_COPOSITIVE = "NotCopositive"
    INDETERMINATE = "Indeterminate"


@dataclasses.dataclass
class CopositivityResult:
    verdict: CopositivityVerdict
    witness: np.ndarray | None
    witness_value: float | None
    nodes: int

    @property
    def is_copositive(self) -> bool:
        if self.verdict is CopositivityVerdict.INDETERMINATE:
            raise BudgetExceeded("copositivity search exhausted its budget")
        return self.verdict is CopositivityVerdict.COPOSITIVE


def copositive_bruteforce(
    A: np.ndarray,
    tol: float | None = None,
    budget: int = 1_000_000,
) -> CopositivityResult:
    """Exact copositivity test by simplex partitioning.

    Minimizes x'Ax over the standard simplex with convex-envelope lower
    bounds (min of the vertex Gram matrix) and edge bisection, depth-first
    with the better-bound child explored first.  Returns a witness with
    x'Ax < -tol on failure; exceeding the node budget yields INDETERMINATE
    rather than a wrong verdict.
    """
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    if n > 10:
        raise DimensionMismatch("brute-force oracle is limited to order <= 10")
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.linalg.norm(A)))
    iu, ju = np.triu_indices(n, k=1)

    def best_edge_point(V, B):
        """Best candidate value on vertices and edges of the cell, and the
        simplex point achieving it."""
        d = np.diag(B)
        k = int(np.argmin(d))
        best_val, best_pt = float(d[k]), V[:, k]
        bii, bjj, bij = d[iu], d[ju], B[iu, ju]
        den = bii - 2.0 * bij + bjj
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den > 0.0, (bii - bij) / den, np.nan)
        inside = (t > 0.0) & (t < 1.0)
        if np.any(inside):
            tv = t[inside]
            val = ((1 - tv) ** 2 * bii[inside] + 2 * tv * (1 - tv) * bij[inside]
                   + tv * tv * bjj[inside])
            k = int(np.argmin(val))
            if val[k] < best_val:
                ii = iu[inside][k]
                jj = ju[inside][k]
                best_val = float(val[k])
                best_pt = (1 - tv[k]) * V[:, ii] + tv[k] * V[:, jj]
        return best_val, best_pt

    nodes = 0
    stack = [(np.eye(n), A.copy())]
    while stack:
        if nodes >= budget:
            return CopositivityResult(
                CopositivityVerdict.INDETERMINATE, None, None, nodes
            )
        V, B = stack.pop()
        nodes += 1
        if B.min() >= -tol:
            continue  # certified nonnegative-to-tolerance on this cell
        best_val, best_pt = best_edge_point(V, B)
        if best_val < -tol:
            x = np.maximum(best_pt, 0.0)
            x /= x.sum()
            return CopositivityResult(
                CopositivityVerdict.NOT_COPOSITIVE, x, float(x @ A @ x), nodes
            )
        # split the off-diagonal edge with the smallest Gram entry
        off = B + np.diag(np.full(n, np.inf))
        i, j = np.unravel_index(np.argmin(off), off.shape)
        children = []
        for drop in (j, i):
            keep_i, keep_j = (i, j)
            Vc = V.copy()
            Vc[:, drop] = 0.5 * (V[:, keep_i] + V[:, keep_j])
            newrow = 0.5 * (B[keep_i, :] + B[keep_j, :])
            Bc = B.copy()
            Bc[drop, :] = newrow
            Bc[:, drop] = newrow
            Bc[drop, drop] = 0.25 * (
                B[keep_i, keep_i] + 2.0 * B[keep_i, keep_j] + B[keep_j, keep_j]
            )
            children.append((float(Bc.min()), Vc, Bc))
        # better (smaller) bound explored first -> push it last
        children.sort(key=lambda c: -c[0])
        for _, Vc, Bc in children:
            stack.append((Vc, Bc))
    return CopositivityResult(CopositivityVerdict.COPOSITIVE, None, None, nodes)


@dataclasses.dataclass
class PsdPlusNResult:
    decomposable: bool
    S: np.ndarray | None
    N: np.ndarray | None
    margin: float

    def __iter__(self):  # allows S, N unpacking
        yield self.S
        yield self.N


def copositive_psd_plus_n(
    A: SymMatrix | np.ndarray,
    tol: float = 1e-7,
    options: SolverOptions | None = None,
) -> PsdPlusNResult:
    """Ordinary-copositivity test: can A be written S + N with S PSD and N
    entrywise nonnegative?

    Solved as the phase-1 program  min t  s.t.  A + t I = S + N, which always
    has a strictly feasible point; A is decomposable exactly when the optimal
    t is <= 0 (up to tolerance).  Sufficient for copositivity in general and
    exact for orders up to 4.
    """
    if isinstance(A, SymMatrix):
        Amat = A.mat
    else:
        Amat = np.asarray(A, dtype=float)
        Amat = 0.5 * (Amat + Amat.T)
    n = Amat.shape[0]
    if n > 20:
        raise DimensionMismatch("decomposition oracle is limited to order <= 20")
    scale = 1.0 + float(np.linalg.norm(Amat))
    if options is None:
        # the verdict threshold is tol*scale, so moderate accuracy on the
        # phase-1 objective suffices even for boundary matrices
        options = SolverOptions(accept_tol=1e-6)

    pb = ProgramBuilder()
    pb.add_free("t", 1)
    pb.add_psd("S", n)
    pb.add_nonneg("N", tri_len(n))
    t_map = svec(np.eye(n)).reshape(-1, 1)
    # N enters the svec rows with the off-diagonal sqrt(2) weights
    n_map = np.diag(svec(np.ones((n, n))))
    pb.add_matrix_equality(
        {"S": np.eye(tri_len(n)), "N": n_map, "t": -t_map}, Amat
    )
    pb.set_objective("t", np.ones(1))
    sol = sdp.solve(pb.build(), options)
    if not sol.optimal:
        raise SolverFailure(
            f"decomposition solve failed: {sol.status.value} {sol.message}"
        )
    t_star = float(sol.objective)
    if t_star > tol * scale:
        return PsdPlusNResult(False, None, None, t_star)
    # recover N, clip solver noise, and take S as the exact complement
    x = sol.x
    off = 1 + tri_len(n)  # skip t and S blocks
    Ntri = np.maximum(x[off : off + tri_len(n)], 0.0)
    i, j = np.triu_indices(n)
    N = np.zeros((n, n))
    N[i, j] = Ntri
    N[j, i] = Ntri
    S = Amat - N
    return PsdPlusNResult(True, S, N, t_star)


# ---------------------------------------------------------------------------
# repeated-nonlinearity counterexample


@dataclasses.dataclass(frozen=True)
class PiecewiseLinearMap:
    """Scalar piecewise-linear interpolant through sorted breakpoints,
    extended with sector-center slope beyond the extremes."""

    xs: np.ndarray
    ys: np.ndarray
    left_slope: float
    right_slope: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.interp(x, self.xs, self.ys)
        below = x < self.xs[0]
        above = x > self.xs[-1]
        if np.any(below):
            y = np.where(below, self.ys[0] + self.left_slope * (x - self.xs[0]), y)
        if np.any(above):
            y = np.where(above, self.ys[-1] + self.right_slope * (x - self.xs[-1]), y)
        return y if y.ndim else float(y)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


def repeated_counterexample(
    M: SymMatrix,
    sector: Sector,
    gbar: np.ndarray,
    vbar: np.ndarray,
) -> PiecewiseLinearMap:
    """Single scalar map whose repeated application violates the quadratic
    constraint of M at (vbar, gbar vbar).

    ``gbar`` holds per-channel slopes in the sector; the witness must satisfy
    strict negativity of the quadratic form.  Duplicate entries of vbar are
    perturbed by at most 1e-6 ||vbar|| (halved until strictness survives).
    """
    gbar = np.atleast_1d(np.asarray(gbar, dtype=float))
    vbar = np.atleast_1d(np.asarray(vbar, dtype=float))
    if gbar.shape != vbar.shape:
        raise DimensionMismatch("slope and input vectors differ in length")
    if np.any(gbar < sector.alpha - 1e-12) or np.any(gbar > sector.beta + 1e-12):
        raise SectorViolation(f"witness slopes {gbar} outside sector {sector}")
    wbar = gbar * vbar
    if qc_value(M, vbar, wbar) >= 0.0:
        raise WitnessNotStrict("witness does not violate the constraint strictly")

    shift = 1e-6 * max(np.linalg.norm(vbar), 1.0)
    while True:
        v = vbar.copy()
        # make entries unique (and nonzero) by deterministic small offsets
        order = np.argsort(v, kind="stable")
        for rank, idx in enumerate(order):
            v[idx] += shift * (rank + 1)
        w = gbar * v
        if len(np.unique(v)) == len(v) and np.all(v != 0.0) \
                and qc_value(M, v, w) < 0.0:
            break
        shift *= 0.5
        if shift < 1e-300:
            raise WitnessNotStrict("could not perturb witness while keeping strictness")

    xs = np.concatenate([v, [0.0]])
    ys = np.concatenate([w, [0.0]])
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    return PiecewiseLinearMap(xs, ys, sector.c, sector.c)
