"""Discrete-time LTI state-space data, interconnection simulation, and the
nominal induced-gain computation.

The plant has two input channels (the nonlinearity output ``w`` and the
exogenous input ``u``) and two output channels (the nonlinearity input ``v``
and the performance output ``y``):

    x(k+1) = A x(k) + B1 w(k) + B2 u(k)
    v(k)   = C1 x(k) + D11 w(k) + D12 u(k)
    y(k)   = C2 x(k) + D21 w(k) + D22 u(k)

with ``w(k) = Phi(v(k))`` closing the loop through a memoryless non-repeated
nonlinearity.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FixedPointDivergence,
    NonFiniteEntry,
    SolverFailure,
    UnstableNominal,
)
from . import sdp
from .sdp import ProgramBuilder, SolverOptions, Status
from .symmetric import svec

# damped fixed-point parameters for the implicit loop equation when D11 != 0;
# iteration polishes to the target, convergence is declared at the guarantee
_FP_DAMPING = 0.5
_FP_MAX_ITER = 500
_FP_TARGET = 1e-13
_FP_RESIDUAL = 1e-10


@dataclasses.dataclass(frozen=True)
class Sector:
    """Sector bounds [alpha, beta] with center c and radius r.

    The stored bounds are canonicalized from (c, r) so that
    ``alpha == c - r`` and ``beta == c + r`` hold exactly in floating point
    (the adjustment is at most one ulp of the inputs).
    """

    alpha: float
    beta: float
    c: float = dataclasses.field(init=False)
    r: float = dataclasses.field(init=False)

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise NonFiniteEntry("sector bounds must be finite")
        if a > b:
            raise ValueError(f"sector requires alpha <= beta, got [{a}, {b}]")
        c = 0.5 * (a + b)
        r = 0.5 * (b - a)
        object.__setattr__(self, "alpha", c - r)
        object.__setattr__(self, "beta", c + r)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)

    @property
    def degenerate(self) -> bool:
        return self.r == 0.0

    def contains_slope(self, g: float, tol: float = 0.0) -> bool:
        return self.alpha - tol <= g <= self.beta + tol

    def __str__(self) -> str:
        return f"[{self.alpha:g}, {self.beta:g}]"


def _as_matrix(name, value, rows, cols):
    M = np.atleast_2d(np.asarray(value, dtype=float))
    if M.shape != (rows, cols):
        raise DimensionMismatch(
            f"{name} has shape {M.shape}, expected ({rows}, {cols})"
        )
    if not np.all(np.isfinite(M)):
        raise NonFiniteEntry(f"{name} contains non-finite entries")
    M = M.copy()
    M.setflags(write=False)
    return M


@dataclasses.dataclass(frozen=True)
class StateSpace:
    """Validated, immutable state-space data; safe to share across threads."""

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    D21: np.ndarray
    D22: np.ndarray

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B1.shape[1]

    @property
    def n_u(self) -> int:
        return self.B2.shape[1]

    @property
    def n_y(self) -> int:
        return self.C2.shape[0]

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.n_x, self.m, self.n_u, self.n_y)

    @property
    def wellposedness_warning(self) -> bool:
        """True when D11 != 0: the loop equation is implicit and uniqueness
        of loop solutions is not guaranteed in general."""
        return bool(np.any(self.D11 != 0.0))

    def spectral_radius(self) -> float:
        return spectral_radius(self.A)


def new_statespace(matrices: dict, dims: tuple[int, int, int, int]) -> StateSpace:
    """Validate a dict with keys A,B1,B2,C1,C2,D11,D12,D21,D22 against dims
    (n_x, m, n_u, n_y); the internal channel widths n_v = n_w = m."""
    n_x, m, n_u, n_y = dims
    if min(n_x, m, n_u, n_y) < 0:
        raise DimensionMismatch("dimensions must be nonnegative")
    try:
        return StateSpace(
            A=_as_matrix("A", matrices["A"], n_x, n_x),
            B1=_as_matrix("B1", matrices["B1"], n_x, m),
            B2=_as_matrix("B2", matrices["B2"], n_x, n_u),
            C1=_as_matrix("C1", matrices["C1"], m, n_x),
            C2=_as_matrix("C2", matrices["C2"], n_y, n_x),
            D11=_as_matrix("D11", matrices["D11"], m, m),
            D12=_as_matrix("D12", matrices["D12"], m, n_u),
            D21=_as_matrix("D21", matrices["D21"], n_y, m),
            D22=_as_matrix("D22", matrices["D22"], n_y, n_u),
        )
    except KeyError as exc:
        raise DimensionMismatch(f"missing matrix {exc.args[0]!r}") from exc


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Simulated loop signals; x has one more sample than the inputs."""

    u: np.ndarray  # (T, n_u)
    x: np.ndarray  # (T+1, n_x)
    v: np.ndarray  # (T, m)
    w: np.ndarray  # (T, m)
    y: np.ndarray  # (T, n_y)

    @property
    def horizon(self) -> int:
        return self.u.shape[0]

    def l2_gain(self) -> float:
        nu = np.linalg.norm(self.u)
        if nu == 0.0:
            return 0.0
        return float(np.linalg.norm(self.y) / nu)

    def max_dynamics_residual(self, sys: StateSpace) -> float:
        """Largest violation of the state/output equations along the path."""
        res = 0.0
        for k in range(self.horizon):
            xe = sys.A @ self.x[k] + sys.B1 @ self.w[k] + sys.B2 @ self.u[k]
            ve = sys.C1 @ self.x[k] + sys.D11 @ self.w[k] + sys.D12 @ self.u[k]
            ye = sys.C2 @ self.x[k] + sys.D21 @ self.w[k] + sys.D22 @ self.u[k]
            res = max(
                res,
                float(np.max(np.abs(xe - self.x[k + 1]), initial=0.0)),
                float(np.max(np.abs(ve - self.v[k]), initial=0.0)),
                float(np.max(np.abs(ye - self.y[k]), initial=0.0)),
            )
        return res


def _normalize_phi(phi, m: int) -> Callable[[np.ndarray], np.ndarray]:
    """Accept a single scalar map (applied to every channel) or one map per
    channel; return a vectorized map on R^m."""
    if callable(phi):
        def apply(v):
            return np.array([float(phi(float(vi))) for vi in v])
        return apply
    maps = list(phi)
    if len(maps) != m:
        raise DimensionMismatch(f"need {m} channel maps, got {len(maps)}")

    def apply(v):
        return np.array([float(f(float(vi))) for f, vi in zip(maps, v)])

    return apply


def simulate(
    sys: StateSpace,
    phi,
    u: Sequence[np.ndarray] | np.ndarray,
    x0: np.ndarray | None = None,
) -> Trajectory:
    """Simulate the closed loop w = Phi(v) driven by the input sequence u.

    With D11 = 0 each step is explicit.  Otherwise v(k) solves the implicit
    equation v = C1 x + D11 Phi(v) + D12 u by damped fixed-point iteration
    (damping 0.5, at most 500 iterations, residual 1e-10); failure to
    converge raises :class:`FixedPointDivergence` and signals possible
    ill-posedness.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.shape[1] != sys.n_u:
        raise DimensionMismatch(f"input width {u.shape[1]} != n_u={sys.n_u}")
    T = u.shape[0]
    x0 = np.zeros(sys.n_x) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (sys.n_x,):
        raise DimensionMismatch("x0 has wrong length")
    apply_phi = _normalize_phi(phi, sys.m)
    implicit = sys.wellposedness_warning

    xs = np.zeros((T + 1, sys.n_x))
    vs = np.zeros((T, sys.m))
    ws = np.zeros((T, sys.m))
    ys = np.zeros((T, sys.n_y))
    xs[0] = x0
    for k in range(T):
        r = sys.C1 @ xs[k] + sys.D12 @ u[k]
        if not implicit:
            v = r
            w = apply_phi(v)
        else:
            v = r.copy()
            for _ in range(_FP_MAX_ITER):
                w = apply_phi(v)
                v_next = (1.0 - _FP_DAMPING) * v + _FP_DAMPING * (r + sys.D11 @ w)
                step = np.max(np.abs(v_next - v), initial=0.0)
                v = v_next
                if step < _FP_TARGET:
                    break
            w = apply_phi(v)
            if np.max(np.abs(v - (r + sys.D11 @ w)), initial=0.0) > _FP_RESIDUAL:
                raise FixedPointDivergence(
                    f"loop equation did not converge at step {k}"
                )
        vs[k] = v
        ws[k] = w
        ys[k] = sys.C2 @ xs[k] + sys.D21 @ w + sys.D22 @ u[k]
        xs[k + 1] = sys.A @ xs[k] + sys.B1 @ w + sys.B2 @ u[k]
    return Trajectory(u=u, x=xs, v=vs, w=ws, y=ys)


def spectral_radius(A: np.ndarray, power_iters: int = 200) -> float:
    """Spectral radius via power iteration with a dense-eigenvalue fallback
    whenever the iteration is inconclusive."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return 0.0
    v = np.full(n, 1.0 / np.sqrt(n))
    prev = 0.0
    for _ in range(power_iters):
        w = A @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(nrm - prev) <= 1e-12 * max(1.0, nrm):
            return float(nrm)
        prev = nrm
    # complex or clustered dominant eigenvalues: fall back to a Schur-based
    # dense eigenvalue computation
    return float(np.max(np.abs(np.linalg.eigvals(A))))


_STABILITY_MARGIN = 1e-9


def _brl_feasible(sys: StateSpace, gamma: float, eps: float,
                  options: SolverOptions) -> bool:
    """Feasibility of the discrete bounded-real inequality at the given gamma
    for the nominal channel (A, B2, C2, D22)."""
    n_x, n_u = sys.n_x, sys.n_u
    nl = n_x + n_u
    G = np.hstack([sys.A, sys.B2])
    CD = np.hstack([sys.C2, sys.D22])
    const = CD.T @ CD
    const[n_x:, n_x:] -= gamma * gamma * np.eye(n_u)

    pb = ProgramBuilder()
    pb.add_psd("P", n_x)
    pb.add_psd("Z", nl)
    tmap = np.zeros((nl * (nl + 1) // 2, n_x * (n_x + 1) // 2))
    for col, E in enumerate(sdp.psd_unit_basis(n_x)):
        contrib = G.T @ E @ G
        contrib[:n_x, :n_x] -= E
        tmap[:, col] = svec(contrib)
    # Z + BRL(P) = -const - eps*I
    pb.add_matrix_equality(
        {"Z": np.eye(nl * (nl + 1) // 2), "P": tmap},
        -const - eps * np.eye(nl),
    )
    sol = sdp.solve(pb.build(), options)
    if sol.status is Status.OPTIMAL:
        return True
    if sol.status is Status.PRIMAL_INFEASIBLE:
        return False
    raise SolverFailure(
        f"bounded-real feasibility solve failed at gamma={gamma}: "
        f"{sol.status.value} {sol.message}"
    )


def nominal_hinf_norm(
    sys: StateSpace,
    rel_tol: float = 1e-6,
    options: SolverOptions | None = None,
) -> float:
    """Induced l2 norm of the nominal channel u -> y (loop input w = 0),
    by bisection on the bounded-real linear matrix inequality.

    Requires a Schur-stable A; raises :class:`UnstableNominal` otherwise.
    The feasibility margin puts a floor of about sqrt(1e-9) on the result,
    so norms that are exactly zero come back as ~3e-5.
    """
    rho = spectral_radius(sys.A)
    if rho >= 1.0 - _STABILITY_MARGIN:
        raise UnstableNominal(f"spectral radius {rho:.6f} >= 1")
    options = options or SolverOptions()
    data_scale = max(
        1.0,
        max(np.abs(M).max(initial=0.0)
            for M in (sys.A, sys.B2, sys.C2, sys.D22)),
    )
    eps = 1e-9 * data_scale

    hi = max(1.0, 2.0 * float(np.linalg.norm(sys.D22, 2)))
    for _ in range(60):
        if _brl_feasible(sys, hi, eps, options):
            break
        hi *= 2.0
    else:
        raise SolverFailure("could not bracket the nominal norm from above")
    lo = 0.0
    while hi - lo > rel_tol * hi + 1e-12:
        mid = 0.5 * (lo + hi)
        if _brl_feasible(sys, mid, eps, options):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _two_segment_map(slope_neg: float, slope_pos: float):
    def phi(x: float) -> float:
        return slope_neg * x if x <= 0.0 else slope_pos * x
    return phi


def empirical_gain_lb(
    sys: StateSpace,
    sector: Sector,
    trials: int = 100,
    horizon: int = 200,
    seed: int = 0,
) -> float:
    """Empirical lower bound on the worst-case l2 gain of the interconnection.

    Each trial draws a random non-repeated nonlinearity (two-segment
    piecewise-linear per channel, breakpoint at 0, slopes uniform in the
    sector) and a random Gaussian input, simulates from x0 = 0, and records
    ||y||_2 / ||u||_2; the maximum over trials is returned.  Trial t uses a
    child seed derived from (seed, t), so results are reproducible and
    independent of trial ordering.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best = 0.0
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        neg = rng.uniform(sector.alpha, sector.beta, size=sys.m)
        pos = rng.uniform(sector.alpha, sector.beta, size=sys.m)
        phi = [_two_segment_map(neg[i], pos[i]) for i in range(sys.m)]
        u = rng.standard_normal((horizon, sys.n_u))
        traj = simulate(sys, phi, u, np.zeros(sys.n_x))
        best = max(best, traj.l2_gain())
    return best


def sector_residual(traj: Trajectory, sector: Sector) -> float:
    """Most negative per-channel sector product along a trajectory
    (nonnegative values mean the sector inequality held everywhere)."""
    a, b = sector.alpha, sector.beta
    prod = (traj.w - a * traj.v) * (b * traj.v - traj.w)
    return float(prod.min(initial=0.0))


def dissipation_excess(
    traj: Trajectory, P: np.ndarray, gamma_sq: float
) -> float:
    """Excess of V(x(T)) + sum ||y||^2 over gamma^2 sum ||u||^2 for a
    trajectory from x0 = 0; certified analyses make this <= ~0."""
    xT = traj.x[-1]
    lhs = float(xT @ P @ xT) + float(np.sum(traj.y**2))
    rhs = gamma_sq * float(np.sum(traj.u**2))
    return lhs - rhs
