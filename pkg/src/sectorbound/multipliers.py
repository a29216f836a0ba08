"""Multiplier sets for non-repeated sector-bounded nonlinearities.

Three classes parameterize the quadratic constraint [v; w]' M [v; w] >= 0:

* ``Diagonal``: the classical diagonally-weighted sector multiplier,
* ``VertexConvex``: full matrices constrained on the 2^m sector vertices with
  a strictly negative lower-right block,
* ``IncrementalComplete``: the complete class, characterized by 4^m matrix
  copositivity conditions obtained from the incremental graph of the extreme
  piecewise-linear sector map.

Membership tests are tolerance-aware; for the complete class the copositivity
conditions are checked either by the sufficient PSD-plus-nonnegative
decomposition or by the exact branch-and-bound oracle.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools

import numpy as np

from .errors import DimensionMismatch, NegativeLambda, OutOfSector
from .symmetric import SymMatrix
from .system import Sector


class MultiplierKind(enum.Enum):
    DIAGONAL = "Diagonal"
    VERTEX_CONVEX = "VertexConvex"
    INCREMENTAL_COMPLETE = "IncrementalComplete"


@dataclasses.dataclass(frozen=True)
class MultiplierClass:
    kind: MultiplierKind
    sector: Sector
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DimensionMismatch("channel count m must be >= 1")


@dataclasses.dataclass(frozen=True)
class SignPattern:
    """Diagonal sign matrix with entries in {-1, +1}."""

    d: tuple[int, ...]

    def __post_init__(self):
        if not self.d or any(s not in (-1, 1) for s in self.d):
            raise ValueError("sign pattern entries must be -1 or +1")

    @property
    def m(self) -> int:
        return len(self.d)

    @property
    def diag(self) -> np.ndarray:
        return np.diag(np.array(self.d, dtype=float))


def md_matrix(lam: np.ndarray, sector: Sector) -> SymMatrix:
    """Diagonal sector multiplier [[-2ab L, (a+b) L], [(a+b) L, -2 L]]
    with L = diag(lam); the associated quadratic form is
    2 sum_i lam_i (w_i - a v_i)(b v_i - w_i)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam < 0):
        raise NegativeLambda(f"negative weight in {lam}")
    a, b = sector.alpha, sector.beta
    L = np.diag(lam)
    M = np.block([[-2.0 * a * b * L, (a + b) * L],
                  [(a + b) * L, -2.0 * L]])
    return SymMatrix.from_full(M, symmetrize=False)


def vertex_gammas(sector: Sector, m: int) -> list[np.ndarray]:
    """All 2^m diagonal matrices with entries in {alpha, beta}, in
    lexicographic bit order (first channel most significant, alpha first)."""
    if m < 1:
        raise DimensionMismatch("m must be >= 1")
    out = []
    for bits in itertools.product((sector.alpha, sector.beta), repeat=m):
        out.append(np.diag(np.array(bits, dtype=float)))
    return out


def sign_patterns(m: int) -> list[SignPattern]:
    """All 2^m sign patterns in lexicographic bit order (-1 first)."""
    if m < 1:
        raise DimensionMismatch("m must be >= 1")
    return [SignPattern(bits) for bits in itertools.product((-1, 1), repeat=m)]


def sign_pairs(m: int) -> list[tuple[SignPattern, SignPattern]]:
    """All 4^m ordered pairs of sign patterns, deterministic order."""
    pats = sign_patterns(m)
    return [(gb, gh) for gb in pats for gh in pats]


def gm_transform(sector: Sector, gbar: SignPattern, ghat: SignPattern) -> np.ndarray:
    """Congruence factor T mapping the nonnegative magnitude variables
    [|v_plus|; |v_minus|] to the incremental pair [dv; dw] of the extreme
    piecewise-linear sector map:

        T = [[Gb, -Gh], [r I + c Gb, -(r I + c Gh)]]

    so that dv = Gb|v+| - Gh|v-| and dw carries the slope c + r*sign(.) of
    each branch.  (The second block row uses r I + c G: the branch slope
    acting on magnitudes; writing r G + c I instead is only equivalent for
    sectors centered so that c = r.)
    """
    if gbar.m != ghat.m:
        raise DimensionMismatch("sign patterns of different sizes")
    m = gbar.m
    c, r = sector.c, sector.r
    I = np.eye(m)
    Gb, Gh = gbar.diag, ghat.diag
    return np.block([[Gb, -Gh],
                     [r * I + c * Gb, -(r * I + c * Gh)]])


def g_m(M: SymMatrix, sector: Sector, gbar: SignPattern, ghat: SignPattern) -> SymMatrix:
    """The copositivity-test matrix T' M T for one sign pair."""
    if M.n != 2 * gbar.m:
        raise DimensionMismatch(f"M is {M.n}x{M.n}, expected {2 * gbar.m}")
    return M.congruence(gm_transform(sector, gbar, ghat))


def h_m(M: SymMatrix, x: np.ndarray, sector: Sector | None = None,
        tol: float = 1e-12) -> SymMatrix:
    """Slope-restricted congruence [I; diag(x)]' M [I; diag(x)]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = len(x)
    if M.n != 2 * m:
        raise DimensionMismatch(f"M is {M.n}x{M.n}, expected {2 * m}")
    if sector is not None:
        scale = max(1.0, abs(sector.alpha), abs(sector.beta))
        if np.any(x < sector.alpha - tol * scale) or np.any(
            x > sector.beta + tol * scale
        ):
            raise OutOfSector(f"slopes {x} outside {sector}")
    T = np.vstack([np.eye(m), np.diag(x)])
    return M.congruence(T)


def extract_blocks(M: SymMatrix):
    """Split a 2m x 2m multiplier into its (Q, S, R) blocks."""
    m = M.n // 2
    F = M.mat
    return F[:m, :m], F[:m, m:], F[m:, m:]


def membership_md(M: SymMatrix, sector: Sector, tol: float = 1e-8) -> bool:
    """Template match against the diagonal multiplier class: recover the
    weights from the lower-right block and verify all four blocks."""
    if M.n % 2:
        raise DimensionMismatch("multiplier must have even order")
    Q, S, R = extract_blocks(M)
    lam = -np.diag(R) / 2.0
    if np.any(lam < -tol * (1.0 + M.norm_fro())):
        return False
    lam = np.maximum(lam, 0.0)
    target = md_matrix(lam, sector)
    scale = max(1.0, M.norm_fro())
    return bool(np.max(np.abs(M.mat - target.mat)) <= 1e-10 * scale)


def membership_mc(M: SymMatrix, sector: Sector, tol: float = 1e-8) -> bool:
    """Vertex convex-relaxation membership: R strictly negative definite and
    the vertex congruences positive semidefinite."""
    if M.n % 2:
        raise DimensionMismatch("multiplier must have even order")
    m = M.n // 2
    _, _, R = extract_blocks(M)
    if not SymMatrix.from_full(R).is_nd(tol):
        return False
    for G in vertex_gammas(sector, m):
        if not h_m(M, np.diag(G), sector).is_psd(tol):
            return False
    return True


class MincMode(enum.Enum):
    PSD_PLUS_N = "PsdPlusN"
    BRUTE_FORCE = "BruteForce"


def membership_minc(
    M: SymMatrix,
    sector: Sector,
    tol: float = 1e-8,
    mode: MincMode = MincMode.PSD_PLUS_N,
) -> bool:
    """Complete-class membership via the 4^m copositivity conditions.

    ``PSD_PLUS_N`` checks the sufficient ordinary-copositivity decomposition;
    ``BRUTE_FORCE`` runs the exact simplex-partitioning oracle (reference
    semantics, exponential worst case).
    """
    from . import oracle  # membership <- oracle <- sdp, no cycle

    if M.n % 2:
        raise DimensionMismatch("multiplier must have even order")
    m = M.n // 2
    for gbar, ghat in sign_pairs(m):
        G = g_m(M, sector, gbar, ghat)
        if mode is MincMode.PSD_PLUS_N:
            if not oracle.copositive_psd_plus_n(G).decomposable:
                return False
        else:
            scaled = tol * (1.0 + G.norm_fro())
            if not oracle.copositive_bruteforce(G.mat, tol=scaled).is_copositive:
                return False
    return True


def find_mfb_violation(
    M: SymMatrix,
    sector: Sector,
    grid_density: int = 11,
    n_random: int = 1000,
    tol: float = 1e-8,
    seed: int = 0,
):
    """Search the sector hypercube for a slope vector whose congruence has a
    negative eigenvalue.  Returns (x, eigenvector, eigenvalue) or None.

    One-sided: a hit certifies non-membership; exhausting the samples proves
    nothing (the constraint set is a continuum).
    """
    if M.n % 2:
        raise DimensionMismatch("multiplier must have even order")
    m = M.n // 2
    scale = 1.0 + M.norm_fro()
    axes = [np.linspace(sector.alpha, sector.beta, grid_density)] * m
    rng = np.random.default_rng(seed)
    rand = rng.uniform(sector.alpha, sector.beta, size=(n_random, m))
    candidates = itertools.chain(itertools.product(*axes), rand)
    for x in candidates:
        x = np.asarray(x, dtype=float)
        H = h_m(M, x)
        w, V = np.linalg.eigh(H.mat)
        if w[0] < -tol * scale:
            return x, V[:, 0], float(w[0])
    return None


def membership_mfb_sampled(
    M: SymMatrix,
    sector: Sector,
    grid_density: int = 11,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    """Sampled full-block membership test (can only falsify with certainty)."""
    if grid_density < 2:
        raise ValueError("grid_density must be >= 2")
    return find_mfb_violation(M, sector, grid_density, 1000, tol, seed) is None
