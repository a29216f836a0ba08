"""Constructive verification suites for the multiplier theory.

Each suite checks one of the set-theoretic or algebraic properties that the
analysis relies on, using randomized instances with a fixed seed and the
independent oracles (exact copositivity, sampled full-block membership,
closed-loop simulation).  Suites return structured results so that both the
command-line ``verify`` command and the test suite can drive them; their
reports are deterministic for a fixed seed.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import oracle, sdp
from .multipliers import (
    MincMode,
    extract_blocks,
    find_mfb_violation,
    g_m,
    h_m,
    md_matrix,
    membership_mc,
    membership_mfb_sampled,
    membership_minc,
    sign_pairs,
    sign_patterns,
    vertex_gammas,
)
from .symmetric import SymMatrix, svec, tri_len
from .system import Sector, StateSpace, sector_residual, simulate


@dataclasses.dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" :: {self.detail}" if self.detail else ""
        return f"{status} {self.name} ({self.checks} checks){extra}"


def _random_sector(rng, nonneg=False) -> Sector:
    a = 0.0 if nonneg else float(rng.uniform(-2.0, 2.0))
    b = a + float(rng.uniform(0.05, 3.0))
    return Sector(a, b)


def _qc_batch(M: SymMatrix, Z: np.ndarray) -> np.ndarray:
    return np.einsum("bi,ij,bj->b", Z, M.mat, Z)


def increment_graph_roundtrip(seed: int = 0, samples: int = 1000) -> SuiteResult:
    """Both inclusions of the incremental-graph / sector-graph equality."""
    rng = np.random.default_rng(seed)
    name = "increment_graph_roundtrip"
    for k in range(samples):
        sec = _random_sector(rng)
        m = int(rng.integers(1, 4))
        v = rng.uniform(-5.0, 5.0, m)
        g = rng.uniform(sec.alpha, sec.beta, m)
        w = g * v
        pair = oracle.sector_to_increments(v, w, sec)
        if max(np.max(np.abs(pair.dv - v)), np.max(np.abs(pair.dw - w))) > 1e-9:
            return SuiteResult(name, False, k + 1,
                               f"graph-to-increment residual at sample {k}")
    for k in range(samples):
        sec = _random_sector(rng)
        m = int(rng.integers(1, 4))
        pair = oracle.IncrementalPair.from_inputs(
            sec, rng.uniform(-5.0, 5.0, m), rng.uniform(-5.0, 5.0, m)
        )
        g = oracle.increments_to_sector(pair, sec)
        if np.any(g < sec.alpha - 1e-12) or np.any(g > sec.beta + 1e-12):
            return SuiteResult(name, False, samples + k + 1,
                               f"slope out of sector at sample {k}")
        if np.max(np.abs(pair.dw - g * pair.dv)) > 1e-10:
            return SuiteResult(name, False, samples + k + 1,
                               f"slope residual at sample {k}")
        prod = (pair.dw - sec.alpha * pair.dv) * (sec.beta * pair.dv - pair.dw)
        if prod.min(initial=0.0) < -1e-9:
            return SuiteResult(name, False, samples + k + 1,
                               f"sector product negative at sample {k}")
    return SuiteResult(name, True, 2 * samples)


def _member_pool(rng, count: int, m: int, sector: Sector):
    """Mixed pool of multiplier candidates: known members (diagonal class,
    Gram matrices, vertex-class members) and raw random symmetric matrices."""
    pool = []
    for _ in range(count):
        kind = rng.integers(0, 4)
        if kind == 0:
            pool.append(md_matrix(rng.uniform(0, 2, m), sector))
        elif kind == 1:
            T = rng.normal(size=(2 * m, 2 * m))
            pool.append(SymMatrix.from_full(T.T @ T / (2 * m)))
        elif kind == 2:
            pool.append(_random_mc_member(rng, m, sector))
        else:
            R = rng.normal(size=(2 * m, 2 * m))
            pool.append(SymMatrix.from_full(0.5 * (R + R.T)))
    return pool


def _random_mc_member(rng, m: int, sector: Sector) -> SymMatrix:
    """Random extreme-ish member of the vertex class, found by minimizing a
    random linear objective over the class intersected with a box."""
    t = tri_len(2 * m)
    pb = sdp.ProgramBuilder()
    pb.add_free("M", t)
    eps = 1e-6
    tv = tri_len(m)
    r_map = np.empty((tv, t))
    for col, E in enumerate(sdp.psd_unit_basis(2 * m)):
        r_map[:, col] = svec(E[m:, m:])
    pb.add_psd("Rneg", m)
    pb.add_matrix_equality({"Rneg": np.eye(tv), "M": r_map},
                           -eps * np.eye(m))
    for j, G in enumerate(vertex_gammas(sector, m)):
        T = np.vstack([np.eye(m), G])
        h_map = np.empty((tv, t))
        for col, E in enumerate(sdp.psd_unit_basis(2 * m)):
            h_map[:, col] = svec(T.T @ E @ T)
        pb.add_psd(f"V{j}", m)
        pb.add_matrix_equality({f"V{j}": np.eye(tv), "M": -h_map},
                               np.zeros((m, m)))
    # box: -bound <= M_ij <= bound via two orthant slacks per entry
    bound = 3.0
    pb.add_nonneg("hi", t)
    pb.add_nonneg("lo", t)
    eye = np.eye(t)
    for i in range(t):
        pb.add_row({"M": eye[i], "hi": eye[i]}, bound)
        pb.add_row({"M": eye[i], "lo": -eye[i]}, -bound)
    pb.set_objective("M", rng.normal(size=t))
    sol = sdp.solve(pb.build())
    if not sol.optimal:
        # fall back to a safely interior member
        return md_matrix(np.full(m, 0.5), sector) + SymMatrix.from_full(
            -1e-3 * np.eye(2 * m)
        )
    prog_slice = slice(0, t)
    from .symmetric import smat

    return SymMatrix.from_full(smat(sol.x[prog_slice]))


def complete_class_soundness(seed: int = 0, pool_size: int = 40,
                       increments: int = 1000,
                       mode: MincMode = MincMode.BRUTE_FORCE) -> SuiteResult:
    """Members of the complete class satisfy the constraint on random
    incremental pairs of the extreme map."""
    rng = np.random.default_rng(seed)
    name = "complete_class_soundness"
    checks = 0
    members = 0
    for k in range(pool_size):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        M = _member_pool(rng, 1, m, sec)[0]
        if not membership_minc(M, sec, mode=mode):
            continue
        members += 1
        vbar = rng.uniform(-5, 5, (increments, m))
        vhat = rng.uniform(-5, 5, (increments, m))
        dv = vbar - vhat
        dw = oracle.f_ab_vec(sec, vbar) - oracle.f_ab_vec(sec, vhat)
        vals = _qc_batch(M, np.hstack([dv, dw]))
        checks += increments
        scale = 1.0 + M.norm_fro() * float(np.max(np.sum(
            np.hstack([dv, dw]) ** 2, axis=1)))
        if vals.min() < -1e-8 * scale:
            return SuiteResult(
                name, False, checks,
                f"member violated on an increment (value {vals.min():.3e})",
            )
    if members == 0:
        return SuiteResult(name, False, checks, "no members sampled")
    return SuiteResult(name, True, checks,
                       f"{members} members x {increments} increments")


def complete_class_completeness(seed: int = 0, pool_size: int = 40,
                          mode: MincMode = MincMode.BRUTE_FORCE) -> SuiteResult:
    """Non-members exhibit an explicit incremental pair violating the
    constraint, built from the failing copositivity witness."""
    rng = np.random.default_rng(seed)
    name = "complete_class_completeness"
    checks = 0
    rejected = 0
    for k in range(pool_size):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        M = _member_pool(rng, 1, m, sec)[0]
        witness = minc_violation_witness(M, sec)
        if witness is None:
            continue
        rejected += 1
        dv, dw = witness
        checks += 1
        if oracle.qc_value(M, dv, dw) >= 0.0:
            return SuiteResult(name, False, checks,
                               "mapped witness failed to violate the QC")
    if rejected == 0:
        return SuiteResult(name, False, checks, "no non-members sampled")
    return SuiteResult(name, True, checks, f"{rejected} non-members refuted")


def minc_violation_witness(M: SymMatrix, sector: Sector):
    """If M is outside the complete class, map the failing copositivity
    witness to an incremental input/output pair violating the constraint;
    returns (dv, dw) or None when all conditions hold."""
    m = M.n // 2
    for gbar, ghat in sign_pairs(m):
        G = g_m(M, sector, gbar, ghat)
        res = oracle.copositive_bruteforce(
            G.mat, tol=1e-8 * (1.0 + G.norm_fro())
        )
        if res.verdict is oracle.CopositivityVerdict.NOT_COPOSITIVE:
            x = res.witness
            vbar = np.array(gbar.d, dtype=float) * x[:m]
            vhat = np.array(ghat.d, dtype=float) * x[m:]
            pair = oracle.IncrementalPair.from_inputs(sector, vbar, vhat)
            return pair.dv, pair.dw
    return None


def containment_chain(seed: int = 0, diag_samples: int = 200,
                      mc_samples: int = 100) -> SuiteResult:
    """Diagonal members lie in the vertex class and the complete class;
    vertex-class members lie in the complete class."""
    rng = np.random.default_rng(seed)
    name = "containment_chain"
    checks = 0
    for k in range(diag_samples):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        # draws are strictly positive almost surely, which the strict
        # negativity of R in the vertex class requires
        M = md_matrix(rng.uniform(0.0, 3.0, m), sec)
        checks += 1
        if not membership_mc(M, sec, tol=1e-9):
            return SuiteResult(name, False, checks,
                               f"diagonal member outside vertex class ({k})")
        if not membership_minc(M, sec, mode=MincMode.BRUTE_FORCE):
            return SuiteResult(name, False, checks,
                               f"diagonal member outside complete class ({k})")
    for k in range(mc_samples):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        M = _random_mc_member(rng, m, sec)
        if not membership_mc(M, sec):
            continue  # boundary noise from the generator; not a chain failure
        checks += 1
        if not membership_minc(M, sec, mode=MincMode.BRUTE_FORCE):
            return SuiteResult(name, False, checks,
                               f"vertex-class member outside complete class ({k})")
    return SuiteResult(name, True, checks)


def membership_crosscheck(seed: int = 0, samples: int = 100) -> SuiteResult:
    """Exact copositivity membership and sampled full-block membership agree
    on random matrices (m <= 2), with witnesses mapped both ways."""
    rng = np.random.default_rng(seed)
    name = "membership_crosscheck"
    agree = 0
    for k in range(samples):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        M = _member_pool(rng, 1, m, sec)[0]
        in_minc = membership_minc(M, sec, mode=MincMode.BRUTE_FORCE)
        in_mfb = membership_mfb_sampled(M, sec, grid_density=11,
                                        seed=int(rng.integers(2**31)))
        if in_minc != in_mfb:
            return SuiteResult(
                name, False, k + 1,
                f"classification mismatch at sample {k}: "
                f"complete-class={in_minc}, sampled-full-block={in_mfb}",
            )
        if not in_mfb:
            viol = find_mfb_violation(M, sec, 11,
                                      seed=int(rng.integers(2**31)))
            if viol is None:
                return SuiteResult(name, False, k + 1,
                                   "falsified without witness")
            x, u, val = viol
            H = h_m(M, x, sec)
            if float(u @ H.mat @ u) >= 0.0:
                return SuiteResult(name, False, k + 1, "witness not negative")
        agree += 1
    return SuiteResult(name, True, samples, f"{agree}/{samples} agree")


def concavity_identity(seed: int = 0, samples: int = 1000) -> SuiteResult:
    """Grouped-terms identity behind the vertex relaxation: the slope
    congruence is concave with curvature -(Gx-Gy) R (Gx-Gy)."""
    rng = np.random.default_rng(seed)
    name = "concavity_identity"
    for k in range(samples):
        m = int(rng.integers(1, 4))
        sec = _random_sector(rng)
        R = rng.normal(size=(2 * m, 2 * m))
        M = SymMatrix.from_full(0.5 * (R + R.T))
        x = rng.uniform(sec.alpha, sec.beta, m)
        y = rng.uniform(sec.alpha, sec.beta, m)
        th = float(rng.uniform())
        _, _, Rblk = extract_blocks(M)
        lhs = (
            h_m(M, th * x + (1 - th) * y, sec).mat
            - th * h_m(M, x, sec).mat
            - (1 - th) * h_m(M, y, sec).mat
        )
        D = np.diag(x - y)
        rhs = -th * (1 - th) * D @ Rblk @ D
        scale = 1.0 + M.norm_fro() * (1.0 + np.max(np.abs(x - y)) ** 2)
        if np.max(np.abs(lhs - rhs)) > 1e-10 * scale:
            return SuiteResult(name, False, k + 1,
                               f"identity residual at sample {k}")
    return SuiteResult(name, True, samples)


def gm_congruence(seed: int = 0, samples: int = 200) -> SuiteResult:
    """g_M is the congruence by the sign-pair transform: additive in M and
    inertia-consistent with an independently built transform."""
    rng = np.random.default_rng(seed)
    name = "gm_congruence"
    for k in range(samples):
        m = int(rng.integers(1, 3))
        sec = _random_sector(rng)
        pats = sign_patterns(m)
        gbar = pats[int(rng.integers(len(pats)))]
        ghat = pats[int(rng.integers(len(pats)))]
        R1 = rng.normal(size=(2 * m, 2 * m))
        R2 = rng.normal(size=(2 * m, 2 * m))
        M1 = SymMatrix.from_full(0.5 * (R1 + R1.T))
        M2 = SymMatrix.from_full(0.5 * (R2 + R2.T))
        left = g_m(M1 + M2, sec, gbar, ghat).mat
        right = g_m(M1, sec, gbar, ghat).mat + g_m(M2, sec, gbar, ghat).mat
        if np.max(np.abs(left - right)) > 1e-12 * (1 + M1.norm_fro() + M2.norm_fro()):
            return SuiteResult(name, False, k + 1, "additivity failed")
        # independent transform construction
        c, r = sec.c, sec.r
        Gb, Gh = gbar.diag, ghat.diag
        T = np.zeros((2 * m, 2 * m))
        T[:m, :m] = Gb
        T[:m, m:] = -Gh
        T[m:, :m] = r * np.eye(m) + c * Gb
        T[m:, m:] = -(r * np.eye(m) + c * Gh)
        ref = T.T @ M1.mat @ T
        direct = g_m(M1, sec, gbar, ghat).mat
        if np.max(np.abs(ref - direct)) > 1e-12 * (1 + M1.norm_fro()):
            return SuiteResult(name, False, k + 1, "transform mismatch")
        sign_ref = np.sign(np.round(np.linalg.eigvalsh(0.5 * (ref + ref.T)), 12))
        sign_dir = np.sign(np.round(np.linalg.eigvalsh(direct), 12))
        if not np.array_equal(sign_ref, sign_dir):
            return SuiteResult(name, False, k + 1, "eigenvalue signs differ")
    return SuiteResult(name, True, samples)


def copositivity_exactness(seed: int = 0, samples: int = 500) -> SuiteResult:
    """Decomposition verdict equals the exact verdict up to order 4, and the
    order-5 boundary example separates them."""
    rng = np.random.default_rng(seed)
    name = "copositivity_exactness"
    for k in range(samples):
        n = int(rng.integers(2, 5))
        R = rng.normal(size=(n, n)) * rng.choice([0.5, 1.0, 2.0])
        A = 0.5 * (R + R.T)
        if rng.uniform() < 0.3:
            A = A @ A.T - 0.1 * np.eye(n)  # bias towards near-PSD cases
        brute = oracle.copositive_bruteforce(A)
        dec = oracle.copositive_psd_plus_n(A)
        if brute.verdict is oracle.CopositivityVerdict.INDETERMINATE:
            return SuiteResult(name, False, k + 1, "budget exhausted")
        if dec.decomposable != (
            brute.verdict is oracle.CopositivityVerdict.COPOSITIVE
        ):
            return SuiteResult(
                name, False, k + 1,
                f"verdicts differ at sample {k} (n={n}, margin {dec.margin:.2e})",
            )
    horn = np.array(
        [[1, -1, 1, 1, -1],
         [-1, 1, -1, 1, 1],
         [1, -1, 1, -1, 1],
         [1, 1, -1, 1, -1],
         [-1, 1, 1, -1, 1]], dtype=float,
    )
    hb = oracle.copositive_bruteforce(horn)
    hd = oracle.copositive_psd_plus_n(horn)
    if hb.verdict is not oracle.CopositivityVerdict.COPOSITIVE or hd.decomposable:
        return SuiteResult(name, False, samples + 1,
                           "order-5 boundary example misclassified")
    return SuiteResult(name, True, samples + 1)


def psdn_sufficiency(seed: int = 0, samples: int = 200) -> SuiteResult:
    """Whenever the decomposition exists, the exact oracle confirms
    copositivity (the sufficient direction, all orders tested)."""
    rng = np.random.default_rng(seed)
    name = "psdn_sufficiency"
    checks = 0
    for k in range(samples):
        n = int(rng.integers(2, 6))
        R = rng.normal(size=(n, n))
        A = 0.5 * (R + R.T)
        dec = oracle.copositive_psd_plus_n(A)
        if not dec.decomposable:
            continue
        checks += 1
        brute = oracle.copositive_bruteforce(A)
        if brute.verdict is not oracle.CopositivityVerdict.COPOSITIVE:
            return SuiteResult(name, False, checks,
                               f"decomposable but not copositive (n={n})")
    return SuiteResult(name, True, checks, f"{checks} decomposable instances")


def repeated_counterexample_suite(seed: int = 0, samples: int = 50) -> SuiteResult:
    """Full-block violations extend to single repeated scalar maps."""
    rng = np.random.default_rng(seed)
    name = "repeated_counterexample"
    built = 0
    for k in range(samples):
        m = int(rng.integers(2, 4))
        sec = _random_sector(rng, nonneg=True)
        R = rng.normal(size=(2 * m, 2 * m))
        M = SymMatrix.from_full(0.5 * (R + R.T))
        viol = find_mfb_violation(M, sec, grid_density=7,
                                  seed=int(rng.integers(2**31)))
        if viol is None:
            continue
        x, u, _ = viol
        phi = oracle.repeated_counterexample(M, sec, x, u)
        built += 1
        v = u
        w = np.asarray(phi(v))
        if oracle.qc_value(M, v, w) >= 0.0:
            return SuiteResult(name, False, built,
                               "repeated map does not violate the constraint")
        # the interpolant stays inside the sector pointwise
        grid = np.linspace(-1.5 * np.max(np.abs(v)) - 1, 1.5 * np.max(np.abs(v)) + 1, 201)
        vals = np.asarray(phi(grid))
        prod = (vals - sec.alpha * grid) * (sec.beta * grid - vals)
        if prod.min() < -1e-9 * (1 + np.max(grid**2)):
            return SuiteResult(name, False, built, "interpolant leaves the sector")
    if built == 0:
        return SuiteResult(name, False, 0, "no violations sampled")
    return SuiteResult(name, True, built, f"{built} counterexamples built")


def simulation_invariants(sys: StateSpace, seed: int = 0,
                          trials: int = 20) -> SuiteResult:
    """Per-step sector inequality along simulated loops, agreement of linear
    loop closures, and the dissipation bound under a certificate."""
    rng = np.random.default_rng(seed)
    name = "simulation_invariants"
    sec = Sector(0.0, 1.0)
    checks = 0
    for k in range(trials):
        rng_k = np.random.default_rng(np.random.SeedSequence([seed, k]))
        neg = rng_k.uniform(0, 1, sys.m)
        pos = rng_k.uniform(0, 1, sys.m)
        phi = [
            (lambda s_n, s_p: (lambda x: s_n * x if x <= 0 else s_p * x))(
                neg[i], pos[i])
            for i in range(sys.m)
        ]
        u = rng_k.standard_normal((60, sys.n_u))
        traj = simulate(sys, phi, u)
        checks += 1
        if traj.max_dynamics_residual(sys) > 1e-9:
            return SuiteResult(name, False, checks, "dynamics residual")
        if sector_residual(traj, sec) < -1e-9:
            return SuiteResult(name, False, checks, "sector inequality broken")
    # linear loop closure agreement
    g0 = 0.6
    u = rng.standard_normal((40, sys.n_u))
    traj = simulate(sys, lambda x: g0 * x, u)
    K = g0 * np.eye(sys.m)
    W = np.linalg.solve(np.eye(sys.m) - sys.D11 @ K,
                        np.hstack([sys.C1, sys.D12]))
    Acl = sys.A + sys.B1 @ K @ W[:, :sys.n_x]
    Bcl = sys.B2 + sys.B1 @ K @ W[:, sys.n_x:]
    Ccl = sys.C2 + sys.D21 @ K @ W[:, :sys.n_x]
    Dcl = sys.D22 + sys.D21 @ K @ W[:, sys.n_x:]
    xk = np.zeros(sys.n_x)
    for k in range(40):
        yk = Ccl @ xk + Dcl @ u[k]
        if np.max(np.abs(yk - traj.y[k])) > 1e-10 * (1 + np.max(np.abs(yk))):
            return SuiteResult(name, False, checks, "linear closure mismatch")
        xk = Acl @ xk + Bcl @ u[k]
    checks += 1
    return SuiteResult(name, True, checks)


ALL_SUITES = (
    "increment_graph_roundtrip",
    "complete_class_soundness",
    "complete_class_completeness",
    "containment_chain",
    "membership_crosscheck",
    "concavity_identity",
    "gm_congruence",
    "copositivity_exactness",
    "psdn_sufficiency",
    "repeated_counterexample",
)


def run_suites(seed: int = 0, names=None, sys: StateSpace | None = None):
    """Run the named suites (all by default) and return their results."""
    chosen = list(names) if names else list(ALL_SUITES)
    results = []
    for nm in chosen:
        if nm == "increment_graph_roundtrip":
            results.append(increment_graph_roundtrip(seed))
        elif nm == "complete_class_soundness":
            results.append(complete_class_soundness(seed))
        elif nm == "complete_class_completeness":
            results.append(complete_class_completeness(seed))
        elif nm == "containment_chain":
            results.append(containment_chain(seed))
        elif nm == "membership_crosscheck":
            results.append(membership_crosscheck(seed))
        elif nm == "concavity_identity":
            results.append(concavity_identity(seed))
        elif nm == "gm_congruence":
            results.append(gm_congruence(seed))
        elif nm == "copositivity_exactness":
            results.append(copositivity_exactness(seed))
        elif nm == "psdn_sufficiency":
            results.append(psdn_sufficiency(seed))
        elif nm == "repeated_counterexample":
            results.append(repeated_counterexample_suite(seed))
        elif nm == "simulation_invariants":
            if sys is None:
                raise ValueError("simulation_invariants needs a system")
            results.append(simulation_invariants(sys, seed))
        else:
            raise ValueError(f"unknown suite {nm!r}")
    return results
