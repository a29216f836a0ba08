"""Homogeneous self-dual interior-point solver for cone programs.

Infeasible-start primal-dual path following over the product of free,
nonnegative-orthant and PSD blocks, with Nesterov-Todd scaling and Mehrotra
predictor-corrector steps.  The homogeneous embedding (variables tau, kappa)
yields certificates of primal or dual infeasibility instead of diverging.

Implementation notes:

* Free variables carry no barrier; they are eliminated through a saddle
  system whose leading block is the Schur complement over the cone columns.
* That Schur complement decomposes into independent row components (rows
  coupled only through shared cone blocks); each component is assembled and
  factored separately, which is what makes the many-small-PSD-block programs
  produced by the analysis layer cheap.
* PSD blocks of equal order are processed in batched numpy operations.
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ..symmetric import tri_len
from .program import ConeProgram, Nonneg, PsdBlock


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclasses.dataclass
class SolverOptions:
    tol: float = 1e-9
    accept_tol: float = 1e-7
    max_iterations: int = 200
    step_fraction: float = 0.99
    stall_iterations: int = 12
    verbose: bool = False


@dataclasses.dataclass
class Solution:
    status: Status
    x: np.ndarray | None
    y: np.ndarray | None
    z: np.ndarray | None
    objective: float | None
    gap: float
    res_primal: float
    res_dual: float
    iterations: int
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _PsdGroup:
    """All PSD blocks of one order k, processed as stacked (nb, k, k) arrays."""

    def __init__(self, k: int, var_slices: list[slice]):
        self.k = k
        self.t = tri_len(k)
        self.nb = len(var_slices)
        self.var_slices = var_slices
        iu, ju = np.triu_indices(k)
        self.iu, self.ju = iu, ju
        self.w_pack = np.where(iu == ju, 1.0, math.sqrt(2.0))
        # svec basis as dense tensor (t, k, k)
        E = np.zeros((self.t, k, k))
        for c, (a, b) in enumerate(zip(iu, ju)):
            if a == b:
                E[c, a, a] = 1.0
            else:
                E[c, a, b] = E[c, b, a] = 1.0 / math.sqrt(2.0)
        self.basis = E
        self.cols = np.concatenate(
            [np.arange(s.start, s.stop) for s in var_slices]
        ).reshape(self.nb, self.t)

    def gather(self, v: np.ndarray) -> np.ndarray:
        return v[self.cols]

    def scatter(self, out: np.ndarray, vals: np.ndarray) -> None:
        out[self.cols.ravel()] = vals.reshape(-1)

    def smat(self, V: np.ndarray) -> np.ndarray:
        """(nb, t) packed -> (nb, k, k) dense symmetric."""
        X = np.zeros((V.shape[0], self.k, self.k))
        X[:, self.iu, self.ju] = V / self.w_pack
        X[:, self.ju, self.iu] = X[:, self.iu, self.ju]
        return X

    def svec(self, X: np.ndarray) -> np.ndarray:
        return X[:, self.iu, self.ju] * self.w_pack

    def sym_kron(self, W: np.ndarray) -> np.ndarray:
        """Batched matrix of svec(S) -> svec(W S W) for symmetric W (nb,k,k)."""
        T = np.einsum("bij,cjl,blm->bcim", W, self.basis, W, optimize=True)
        K = T[:, :, self.iu, self.ju] * self.w_pack  # (nb, t_col, t_row)
        return np.ascontiguousarray(np.swapaxes(K, 1, 2))


class _Cones:
    """Batched view of the cone structure of a program."""

    def __init__(self, prog: ConeProgram):
        slices = prog.block_slices()
        self.n = prog.num_vars
        lin_cols = []
        psd_groups: dict[int, list[slice]] = {}
        free_cols = []
        for blk, sl in zip(prog.blocks, slices):
            if isinstance(blk, Nonneg):
                lin_cols.extend(range(sl.start, sl.stop))
            elif isinstance(blk, PsdBlock):
                psd_groups.setdefault(blk.k, []).append(sl)
            else:
                free_cols.extend(range(sl.start, sl.stop))
        self.lin = np.array(lin_cols, dtype=int)
        self.free = np.array(free_cols, dtype=int)
        self.groups = [_PsdGroup(k, sls) for k, sls in sorted(psd_groups.items())]
        self.degree = float(len(self.lin) + sum(g.nb * g.k for g in self.groups))
        self.cone_cols = np.concatenate(
            [self.lin] + [g.cols.ravel() for g in self.groups]
        ) if (len(self.lin) or self.groups) else np.zeros(0, dtype=int)

    def initial_point(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.zeros(self.n)
        x[self.lin] = 1.0
        for g in self.groups:
            g.scatter(x, g.svec(np.broadcast_to(np.eye(g.k), (g.nb, g.k, g.k))))
        return x, x.copy()

    # -- scaling state ------------------------------------------------------

    def update_scaling(self, x, z) -> bool:
        xl, zl = x[self.lin], z[self.lin]
        if np.any(xl <= 0.0) or np.any(zl <= 0.0):
            return False
        self.w2 = xl / zl
        self.lam_lin = np.sqrt(xl * zl)
        self.R, self.Rinv, self.lam_psd, self.K = [], [], [], []
        for g in self.groups:
            X, Z = g.smat(g.gather(x)), g.smat(g.gather(z))
            try:
                Lx = np.linalg.cholesky(X)
                Lz = np.linalg.cholesky(Z)
            except np.linalg.LinAlgError:
                return False
            U, s, Vt = np.linalg.svd(np.swapaxes(Lz, 1, 2) @ Lx)
            if np.any(s <= 0.0):
                return False
            sq = np.sqrt(s)
            R = (Lx @ np.swapaxes(Vt, 1, 2)) / sq[:, None, :]
            Rinv = (np.swapaxes(U, 1, 2) @ np.swapaxes(Lz, 1, 2)) / sq[:, :, None]
            self.R.append(R)
            self.Rinv.append(Rinv)
            self.lam_psd.append(s)
            self.K.append(g.sym_kron(R @ np.swapaxes(R, 1, 2)))
        return True

    def apply_H(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        out[self.lin] = self.w2 * v[self.lin]
        for g, K in zip(self.groups, self.K):
            out[g.cols.ravel()] = (
                K @ g.gather(v)[:, :, None]
            ).reshape(-1)
        return out

    def compl_rhs(self, sigma_mu: float, dx_aff=None, dz_aff=None) -> np.ndarray:
        D = np.zeros(self.n)
        d = sigma_mu - self.lam_lin**2
        if dx_aff is not None:
            du = dx_aff[self.lin] / np.sqrt(self.w2)
            dvp = np.sqrt(self.w2) * dz_aff[self.lin]
            d = d - du * dvp
        D[self.lin] = np.sqrt(self.w2) * (d / self.lam_lin)
        for g, R, Rinv, lam in zip(self.groups, self.R, self.Rinv, self.lam_psd):
            Dm = sigma_mu * np.eye(g.k) - np.einsum(
                "bi,ij,bj->bij", lam, np.eye(g.k), lam
            )
            if dx_aff is not None:
                u = Rinv @ g.smat(g.gather(dx_aff)) @ np.swapaxes(Rinv, 1, 2)
                v = np.swapaxes(R, 1, 2) @ g.smat(g.gather(dz_aff)) @ R
                Dm = Dm - 0.5 * (u @ v + v @ u)
            Dm = 2.0 * Dm / (lam[:, :, None] + lam[:, None, :])
            Dm = 0.5 * (Dm + np.swapaxes(Dm, 1, 2))
            out = R @ Dm @ np.swapaxes(R, 1, 2)
            g.scatter(D, g.svec(out))
        return D

    def max_step(self, x, dx, z, dz) -> float:
        amax = np.inf
        for v, dv in ((x[self.lin], dx[self.lin]), (z[self.lin], dz[self.lin])):
            neg = dv < 0.0
            if np.any(neg):
                amax = min(amax, float(np.min(-v[neg] / dv[neg])))
        for g in self.groups:
            for v, dv in ((g.gather(x), g.gather(dx)), (g.gather(z), g.gather(dz))):
                V, dV = g.smat(v), g.smat(dv)
                try:
                    Lv = np.linalg.cholesky(V)
                except np.linalg.LinAlgError:
                    return 0.0
                Li = np.linalg.inv(Lv)
                Minner = Li @ dV @ np.swapaxes(Li, 1, 2)
                lam_min = np.linalg.eigvalsh(
                    0.5 * (Minner + np.swapaxes(Minner, 1, 2))
                )[:, 0]
                worst = float(lam_min.min(initial=0.0))
                if worst < 0.0:
                    amax = min(amax, -1.0 / worst)
        return amax


def _row_components(A: sp.csr_matrix, cones: _Cones) -> list[np.ndarray]:
    """Partition rows into groups coupled through shared cone blocks (free
    columns excluded: they are handled by the dense Schur complement)."""
    p = A.shape[0]
    parent = np.arange(p)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    Ac = A.tocsc()

    def rows_of_cols(cols):
        out = []
        for cc in cols:
            out.append(Ac.indices[Ac.indptr[cc]:Ac.indptr[cc + 1]])
        return np.unique(np.concatenate(out)) if out else np.zeros(0, int)

    for cc in cones.lin:
        rows = Ac.indices[Ac.indptr[cc]:Ac.indptr[cc + 1]]
        for r in rows[1:]:
            union(rows[0], r)
    for g in cones.groups:
        for bidx in range(g.nb):
            rows = rows_of_cols(g.cols[bidx])
            for r in rows[1:]:
                union(rows[0], r)
    groups: dict[int, list[int]] = {}
    for r in range(p):
        groups.setdefault(find(r), []).append(r)
    return [np.array(v, dtype=int) for v in groups.values()]


def _presolve(prog: ConeProgram):
    """Normalize equality rows to unit norm and drop duplicate rows."""
    A, b, c = prog.A.copy(), prog.b.copy(), prog.c.copy()
    norms = np.linalg.norm(A, axis=1)
    keep, seen = [], {}
    inconsistent = False
    scale = np.ones(len(b))
    for i in range(A.shape[0]):
        if norms[i] == 0.0:
            if abs(b[i]) > 1e-14:
                inconsistent = True
            continue
        A[i] /= norms[i]
        b[i] /= norms[i]
        scale[i] = norms[i]
        key = A[i].tobytes()
        if key in seen:
            if abs(b[seen[key]] - b[i]) > 1e-12:
                inconsistent = True
            continue
        seen[key] = i
        keep.append(i)
    keep = np.array(keep, dtype=int)
    cv = np.ones(A.shape[1])
    return A[keep], b[keep], c, scale[keep], cv, keep, inconsistent


def solve(prog: ConeProgram, options: SolverOptions | None = None) -> Solution:
    """Solve a cone program; deterministic for fixed options.

    Statuses follow the homogeneous-model criteria: ``OPTIMAL`` when scaled
    residuals and the relative gap fall below tolerance, the infeasible
    statuses when tau vanishes with a valid Farkas-type certificate.
    """
    opts = options or SolverOptions()
    A_dense, b, c, row_scale, col_scale, kept, inconsistent = _presolve(prog)
    if inconsistent:
        return Solution(Status.PRIMAL_INFEASIBLE, None, None, None, None,
                        np.inf, np.inf, np.inf, 0,
                        "contradictory equality rows")
    p, n = A_dense.shape
    cones = _Cones(prog)
    A = sp.csr_matrix(A_dense)
    At = sp.csr_matrix(A_dense.T)
    F = A_dense[:, cones.free] if len(cones.free) else np.zeros((p, 0))
    nf = F.shape[1]

    comps = _row_components(A, cones)
    # per-component cone-column support (dense sub-blocks of A), plus the
    # precomputed placement of every cone block inside each component
    comp_data = []
    free_set = set(cones.free.tolist())
    for rows in comps:
        sub = A_dense[rows]
        cols = np.nonzero(np.any(sub != 0.0, axis=0))[0]
        cols = cols[[cc not in free_set for cc in cols]]
        if len(cols) == 0:
            # the reduced system needs every equality row to touch at least
            # one cone variable; pure-free rows would make it singular
            return Solution(
                Status.NUMERICAL_FAILURE, None, None, None, None,
                np.inf, np.inf, np.inf, 0,
                "equality rows supported only by free variables are not "
                "handled; reformulate with a cone variable in every row",
            )
        lin_local = np.nonzero(np.isin(cols, cones.lin))[0]
        lin_pos = np.searchsorted(cones.lin, cols[lin_local])
        psd_entries = []
        colset = set(cols.tolist())
        for gi, g in enumerate(cones.groups):
            for bidx in range(g.nb):
                bc = g.cols[bidx]
                mask = np.array([cc in colset for cc in bc])
                if mask.any():
                    loc = np.searchsorted(cols, bc[mask])
                    psd_entries.append((gi, bidx, loc, mask))
        comp_data.append(
            (rows, np.ascontiguousarray(sub[:, cols]), len(cols),
             lin_local, lin_pos, psd_entries)
        )

    cone_mask = np.ones(n, dtype=bool)
    cone_mask[cones.free] = False

    x, z = cones.initial_point()
    y = np.zeros(p)
    tau, kappa = 1.0, 1.0
    nu = cones.degree + 1.0

    def residuals():
        rp = A @ x - b * tau
        rd = -(At @ y) + c * tau - z
        rg = b @ y - c @ x - kappa
        return rp, rd, rg

    rp0, rd0, rg0 = residuals()
    # convergence is measured on the unscaled problem so that the returned
    # solution meets absolute feasibility tolerances
    np0 = max(1.0, np.linalg.norm(row_scale * rp0))
    nd0 = max(1.0, np.linalg.norm(col_scale * rd0))
    ng0 = max(1.0, abs(rg0))
    mu0 = (x @ z + tau * kappa) / nu

    def factor_kkt():
        """Factor S per component and the free-column Schur complement;
        returns a solve(a, d) closure."""
        facs = []
        for rows, sub, ncols, lin_local, lin_pos, psd_entries in comp_data:
            Hsub = np.zeros((ncols, ncols))
            if len(lin_local):
                Hsub[lin_local, lin_local] = cones.w2[lin_pos]
            for gi, bidx, loc, mask in psd_entries:
                Hsub[np.ix_(loc, loc)] = cones.K[gi][bidx][np.ix_(mask, mask)]
            Ssub = sub @ Hsub @ sub.T
            scale_s = max(np.trace(Ssub) / max(len(rows), 1), 1e-300)
            reg = 0.0
            for _ in range(10):
                try:
                    fac = scipy.linalg.cho_factor(
                        Ssub + reg * np.eye(len(rows)), lower=True,
                        check_finite=False,
                    )
                    break
                except np.linalg.LinAlgError:
                    reg = max(1e-13 * scale_s, 8.0 * reg)
            else:
                raise np.linalg.LinAlgError("component not factorizable")
            facs.append(fac)

        def solve_S(a):
            out = np.empty_like(a)
            for comp, fac in zip(comp_data, facs):
                rows = comp[0]
                out[rows] = scipy.linalg.cho_solve(fac, a[rows],
                                                   check_finite=False)
            return out

        if nf == 0:
            def kkt_solve(a, d):
                return solve_S(a), np.zeros(0)
            return kkt_solve

        SiF = np.empty_like(F)
        for comp, fac in zip(comp_data, facs):
            rows = comp[0]
            SiF[rows] = scipy.linalg.cho_solve(fac, F[rows], check_finite=False)
        Mf = F.T @ SiF
        scf = max(np.trace(Mf) / max(nf, 1), 1e-300)
        regf = 0.0
        for _ in range(10):
            try:
                Mf_fac = scipy.linalg.cho_factor(
                    Mf + regf * np.eye(nf), lower=True, check_finite=False
                )
                break
            except np.linalg.LinAlgError:
                regf = max(1e-13 * scf, 8.0 * regf)
        else:
            raise np.linalg.LinAlgError("free-variable block not factorizable")

        def kkt_solve(a, d):
            w = scipy.linalg.cho_solve(Mf_fac, SiF.T @ a - d,
                                       check_finite=False)
            u = solve_S(a - F @ w)
            return u, w

        return kkt_solve

    fallback = None
    fallback_score = np.inf
    stall = 0
    best_tk = np.inf
    status = Status.MAX_ITERATIONS
    message = ""
    it = 0
    for it in range(1, opts.max_iterations + 1):
        rp, rd, rg = residuals()
        mu = (x @ z + tau * kappa) / nu
        rho_p = np.linalg.norm(row_scale * rp) / np0
        rho_d = np.linalg.norm(col_scale * rd) / nd0
        rho_g = abs(rg) / ng0
        cx, by = c @ x, b @ y
        rho_gap = abs(cx - by) / (tau + abs(by))
        rho_mu = mu / mu0
        if opts.verbose:
            print(f"  it={it:3d} rp={rho_p:.2e} rd={rho_d:.2e} "
                  f"gap={rho_gap:.2e} tau={tau:.2e} kappa={kappa:.2e} mu={mu:.2e}")
        score = max(rho_p, rho_d, rho_gap)
        progressed = False
        if tau > opts.tol * max(1.0, kappa) and score < fallback_score:
            fallback_score = score
            fallback = (x / tau, y / tau, z / tau)
            progressed = True
        tk = tau / max(1.0, kappa)
        if tk < 0.9 * best_tk:  # approaching an infeasibility certificate
            best_tk = tk
            progressed = True
        stall = 0 if progressed else stall + 1
        if rho_p <= opts.tol and rho_d <= opts.tol and rho_gap <= opts.tol:
            status, message = Status.OPTIMAL, ""
            break
        if stall >= opts.stall_iterations:
            status = Status.MAX_ITERATIONS
            message = f"no progress for {stall} iterations"
            break
        near_compl = rho_p <= opts.tol and rho_d <= opts.tol and rho_g <= opts.tol
        if (near_compl and tau <= opts.tol * max(1.0, kappa)) or (
            rho_mu <= opts.tol and tau <= opts.tol * min(1.0, kappa)
        ):
            if by > opts.tol:
                status = Status.PRIMAL_INFEASIBLE
                message = "Farkas certificate: b'y > 0 with A'y + z ~ 0"
                fallback = (x, y / max(by, 1e-300), z / max(by, 1e-300))
            elif cx < -opts.tol:
                status = Status.DUAL_INFEASIBLE
                message = "unboundedness certificate: c'x < 0 with Ax ~ 0"
                fallback = (x / max(-cx, 1e-300), y, z)
            else:
                status = Status.NUMERICAL_FAILURE
                message = "tau and kappa both vanished without certificate"
            break

        if not cones.update_scaling(x, z):
            status, message = Status.NUMERICAL_FAILURE, "iterate left the cone"
            break
        try:
            kkt_solve = factor_kkt()
        except np.linalg.LinAlgError as exc:
            status, message = Status.NUMERICAL_FAILURE, str(exc)
            break

        c_cone = np.where(cone_mask, c, 0.0)
        c_free = c[cones.free]
        Hc = cones.apply_H(c_cone)
        u1, w1 = kkt_solve(A @ Hc + b, c_free)

        def newton(eta, sigma_mu, dx_aff=None, dz_aff=None, dtk_extra=0.0):
            D = cones.compl_rhs(sigma_mu, dx_aff, dz_aff)
            d_tk = sigma_mu - tau * kappa + dtk_extra
            rd_cone = np.where(cone_mask, rd, 0.0)
            rd_free = rd[cones.free]
            Hrd = cones.apply_H(rd_cone)
            base2 = D - eta * Hrd
            a2 = -eta * rp - A @ base2
            u2, w2 = kkt_solve(a2, eta * rd_free)
            HAt_u1 = cones.apply_H(np.where(cone_mask, At @ u1, 0.0))
            HAt_u2 = cones.apply_H(np.where(cone_mask, At @ u2, 0.0))
            coeff = (b @ u1 - c_free @ w1 - c_cone @ HAt_u1
                     + c_cone @ Hc + kappa / tau)
            rhs = (-eta * rg - b @ u2 + c_free @ w2 + c_cone @ HAt_u2
                   + c_cone @ base2 + d_tk / tau)
            if coeff <= 0 or not np.isfinite(coeff):
                raise np.linalg.LinAlgError("singular dtau equation")
            dtau = rhs / coeff
            dy = u2 + dtau * u1
            dxv = HAt_u1 * dtau + HAt_u2 - dtau * Hc + base2
            dxv[cones.free] = w2 + dtau * w1
            dz = np.where(cone_mask, -(At @ dy) + c * dtau + eta * rd, 0.0)
            dkappa = b @ dy - c @ dxv + eta * rg
            return dxv, dy, dz, dtau, dkappa

        try:
            dx_a, dy_a, dz_a, dtau_a, dkap_a = newton(1.0, 0.0)
        except np.linalg.LinAlgError as exc:
            status, message = Status.NUMERICAL_FAILURE, str(exc)
            break

        a_tau = np.inf
        if dtau_a < 0:
            a_tau = -tau / dtau_a
        if dkap_a < 0:
            a_tau = min(a_tau, -kappa / dkap_a)
        alpha_aff = min(1.0, cones.max_step(x, dx_a, z, dz_a), a_tau)
        mu_aff = ((x + alpha_aff * dx_a) @ (z + alpha_aff * dz_a)
                  + (tau + alpha_aff * dtau_a) * (kappa + alpha_aff * dkap_a)) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))

        try:
            dx, dy, dz, dtau, dkappa = newton(
                1.0 - sigma, sigma * mu, dx_a, dz_a, -dtau_a * dkap_a
            )
        except np.linalg.LinAlgError as exc:
            status, message = Status.NUMERICAL_FAILURE, str(exc)
            break

        a_tau = np.inf
        if dtau < 0:
            a_tau = -tau / dtau
        if dkappa < 0:
            a_tau = min(a_tau, -kappa / dkappa)
        alpha = min(1.0, opts.step_fraction * min(
            cones.max_step(x, dx, z, dz), a_tau
        ))
        if not np.isfinite(alpha) or alpha <= 1e-14:
            status, message = Status.NUMERICAL_FAILURE, "step size collapsed"
            break
        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        tau += alpha * dtau
        kappa += alpha * dkappa

    if status is Status.OPTIMAL:
        xs, ys, zs = x / tau, y / tau, z / tau
    elif status not in (Status.PRIMAL_INFEASIBLE, Status.DUAL_INFEASIBLE) \
            and fallback is not None and fallback_score <= opts.accept_tol:
        # converged to acceptable accuracy before a late-stage breakdown
        status = Status.OPTIMAL
        message = f"accepted near-optimal iterate (score {fallback_score:.2e})"
        xs, ys, zs = fallback
    elif status in (Status.PRIMAL_INFEASIBLE, Status.DUAL_INFEASIBLE):
        xs, ys, zs = fallback
    elif fallback is not None:
        # failure status: still expose the best iterate so callers can try
        # to verify it as a certificate independently
        xs, ys, zs = fallback
        xs = xs / col_scale
        zs = zs * col_scale
        ys_full = np.zeros(prog.num_rows)
        ys_full[kept] = ys / row_scale
        return Solution(status, xs, ys_full, zs, None, np.inf, np.inf,
                        np.inf, it, message)
    else:
        return Solution(status, None, None, None, None, np.inf, np.inf,
                        np.inf, it, message)

    # undo the equilibration
    xs = xs / col_scale
    zs = zs * col_scale
    ys_full = np.zeros(prog.num_rows)
    ys_full[kept] = ys / row_scale
    if status is Status.OPTIMAL:
        rp_true = np.linalg.norm(prog.A @ xs - prog.b)
        rd_true = np.linalg.norm(prog.A.T @ ys_full + zs - prog.c)
        obj = float(prog.c @ xs)
        gap = abs(prog.c @ xs - prog.b @ ys_full) / (1.0 + abs(obj))
        return Solution(status, xs, ys_full, zs, obj, gap, rp_true, rd_true,
                        it, message)
    return Solution(status, xs, ys_full, zs, None, np.inf, np.inf, np.inf,
                    it, message)
