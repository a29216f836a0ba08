import numpy as np

from sectorbound.sdp import (
    NotPsd,
    ProgramBuilder,
    Status,
    chol_psd,
    solve,
    sym_eig,
)
from sectorbound.symmetric import smat


def min_t_program():
    # minimize t s.t. [[t, 1], [1, t]] >= 0; optimum t = 1
    pb = ProgramBuilder()
    pb.add_free("t", 1)
    pb.add_psd("Z", 2)
    tmap = np.zeros((3, 1))
    tmap[0, 0] = 1.0
    tmap[2, 0] = 1.0
    pb.add_matrix_equality(
        {"Z": np.eye(3), "t": -tmap}, np.array([[0.0, 1.0], [1.0, 0.0]])
    )
    pb.set_objective("t", np.ones(1))
    return pb.build()


def test_min_eigenvalue_program():
    sol = solve(min_t_program())
    assert sol.optimal
    assert abs(sol.objective - 1.0) < 1e-6


def test_orthant_lower_bound():
    # minimize x s.t. x >= 3 (x free, slack in the orthant)
    pb = ProgramBuilder()
    pb.add_free("x", 1)
    pb.add_nonneg("s", 1)
    pb.add_row({"x": np.ones(1), "s": -np.ones(1)}, 3.0)
    pb.set_objective("x", np.ones(1))
    sol = solve(pb.build())
    assert sol.optimal
    assert abs(sol.objective - 3.0) < 1e-6


def test_psd_feasibility_detects_indefinite_target():
    pb = ProgramBuilder()
    pb.add_psd("Z", 2)
    pb.add_matrix_equality({"Z": np.eye(3)}, np.array([[1.0, 2.0], [2.0, 1.0]]))
    sol = solve(pb.build())
    assert sol.status is Status.PRIMAL_INFEASIBLE

    pb = ProgramBuilder()
    pb.add_psd("Z", 2)
    pb.add_matrix_equality({"Z": np.eye(3)}, np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert solve(pb.build()).optimal


def test_unbounded_problem_reports_dual_infeasible():
    pb = ProgramBuilder()
    pb.add_nonneg("x", 1)
    pb.add_nonneg("s", 1)
    pb.add_row({"x": np.ones(1), "s": -np.ones(1)}, 1.0)
    pb.set_objective("x", -np.ones(1))
    assert solve(pb.build()).status is Status.DUAL_INFEASIBLE


def test_solution_invariants_on_optimal():
    prog = min_t_program()
    sol = solve(prog)
    scale = 1.0 + np.linalg.norm(prog.b) + np.linalg.norm(prog.c)
    assert sol.gap <= 1e-7
    assert sol.res_primal <= 1e-7 * scale
    assert sol.res_dual <= 1e-7 * scale
    # KKT residuals recomputed from scratch
    assert np.linalg.norm(prog.A @ sol.x - prog.b) <= 1e-7 * scale
    assert np.linalg.norm(prog.A.T @ sol.y + sol.z - prog.c) <= 1e-7 * scale
    assert abs(prog.c @ sol.x - prog.b @ sol.y) / (1 + abs(prog.c @ sol.x)) \
        <= 1e-7


def test_returned_iterates_stay_in_cone():
    pb = ProgramBuilder()
    pb.add_nonneg("u", 2)
    pb.add_psd("Z", 3)
    target = np.array([[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 1.0]])
    pb.add_matrix_equality({"Z": np.eye(6)}, target)
    pb.add_row({"u": np.array([1.0, 2.0])}, 3.0)
    pb.set_objective("u", np.array([1.0, 0.5]))
    sol = solve(pb.build())
    assert sol.optimal
    Z = smat(sol.x[2:])
    scale = 1.0 + np.linalg.norm(Z)
    assert np.linalg.eigvalsh(Z)[0] >= -1e-8 * scale
    assert sol.x[:2].min() >= -1e-10


def test_round_trip_determinism():
    s1 = solve(min_t_program())
    s2 = solve(min_t_program())
    assert s1.objective == s2.objective
    assert np.array_equal(s1.x, s2.x)


def test_duplicate_rows_are_dropped_and_contradictions_detected():
    pb = ProgramBuilder()
    pb.add_nonneg("x", 2)
    pb.add_row({"x": np.array([1.0, 1.0])}, 1.0)
    pb.add_row({"x": np.array([1.0, 1.0])}, 1.0)  # duplicate
    pb.set_objective("x", np.array([1.0, 2.0]))
    sol = solve(pb.build())
    assert sol.optimal and abs(sol.objective - 1.0) < 1e-6

    pb = ProgramBuilder()
    pb.add_nonneg("x", 2)
    pb.add_row({"x": np.array([1.0, 1.0])}, 1.0)
    pb.add_row({"x": np.array([2.0, 2.0])}, 3.0)  # contradictory multiple
    sol = solve(pb.build())
    assert sol.status is Status.PRIMAL_INFEASIBLE


def test_program_validation_and_extract():
    prog = min_t_program()
    assert prog.num_vars == 4
    assert prog.num_rows == 3
    sol = solve(prog)
    Z = prog.extract(sol.x, "Z")
    assert Z.shape == (2, 2)
    assert abs(Z[0, 1] - 1.0) < 1e-6
    t = prog.extract(sol.x, "t")
    assert t.shape == (1,)


def test_random_programs_solve_with_consistent_duality():
    from sectorbound.symmetric import svec

    rng = np.random.default_rng(7)
    for trial in range(8):
        k = int(rng.integers(2, 5))
        nl = int(rng.integers(1, 4))
        p = int(rng.integers(2, 6))
        t = k * (k + 1) // 2
        n = t + nl
        Rx = rng.normal(size=(k, k))
        Rz = rng.normal(size=(k, k))
        xs = np.concatenate([svec(Rx @ Rx.T + 0.3 * np.eye(k)),
                             rng.uniform(0.5, 2.0, nl)])
        zs = np.concatenate([svec(Rz @ Rz.T + 0.3 * np.eye(k)),
                             rng.uniform(0.5, 2.0, nl)])
        A = rng.normal(size=(p, n))
        ys = rng.normal(size=p)
        b = A @ xs
        c = A.T @ ys + zs  # strictly feasible on both sides -> bounded
        pb = ProgramBuilder()
        pb.add_psd("X", k)
        pb.add_nonneg("u", nl)
        for i in range(p):
            pb.add_row({"X": A[i, :t], "u": A[i, t:]}, b[i])
        pb.set_objective("X", c[:t])
        pb.set_objective("u", c[t:])
        sol = solve(pb.build())
        assert sol.status is Status.OPTIMAL, (trial, sol.status, sol.message)
        # the known interior point bounds the optimum from above, the dual
        # certificate from below, and the two must agree
        assert sol.objective <= c @ xs + 1e-6 * (1 + abs(c @ xs))
        gap = abs(sol.objective - b @ sol.y) / (1 + abs(sol.objective))
        assert gap <= 1e-6


def test_pure_free_rows_rejected_cleanly():
    pb = ProgramBuilder()
    pb.add_free("x", 2)
    pb.add_row({"x": np.array([1.0, 1.0])}, 2.0)
    pb.set_objective("x", np.array([1.0, 0.0]))
    sol = solve(pb.build())
    assert sol.status is Status.NUMERICAL_FAILURE
    assert "free" in sol.message


def test_unconstrained_orthant_program():
    pb = ProgramBuilder()
    pb.add_nonneg("x", 2)
    pb.set_objective("x", np.array([1.0, 2.0]))
    sol = solve(pb.build())
    assert sol.optimal
    assert abs(sol.objective) < 1e-6


def test_dump_triplet_format(tmp_path):
    prog = min_t_program()
    path = tmp_path / "prog.txt"
    prog.dump(path)
    text = path.read_text().splitlines()
    assert text[0].startswith("coneprogram rows=3 vars=4")
    kinds = [ln.split() for ln in text if ln.startswith("block")]
    assert [k[2] for k in kinds] == ["free", "psd"]
    a_lines = [ln for ln in text if ln.startswith("A ")]
    # reconstruct A from the triplets
    A = np.zeros((prog.num_rows, prog.num_vars))
    for ln in a_lines:
        _, i, j, v = ln.split()
        A[int(i), int(j)] = float(v)
    assert np.array_equal(A, prog.A)


# -- dense kernels ----------------------------------------------------------


def test_sym_eig_examples():
    w, _ = sym_eig(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1.0, 3.0])
    w, _ = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1.0, 1.0])
    w, _ = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [1.0, 3.0])


def test_sym_eig_reconstruction_and_orthonormality():
    rng = np.random.default_rng(3)
    for n in (1, 2, 5, 8):
        R = rng.normal(size=(n, n))
        A = 0.5 * (R + R.T)
        w, V = sym_eig(A)
        scale = 1.0 + np.linalg.norm(A)
        assert np.linalg.norm(A - V @ np.diag(w) @ V.T) <= 1e-12 * scale
        assert np.linalg.norm(V.T @ V - np.eye(n)) <= 1e-12
        assert np.all(np.diff(w) >= -1e-14)


def test_chol_psd_examples():
    L = chol_psd(np.eye(2))
    assert np.allclose(L, np.eye(2))
    assert isinstance(chol_psd(np.array([[1.0, 2.0], [2.0, 1.0]])), NotPsd)
    L = chol_psd(np.array([[4.0, 2.0], [2.0, 2.0]]))
    assert np.allclose(L, np.array([[2.0, 0.0], [1.0, 1.0]]))


def test_chol_psd_shift():
    A = np.array([[0.0, 0.0], [0.0, -0.5]])
    assert isinstance(chol_psd(A), NotPsd)
    L = chol_psd(A, shift=1.0)
    assert not isinstance(L, NotPsd)
    assert np.allclose(L @ L.T, A + np.eye(2))
