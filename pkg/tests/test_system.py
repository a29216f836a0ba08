import numpy as np
import pytest

from sectorbound.errors import (
    DimensionMismatch,
    NonFiniteEntry,
    UnstableNominal,
)
from sectorbound.system import (
    Sector,
    dissipation_excess,
    empirical_gain_lb,
    new_statespace,
    nominal_hinf_norm,
    sector_residual,
    simulate,
    spectral_radius,
)


def zero_system(n=1):
    z = np.zeros((n, n))
    zc = np.zeros((n, 1))
    return new_statespace(
        dict(A=z, B1=z, B2=zc, C1=z, C2=zc.T, D11=z, D12=zc, D21=zc.T,
             D22=[[0.0]]),
        (n, n, 1, 1),
    )


def frequency_sweep_norm(sys, n_points=200001):
    """Independent oracle for the nominal channel norm: dense sweep of the
    transfer function magnitude over the unit circle."""
    I = np.eye(sys.n_x)
    best = 0.0
    for w in np.linspace(0.0, np.pi, n_points):
        G = sys.D22 + sys.C2 @ np.linalg.solve(np.exp(1j * w) * I - sys.A,
                                               sys.B2)
        best = max(best, np.linalg.svd(G, compute_uv=False)[0])
    return best


def test_sector_fields_exact():
    s = Sector(1.0, 3.0)
    assert s.c == 2.0 and s.r == 1.0
    assert s.alpha == s.c - s.r
    assert s.beta == s.c + s.r
    s = Sector(0.1, 0.3)
    assert s.alpha == s.c - s.r and s.beta == s.c + s.r
    with pytest.raises(ValueError):
        Sector(1.0, 0.5)


def test_new_statespace_validation(bench_sys):
    assert bench_sys.dims == (3, 3, 1, 1)
    assert bench_sys.wellposedness_warning  # D11 != 0 on the benchmark
    assert not zero_system().wellposedness_warning

    bad = dict(A=np.zeros((2, 3)), B1=np.zeros((3, 1)), B2=np.zeros((3, 1)),
               C1=np.zeros((1, 3)), C2=np.zeros((1, 3)), D11=np.zeros((1, 1)),
               D12=np.zeros((1, 1)), D21=np.zeros((1, 1)), D22=np.zeros((1, 1)))
    with pytest.raises(DimensionMismatch):
        new_statespace(bad, (3, 1, 1, 1))
    bad["A"] = np.full((3, 3), np.nan)
    with pytest.raises(NonFiniteEntry):
        new_statespace(bad, (3, 1, 1, 1))


def test_simulate_equilibrium_and_open_loop(bench_sys):
    T = 20
    traj = simulate(bench_sys, lambda x: 0.5 * x if x > 0 else 0.0,
                    np.zeros((T, 1)))
    assert np.allclose(traj.y, 0.0) and np.allclose(traj.x, 0.0)

    # phi = 0 decouples the loop: equals the nominal channel simulation
    rng = np.random.default_rng(0)
    u = rng.standard_normal((T, 1))
    traj = simulate(bench_sys, lambda x: 0.0, u)
    x = np.zeros(3)
    for k in range(T):
        yk = bench_sys.C2 @ x + bench_sys.D22 @ u[k]
        assert np.allclose(traj.y[k], yk, atol=1e-12)
        x = bench_sys.A @ x + bench_sys.B2 @ u[k]


def test_simulate_linear_phi_matches_closed_loop(bench_sys):
    g0 = 0.7
    rng = np.random.default_rng(1)
    u = rng.standard_normal((30, 1))
    traj = simulate(bench_sys, lambda x: g0 * x, u)
    K = g0 * np.eye(3)
    W = np.linalg.solve(np.eye(3) - bench_sys.D11 @ K,
                        np.hstack([bench_sys.C1, bench_sys.D12]))
    Acl = bench_sys.A + bench_sys.B1 @ K @ W[:, :3]
    Bcl = bench_sys.B2 + bench_sys.B1 @ K @ W[:, 3:]
    Ccl = bench_sys.C2 + bench_sys.D21 @ K @ W[:, :3]
    Dcl = bench_sys.D22 + bench_sys.D21 @ K @ W[:, 3:]
    x = np.zeros(3)
    for k in range(30):
        assert np.max(np.abs(traj.y[k] - (Ccl @ x + Dcl @ u[k]))) < 1e-10
        x = Acl @ x + Bcl @ u[k]
    assert traj.max_dynamics_residual(bench_sys) < 1e-9


def test_simulate_sector_inequality_along_path(bench_sys):
    sec = Sector(0.0, 1.0)
    rng = np.random.default_rng(2)
    for trial in range(5):
        neg, pos = rng.uniform(0, 1, (2, 3))
        phi = [
            (lambda a, b: (lambda x: a * x if x <= 0 else b * x))(neg[i], pos[i])
            for i in range(3)
        ]
        traj = simulate(bench_sys, phi, rng.standard_normal((50, 1)))
        assert sector_residual(traj, sec) >= -1e-9


def test_impulse_gain_below_complete_class_bound(bench_sys):
    # linear unit-slope loop, unit impulse: the realized gain must stay
    # under the certified complete-class bound for the [0, 1] sector
    from sectorbound import lmi
    from sectorbound.multipliers import MultiplierKind

    u = np.zeros((50, 1))
    u[0, 0] = 1.0
    traj = simulate(bench_sys, lambda x: x, u)
    res = lmi.analyze_class(bench_sys, Sector(0, 1),
                            MultiplierKind.INCREMENTAL_COMPLETE)
    assert res.optimal
    assert traj.l2_gain() <= res.gamma + 1e-6


def test_spectral_radius():
    assert spectral_radius(np.zeros((2, 2))) == 0.0
    A = np.array([[0.0, 1.0], [-0.25, 0.0]])  # complex pair, radius 0.5
    assert abs(spectral_radius(A) - 0.5) < 1e-9
    assert abs(spectral_radius(np.diag([0.9, -0.3])) - 0.9) < 1e-9


def test_nominal_hinf_norm_static_and_zero():
    z = np.zeros((1, 1))
    sys = new_statespace(
        dict(A=z, B1=z, B2=z, C1=z, C2=z, D11=z, D12=z, D21=z, D22=[[0.5]]),
        (1, 1, 1, 1),
    )
    assert abs(nominal_hinf_norm(sys) - 0.5) < 1e-5
    # zero system: the strictness margin floors the bisection near sqrt(1e-9)
    assert nominal_hinf_norm(zero_system()) < 1e-4


def test_nominal_hinf_norm_matches_frequency_sweep(bench_sys):
    g = nominal_hinf_norm(bench_sys)
    ref = frequency_sweep_norm(bench_sys, 50001)
    assert abs(g - ref) / ref < 1e-5


def test_nominal_hinf_norm_rejects_unstable():
    z = np.zeros((1, 1))
    sys = new_statespace(
        dict(A=[[1.0]], B1=z, B2=[[1.0]], C1=z, C2=[[1.0]], D11=z, D12=z,
             D21=z, D22=z),
        (1, 1, 1, 1),
    )
    with pytest.raises(UnstableNominal):
        nominal_hinf_norm(sys)


def test_empirical_gain_reproducible_and_bounded(bench_sys):
    lb1 = empirical_gain_lb(bench_sys, Sector(0, 1), trials=5, horizon=60,
                            seed=7)
    lb2 = empirical_gain_lb(bench_sys, Sector(0, 1), trials=5, horizon=60,
                            seed=7)
    assert lb1 == lb2
    assert lb1 > 0.0
    with pytest.raises(ValueError):
        empirical_gain_lb(bench_sys, Sector(0, 1), trials=0)


def test_empirical_gain_zero_sector_below_nominal(bench_sys):
    # with the zero sector the loop is open: empirical gain is a lower bound
    # of the nominal channel norm
    lb = empirical_gain_lb(bench_sys, Sector(0.0, 0.0), trials=10,
                           horizon=120, seed=0)
    assert lb <= nominal_hinf_norm(bench_sys) + 1e-9


def test_empirical_gain_zero_input():
    sys = zero_system()
    assert empirical_gain_lb(sys, Sector(0, 1), trials=3, horizon=10) == 0.0


def test_dissipation_certificate_bound(bench_sys):
    from sectorbound import lmi
    from sectorbound.multipliers import MultiplierKind

    res = lmi.analyze_class(bench_sys, Sector(0, 1),
                            MultiplierKind.VERTEX_CONVEX)
    assert res.optimal
    rng = np.random.default_rng(5)
    for trial in range(5):
        neg, pos = rng.uniform(0, 1, (2, 3))
        phi = [
            (lambda a, b: (lambda x: a * x if x <= 0 else b * x))(neg[i], pos[i])
            for i in range(3)
        ]
        u = rng.standard_normal((80, 1))
        traj = simulate(bench_sys, phi, u)
        scale = float(np.sum(u**2)) * res.gamma_sq
        assert dissipation_excess(traj, res.P.mat, res.gamma_sq) \
            <= 1e-6 * (1.0 + scale)
