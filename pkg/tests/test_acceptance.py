"""
Acceptance suite.  Each test is named ``test_c<k>_...`` after the criterion
it checks; the terminal summary prints one PASS/FAIL line per criterion.
Tolerances are fixed by the criteria, not tuned to the implementation.
"""
import os
import time

import numpy as np
import pytest

from conftest import fd_hessian, mp_third_derivatives_of_entropy, random_ball_points
from geoecon.cli import EXIT_OK, main
from geoecon.complexity import (
    PiecewiseHamiltonian,
    VariationState,
    brandt_rhs,
    cost,
    integrate_brandt,
    project_p,
    project_q,
    split_pq,
)
from geoecon.geometry import (
    christoffel,
    dual_coords,
    chi_to_r,
    field_to_csv,
    geodesic_acceleration,
    geodesic_residual,
    integrate_geodesic,
    legendre_F,
    metric_arrays,
    shaded_fraction,
    sustainability_grid,
)
from geoecon.open_system import (
    ControlPath,
    constant_metric,
    dissipation_integral,
    integrate_geodesic_open,
    inverse_square_metric,
    provider_from_expr,
)
from geoecon.pauli import AlgebraElement, string_to_matrix
from geoecon.qubit import (
    WealthSpectrum,
    build_unitary,
    closed_form_q,
    density_matrix,
    evolve_density,
    integrate_q,
    phase_integral,
)
from geoecon.tomography import CountTriplet, direct_inversion, sample_counts

SEED = 20261018
DELTA = 0.1
FIG_TIMES = (0.0, 0.2, 0.4, 0.6, 0.8)
THRESHOLD = 0.01


def eig_entropy(r):
    p = np.linalg.eigvalsh(density_matrix(r))
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


@pytest.fixture(scope="module")
def geometry_points():
    return random_ball_points(np.random.default_rng(SEED), 100, 0.05, 0.9)


# -- 1 ---------------------------------------------------------------------


def test_c1_sustainability_patterns():
    workers = min(4, os.cpu_count() or 1)
    start = time.perf_counter()
    fields = [sustainability_grid(DELTA, f * np.pi / DELTA, 0.01, 0.0, workers=workers) for f in FIG_TIMES]
    elapsed = time.perf_counter() - start
    print(f"five 201x201 fields in {elapsed:.2f} s on {workers} worker(s)")
    assert elapsed < 60.0
    for field in fields:
        assert field.shape == (201, 201)
        shaded = ~field.mask & (np.nan_to_num(field.values, nan=np.inf) < THRESHOLD)
        assert shaded.any()
        r1, r2 = np.meshgrid(field.axis, field.axis)
        radius = np.hypot(r1, r2)
        assert shaded[radius <= 0.1].all()
        assert np.all(radius[shaded] < 1.0)


# -- 2 ---------------------------------------------------------------------


def test_c2_collapse_monotone():
    fractions = [shaded_fraction(sustainability_grid(d, np.pi / (2 * d), 0.01)) for d in (0.1, 0.2, 0.5, 1.0)]
    print("shaded fractions at half period:", fractions)
    assert all(a >= b for a, b in zip(fractions, fractions[1:]))
    assert any(a > b for a, b in zip(fractions, fractions[1:]))


# -- 3 ---------------------------------------------------------------------


def test_c3_evolution():
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        e_m, delta = rng.uniform(-2.0, 2.0), rng.uniform(0.25, 2.0)
        t = rng.uniform(0.0, 10.0)
        spec = WealthSpectrum(e_m + delta, e_m - delta)
        q = integrate_q(spec.coeffs, 0.0, t)
        assert np.max(np.abs(q - closed_form_q(spec, 0.0, t))) < 1e-8
        u = build_unitary(q, phase_integral(spec.coeffs, 0.0, t))
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-10
        r0 = random_ball_points(rng, 1, 0.0, 1.0)[0]
        r_t = evolve_density(r0, u)
        assert abs(np.linalg.norm(r_t) - np.linalg.norm(r0)) < 1e-10
        # one period pi/Delta later the state returns (q changes sign only)
        period = np.pi / spec.half_range
        q_p = integrate_q(spec.coeffs, 0.0, t + period)
        assert np.max(np.abs(q_p + q)) < 1e-9
        r_p = evolve_density(r0, build_unitary(q_p))
        assert np.max(np.abs(r_p - r_t)) < 1e-9


# -- 4 ---------------------------------------------------------------------


def test_c4_metric_is_minus_entropy_hessian(geometry_points):
    g_cov, _ = metric_arrays(geometry_points)
    for r, g in zip(geometry_points, g_cov):
        assert np.max(np.abs(g + fd_hessian(eig_entropy, r, 1e-4))) < 1e-5


def test_c4_metric_inverse(geometry_points):
    g_cov, g_contra = metric_arrays(geometry_points)
    prod = np.einsum("...ij,...jk->...ik", g_cov, g_contra)
    assert np.max(np.abs(prod - np.eye(3))) < 1e-8


def test_c4_christoffel_third_derivative(geometry_points):
    gam = christoffel(geometry_points)
    worst = 0.0
    for r, g in zip(geometry_points, gam):
        worst = max(worst, np.max(np.abs(g + 0.5 * mp_third_derivatives_of_entropy(r))))
    print(f"max |Gamma + d3S/2| = {worst:.2e}")
    assert worst < 1e-4


def test_c4_contravariant_is_minus_legendre_hessian(geometry_points):
    # literal criterion: g^jk = -d2F/dchi_j dchi_k.  F is convex, so this
    # is expected to fail with |lhs - rhs| = 2 |g^jk|; see the unit test of
    # the positive identity in test_geometry.
    _, g_contra = metric_arrays(geometry_points)

    def f_of_chi(chi):
        return legendre_F(chi_to_r(chi))

    worst = 0.0
    for r, gc in zip(geometry_points, g_contra):
        hess = fd_hessian(f_of_chi, dual_coords(r), 1e-4)
        worst = max(worst, np.max(np.abs(gc + hess)))
    print(f"max |g_contra + Hess F| = {worst:.3e}")
    assert worst < 1e-4


def test_c4_christoffel_symmetric(geometry_points):
    gam = christoffel(geometry_points)
    scale = np.max(np.abs(gam))
    for perm in [(0, 2, 1, 3), (0, 1, 3, 2), (0, 3, 2, 1), (0, 2, 3, 1), (0, 3, 1, 2)]:
        assert np.max(np.abs(gam - gam.transpose(perm))) <= 4 * np.finfo(float).eps * scale


# -- 5 ---------------------------------------------------------------------


def test_c5_geodesic_self_consistency():
    rng = np.random.default_rng(SEED)
    step = 1e-3
    for r0 in random_ball_points(rng, 10, 0.05, 0.8):
        v0 = rng.normal(size=3) * 0.2
        path = integrate_geodesic(r0, v0, 2.0, step=step)
        pos = path.positions
        acc = (pos[2:] - 2 * pos[1:-1] + pos[:-2]) / step**2
        vel = (pos[2:] - pos[:-2]) / (2 * step)
        _, a = geodesic_residual(pos[1:-1], vel, acc)
        assert np.max(a) < 1e-4
    for r in random_ball_points(rng, 20, 0.0, 0.99):
        _, a = geodesic_residual(r, np.zeros(3), np.zeros(3))
        assert a == 0.0
    assert np.array_equal(geodesic_acceleration(r, np.zeros(3)), np.zeros(3))


# -- 6 ---------------------------------------------------------------------


def test_c6_tomography():
    rng = np.random.default_rng(SEED)
    for r in random_ball_points(rng, 20, 0.0, 1.0):
        r = np.round(r, 4)
        alive = np.rint(20_000 * (1 + r) / 2).astype(int)
        est, _ = direct_inversion(CountTriplet(tuple(alive), tuple(20_000 - alive)))
        assert np.max(np.abs(est - r)) < 1e-12
    r_true = np.array([0.3, -0.5, 0.6])
    good = 0
    for seed in range(100):
        est, _ = direct_inversion(sample_counts(r_true, 100_000, np.random.default_rng(seed)))
        good += np.linalg.norm(est - r_true) < 0.02
    assert good >= 99


# -- 7 ---------------------------------------------------------------------


def test_c7_open_system():
    flat = constant_metric([[2.0]])
    line = integrate_geodesic_open(flat, [0.5], [1.5], 1.0)
    assert np.max(np.abs(line.values[:, 0] - (0.5 + 1.5 * line.times))) < 1e-12

    p = inverse_square_metric()
    geo = integrate_geodesic_open(p, [1.0], [1.0], 1.0, step=1e-3)
    assert np.max(np.abs(geo.values[:, 0] - np.exp(geo.times))) < 1e-6

    rng = np.random.default_rng(SEED)
    base = dissipation_integral(p, geo)
    t = geo.times
    for _ in range(100):
        modes = rng.integers(1, 5, size=2)
        amp = rng.uniform(-0.2, 0.2, size=2)
        bump = amp[0] * np.sin(modes[0] * np.pi * t) + amp[1] * np.sin(modes[1] * np.pi * t) ** 2
        other = ControlPath(t, geo.values + bump[:, None])
        assert base <= dissipation_integral(p, other) * (1 + 1e-6)

    g2 = provider_from_expr("1 + lambda_1**2; 0.2*lambda_2; 0.2*lambda_2; 2 + sin(lambda_1)", 2)
    path = integrate_geodesic_open(g2, [0.1, 0.4], [0.7, -0.5], 2.0)
    speed = np.array([v @ g2(lam) @ v for lam, v in zip(path.values, path.velocities)])
    assert np.max(np.abs(speed / speed[0] - 1)) < 1e-5


# -- 8 ---------------------------------------------------------------------


def test_c8_complexity():
    rng = np.random.default_rng(SEED)
    words2 = ["IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"]
    for _ in range(10):
        h = AlgebraElement.from_terms({w: rng.normal() for w in words2})
        vals = [cost(h, q) for q in (0.5, 1.0, 10.0)]
        assert vals[0] == vals[1] == vals[2]

    h3 = AlgebraElement.from_terms({w: rng.normal() for w in ("XXI", "ZZZ", "IYX", "XYZ", "ZII")})
    parts = split_pq(h3)
    assert split_pq(parts.p_part).p_part == parts.p_part
    assert len(split_pq(parts.p_part).q_part) == 0
    assert len(split_pq(parts.q_part).p_part) == 0
    assert parts.p_part + parts.q_part == h3
    m = h3.matrix()
    assert np.max(np.abs(project_p(m) + project_q(m) - m)) < 1e-14

    for terms in ({"ZII": 1.0, "XXI": 0.4}, {"XXX": 1.0, "ZYX": -0.7}):
        _, ks = integrate_brandt(AlgebraElement.from_terms(terms), VariationState.zero(3), 2.0, 5.0)
        assert np.max(np.abs(ks)) == 0.0

    h = AlgebraElement.from_terms({"ZII": 1.0, "XXX": 1.0})
    for q in (0.5, 1.0, 4.0):
        rhs = brandt_rhs(h, VariationState.zero(3), q)
        assert np.max(np.abs(rhs - 2 / q**2 * string_to_matrix("YXX"))) < 1e-10

    words3 = ["ZII", "XXX", "XYI", "IZZ", "YXZ", "IIX"]
    blocks = [
        AlgebraElement.from_terms({w: rng.normal() for w in rng.choice(words3, 3, replace=False)}) for _ in range(5)
    ]
    path = PiecewiseHamiltonian([0.0, 20.0, 40.0, 60.0, 80.0], blocks)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    k0 = 0.05 * (a + a.conj().T)
    k0 -= np.trace(k0) / 8 * np.eye(8)
    _, ks = integrate_brandt(path, VariationState(k0), 2.0, 100.0, step=1e-2, record_every=50)
    assert np.max(np.abs(ks - ks.conj().transpose(0, 2, 1))) < 1e-8
    assert np.max(np.abs(np.trace(ks, axis1=1, axis2=2))) < 1e-8


# -- 9 ---------------------------------------------------------------------


def test_c9_grid_worker_independence():
    one = field_to_csv(sustainability_grid(DELTA, 0.4 * np.pi / DELTA, 0.01, workers=1))
    four = field_to_csv(sustainability_grid(DELTA, 0.4 * np.pi / DELTA, 0.01, workers=4))
    assert one == four


def test_c9_manifest_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sustainability-grid", "--out", str(a), "--grid-step", "0.02", "--workers", "4"]) == EXIT_OK
    assert main(["sustainability-grid", "--config", str(a / "manifest.txt"), "--out", str(b), "--workers", "1"]) == EXIT_OK
    for p in sorted(a.iterdir()):
        if p.name != "manifest.txt":
            assert (b / p.name).read_bytes() == p.read_bytes(), p.name
    c = tmp_path / "c"
    c.mkdir()
    manifest = (a / "manifest.txt").read_text().replace(f"out = {a}", f"out = {c}")
    (c / "in.txt").write_text(manifest)
    assert main(["sustainability-grid", "--config", str(c / "in.txt")]) == EXIT_OK
    assert (c / "manifest.txt").read_text() == manifest
