import itertools

import mpmath
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_ball_points(rng, count, rmin, rmax):
    """Points with |r| uniform in [rmin, rmax] and uniformly random direction."""
    d = rng.normal(size=(count, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(rmin, rmax, size=(count, 1))


def fd_hessian(f, x, h):
    """Central-difference Hessian of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    n = x.size
    e = np.eye(n) * h
    out = np.empty((n, n))
    for j in range(n):
        for k in range(n):
            out[j, k] = (
                f(x + e[j] + e[k]) - f(x + e[j] - e[k]) - f(x - e[j] + e[k]) + f(x - e[j] - e[k])
            ) / (4 * h * h)
    return out


def fd_gradient(f, x, h):
    x = np.asarray(x, dtype=float)
    e = np.eye(x.size) * h
    return np.array([(f(x + e[j]) - f(x - e[j])) / (2 * h) for j in range(x.size)])


def _mp_entropy(r):
    x = mpmath.sqrt(sum(c * c for c in r))
    out = mpmath.mpf(0)
    for xi in ((1 + x) / 2, (1 - x) / 2):
        if xi > 0:
            out -= xi * mpmath.log(xi)
    return out


def mp_third_derivatives_of_entropy(r, dps=40, h="1e-10"):
    """All d^3 S / dr_j dr_k dr_l by central differences in extended precision.

    Uses only the eigenvalue formula for the entropy, so it is independent of
    every closed form in the package.
    """
    with mpmath.workdps(dps):
        r = [mpmath.mpf(float(c)) for c in r]
        h = mpmath.mpf(h)
        out = np.empty((3, 3, 3))
        for j, k, l in itertools.product(range(3), repeat=3):
            acc = mpmath.mpf(0)
            for s in itertools.product((1, -1), repeat=3):
                p = list(r)
                p[j] += s[0] * h
                p[k] += s[1] * h
                p[l] += s[2] * h
                acc += s[0] * s[1] * s[2] * _mp_entropy(p)
            out[j, k, l] = float(acc / (8 * h**3))
    return out


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion (tests named ``test_c<k>_...``)."""
    if not ACCEPTANCE:
        return
    groups = {}
    for name, outcome in ACCEPTANCE.items():
        key = int(name.split("_")[1][1:])
        groups.setdefault(key, []).append((name, outcome))
    terminalreporter.section("acceptance criteria")
    for key in sorted(groups):
        items = groups[key]
        ok = all(o == "passed" for _, o in items)
        failed = [n for n, o in items if o != "passed"]
        tail = f"  failing: {', '.join(failed)}" if failed else ""
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} ({len(items)} checks){tail}")
