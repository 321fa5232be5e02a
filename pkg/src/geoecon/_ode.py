import numpy as np


def rk4(rhs, y0, t0, t1, step, callback=None):
    """Fixed-step classical Runge-Kutta from ``t0`` to ``t1``.

    The last step is shortened so the integration lands exactly on ``t1``.
    ``rhs(t, y)`` must return an array shaped like ``y``.  If ``callback`` is
    given it is called as ``callback(t, y)`` after every step (and once at
    ``t0``); returning ``False`` stops the integration early.

    Returns the final ``(t, y)``.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    y = np.array(y0, copy=True)
    t = float(t0)
    n_full = int(np.floor((t1 - t0) / step + 1e-9))
    if callback is not None and callback(t, y) is False:
        return t, y
    steps = [step] * n_full
    rest = (t1 - t0) - n_full * step
    if rest > 1e-12 * max(1.0, abs(t1)):
        steps.append(rest)
    for i, h in enumerate(steps):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        # accumulate from t0 to avoid drift in the time grid
        t = t0 + (i + 1) * step if i < n_full else float(t1)
        if callback is not None and callback(t, y) is False:
            break
    return t, y
