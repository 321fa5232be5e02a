"""
Minimal-dissipation driving
===========================

For a dissipation rate that is quadratic in the driving speed, the metric
is read off from the velocity Hessian.  Its geodesics are the protocols
that waste least between fixed end points.
"""
import numpy as np

from geoecon.open_system import (
    ControlPath,
    RateModel,
    dissipation_integral,
    integrate_geodesic_open,
    metric_from_rate,
    provider_from_rate,
)

# rate = lambda^-2 * lambda_dot^2, so the metric is 1/lambda^2
model = RateModel(beta=1.0, rate=lambda lam, v: (v[0] / lam[0]) ** 2)
print("metric at lambda = 2:", metric_from_rate(model, [2.0])[0, 0])

p = provider_from_rate(model, alpha=1)
geo = integrate_geodesic_open(p, [1.0], [1.0], duration=1.0, step=1e-2)
print("geodesic end point", geo.values[-1, 0], "vs e =", np.e)

# %%
# Compare with the straight ramp between the same end points
t = geo.times
ramp = ControlPath(t, (1 + (np.e - 1) * t)[:, None])
print(f"dissipation: geodesic {dissipation_integral(p, geo):.5f}   linear ramp {dissipation_integral(p, ramp):.5f}")
