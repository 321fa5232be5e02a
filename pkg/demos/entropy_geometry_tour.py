"""
The entropy metric on the Bloch ball
====================================

A short tour: the metric is the negative entropy Hessian, it blows up
radially at the pure states, and its geodesics conserve the kinetic
energy g(v, v).
"""
import numpy as np

from geoecon.geometry import (
    christoffel,
    dual_coords,
    entropy,
    integrate_geodesic,
    legendre_F,
    metric,
    metric_arrays,
)

np.set_printoptions(precision=4, suppress=True)

# %%
# Entropy drops from ln 2 at the centre to 0 at the surface
for x in (0.0, 0.5, 0.9, 0.99):
    print(f"|r| = {x:<5} S = {entropy([x, 0, 0]):.6f}")

# %%
# Along the radial direction the metric grows like 1/(1 - x^2);
# tangentially only like artanh(x)/x
for x in (0.5, 0.9, 0.99):
    g = metric(np.array([x, 0.0, 0.0])).g_cov
    print(f"|r| = {x:<5} radial {g[0, 0]:9.3f}  tangential {g[1, 1]:.3f}")

# %%
# Dual coordinates and the Legendre potential F = ln(2 cosh|chi|)
r = np.array([0.3, -0.2, 0.5])
chi = dual_coords(r)
print("chi =", chi, " F =", legendre_F(r), " ln 2cosh|chi| =", np.log(2 * np.cosh(np.linalg.norm(chi))))

# %%
# Christoffel symbols are fully symmetric in their three indices
gam = christoffel(r)
print("max asymmetry:", np.max(np.abs(gam - gam.transpose(1, 2, 0))))

# %%
# A geodesic launched tangentially bends away from the surface
path = integrate_geodesic([0.6, 0.0, 0.0], [0.0, 0.4, 0.0], duration=5.0)
g, _ = metric_arrays(path.positions)
speed = np.einsum("ti,tij,tj->t", path.velocities, g, path.velocities)
print("end point:", path.positions[-1], " |r| =", np.linalg.norm(path.positions[-1]))
print("relative drift of g(v, v):", np.ptp(speed) / speed[0])
