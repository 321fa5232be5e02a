"""
Reading off the initial mixing
==============================

Direct inversion of counts from three projective measurements, and how the
error scales with the number of shots.
"""
import numpy as np

from geoecon.tomography import CountTriplet, direct_inversion, sample_counts

r_true = np.array([0.3, -0.5, 0.6])
rng = np.random.default_rng(7)

# %%
# A hand-made count table
r, valid = direct_inversion(CountTriplet(alive=(60, 50, 90), dead=(40, 50, 10)))
print("estimate", r, "inside the ball:", valid)

# %%
# Error against shots per axis: roughly 1/sqrt(N)
for shots in (100, 1_000, 10_000, 100_000):
    errs = [np.linalg.norm(direct_inversion(sample_counts(r_true, shots, rng))[0] - r_true) for _ in range(200)]
    print(f"N = {shots:>6}  mean error {np.mean(errs):.4f}  99th pct {np.percentile(errs, 99):.4f}")

# %%
# Near-pure states: noise can push the estimate outside the ball.  It is
# flagged, not projected back.
edge = np.array([0.0, 0.6, 0.8])
flags = [direct_inversion(sample_counts(edge, 50, rng))[1] for _ in range(1000)]
print("fraction of unphysical estimates at N = 50:", 1 - np.mean(flags))
