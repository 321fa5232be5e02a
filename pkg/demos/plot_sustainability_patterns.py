"""
Patterns of sustainability
==========================

Evaluate the unsustainability A over a grid of initial mixings for the
fixed two-level wealth spectrum, at five times across one period, and
write each field as CSV plus a grayscale heatmap.  Then sweep Delta and
watch the shaded (A < 0.01) region shrink.
"""
from pathlib import Path

import numpy as np

from geoecon.geometry import collapse_curve, shaded_fraction, sustainability_grid, write_field_csv
from geoecon.render import render_heatmap

out = Path("demo_out/patterns")
out.mkdir(parents=True, exist_ok=True)

delta = 0.1

# %%
# Five snapshots, times in units of pi / Delta
for frac in (0.0, 0.2, 0.4, 0.6, 0.8):
    field = sustainability_grid(delta, frac * np.pi / delta, grid_step=0.01)
    with open(out / f"field_{frac:.1f}.csv", "w") as fh:
        write_field_csv(field, fh)
    (out / f"field_{frac:.1f}.pgm").write_bytes(render_heatmap(field))
    print(f"t = {frac:.1f} pi/Delta   shaded fraction of the disc: {shaded_fraction(field):.3f}")

# %%
# Collapse with increasing Delta, measured at half period
for d, frac in collapse_curve():
    print(f"Delta = {d:<4}  shaded fraction = {frac:.4f}")

# %%
# The closed-form trajectory that modulates only r1 can leave the Bloch
# ball; those cells are masked (black in the heatmaps).  The exact
# conjugation trajectory keeps |r| fixed, so inside the disc it only masks
# the thin shell r_max <= |r(0)| < 1.
t = 0.25 * np.pi / delta
paper = sustainability_grid(delta, t, grid_step=0.01)
exact = sustainability_grid(delta, t, grid_step=0.01, source="exact")
disc = paper.in_disc()
print("masked disc cells at t = pi/(4 Delta): paper", int((paper.mask & disc).sum()), " exact", int((exact.mask & disc).sum()))
