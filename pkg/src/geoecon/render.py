"""Plain-text grayscale (PGM ``P2``) rendering of sustainability fields."""
import numpy as np

from .geometry import A_THRESHOLD, SustainabilityField

MASKED = 0
CIRCLE = 64
SHADED = 128
CLEAR = 255


def heatmap_pixels(field: SustainabilityField, threshold=A_THRESHOLD) -> np.ndarray:
    """Pixel grid with the largest ``r2`` in the top row.

    Masked cells are black, ``A < threshold`` mid-grey, other cells white.
    Cells outside the disc ``|r(0)| < 1`` that touch it (4-neighbourhood)
    trace the circle at value 64.
    """
    vals = np.nan_to_num(field.values, nan=np.inf)
    img = np.where(field.mask, MASKED, np.where(vals < threshold, SHADED, CLEAR))
    disc = field.in_disc()
    near = np.zeros_like(disc)
    near[1:, :] |= disc[:-1, :]
    near[:-1, :] |= disc[1:, :]
    near[:, 1:] |= disc[:, :-1]
    near[:, :-1] |= disc[:, 1:]
    img = np.where(~disc & near, CIRCLE, img)
    return img[::-1].astype(np.uint8)


def render_heatmap(field: SustainabilityField, threshold=A_THRESHOLD) -> bytes:
    img = heatmap_pixels(field, threshold)
    h, w = img.shape
    lines = [
        "P2",
        f"# delta={float(field.delta)!r} eval_time={float(field.eval_time)!r} threshold={float(threshold)!r}",
        f"{w} {h}",
        "255",
    ]
    lines += [" ".join(str(int(p)) for p in row) for row in img]
    return ("\n".join(lines) + "\n").encode("ascii")


def read_pgm(data: bytes) -> np.ndarray:
    tokens = []
    for line in data.decode("ascii").splitlines():
        tokens += line.split("#", 1)[0].split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM")
    w, h, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    return np.array([int(t) for t in tokens[4 : 4 + w * h]]).reshape(h, w)
