"""
Command-line front end: ``geoecon <command> [--config FILE] [flags]``.

Every run writes its outputs plus ``manifest.txt`` (the fully resolved
configuration) into the output directory.  ``--config out/manifest.txt``
reproduces the run.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import complexity, geometry, open_system, qubit, render, tomography
from .config import COMMANDS, RunConfig, parse_config, schema
from .errors import ConfigError, DomainError, GeoEconError
from .pauli import all_strings, coefficients, parse_element

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

# flag -> candidate config keys, first one present in the command schema wins
FLAG_KEYS = {
    "out": ("out",),
    "delta": ("delta",),
    "time": ("times", "time", "duration"),
    "grid_step": ("grid_step",),
    "threshold": ("threshold",),
    "source": ("source",),
    "penalty": ("penalty",),
    "workers": ("workers",),
    "seed": ("seed",),
}


def _csv_row(values):
    return ",".join(v if isinstance(v, str) else repr(float(v)) for v in values) + "\n"


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def run_evolve(cfg, out: Path):
    spec = qubit.WealthSpectrum(cfg["e_a"], cfg["e_d"])
    r0 = np.array([cfg["r1"], cfg["r2"], cfg["r3"]])
    times = np.linspace(0.0, cfg["time"], cfg["samples"])
    with open(out / "evolve.csv", "w") as fh:
        fh.write("t,u,v1,v2,v3,r1,r2,r3,r1_paper,r2_paper,r3_paper\n")
        q, t_prev = np.array([1.0, 0, 0, 0]), 0.0
        for t in times:
            # continue the integration segment by segment
            if t > t_prev:
                seg = qubit.integrate_q(spec.coeffs, t_prev, t, cfg["step"])
                q = _compose(seg, q)
            u_mat = qubit.build_unitary(q / np.linalg.norm(q), t * spec.mean)
            r = qubit.evolve_density(r0, u_mat)
            rp = qubit.paper_trajectory(r0, spec.half_range, t)
            fh.write(_csv_row([t, *q, *r, *rp]))
            t_prev = t
    return ["evolve.csv"]


def _compose(later, earlier):
    """Quaternion of ``U_later U_earlier`` for the ``u s0 + i v.s`` form."""
    u2, v2 = later[0], later[1:]
    u1, v1 = earlier[0], earlier[1:]
    # (u2 + i v2.s)(u1 + i v1.s) = u2u1 - v2.v1 + i(u2 v1 + u1 v2 - v2 x v1)
    return np.concatenate([[u2 * u1 - v2 @ v1], u2 * v1 + u1 * v2 - np.cross(v2, v1)])


def run_entropy_map(cfg, out: Path):
    if cfg["points"]:
        pts = np.array(
            [[float(x) for x in ln.replace(",", " ").split()] for ln in _read(cfg["points"]).splitlines()
             if ln.strip() and not ln.startswith("#")]
        )
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DomainError("points file needs three numbers per line")
    else:
        d = np.array(cfg["direction"])
        if not np.linalg.norm(d) > 0:
            raise DomainError("direction must be non-zero")
        d = d / np.linalg.norm(d)
        pts = np.linspace(0.0, cfg["radius_max"], cfg["samples"])[:, None] * d
    names = ["r1", "r2", "r3", "S", "chi1", "chi2", "chi3", "F"]
    names += [f"g_{j}{k}" for j in (1, 2, 3) for k in (1, 2, 3)]
    names += [f"ginv_{j}{k}" for j in (1, 2, 3) for k in (1, 2, 3)]
    names += [f"gamma_{j}{k}{l}" for j in (1, 2, 3) for k in (1, 2, 3) for l in (1, 2, 3)]
    with open(out / "entropy_map.csv", "w") as fh:
        fh.write(",".join(names) + "\n")
        for r in pts:
            m = geometry.metric(r)
            row = [*r, geometry.entropy(r), *geometry.dual_coords(r), geometry.legendre_F(r)]
            row += [*m.g_cov.ravel(), *m.g_contra.ravel(), *geometry.christoffel(r).ravel()]
            fh.write(_csv_row(row))
    return ["entropy_map.csv"]


def run_geodesic(cfg, out: Path):
    r0 = [cfg["r1"], cfg["r2"], cfg["r3"]]
    v0 = [cfg["v1"], cfg["v2"], cfg["v3"]]
    path = geometry.integrate_geodesic(r0, v0, cfg["duration"], cfg["step"])
    with open(out / "geodesic.csv", "w") as fh:
        fh.write(f"# hit_boundary={int(path.hit_boundary)}\n")
        fh.write("t,r1,r2,r3,v1,v2,v3,S\n")
        for i in range(0, path.times.size, cfg["record_every"]):
            r = path.positions[i]
            fh.write(_csv_row([path.times[i], *r, *path.velocities[i], geometry.entropy(r)]))
    return ["geodesic.csv"]


def run_sustainability_grid(cfg, out: Path):
    delta = cfg["delta"]
    written = []
    for i, frac in enumerate(cfg["times"]):
        field = geometry.sustainability_grid(
            delta, frac * np.pi / delta, cfg["grid_step"], cfg["r3_0"], cfg["source"], cfg["workers"]
        )
        stem = f"field_{i}"
        with open(out / f"{stem}.csv", "w") as fh:
            geometry.write_field_csv(field, fh)
        (out / f"{stem}.pgm").write_bytes(render.render_heatmap(field, cfg["threshold"]))
        written += [f"{stem}.csv", f"{stem}.pgm"]
    curve = geometry.collapse_curve(
        cfg["collapse_deltas"], cfg["threshold"], cfg["grid_step"], cfg["r3_0"], cfg["source"], cfg["workers"]
    )
    with open(out / "collapse.csv", "w") as fh:
        fh.write("delta,shaded_fraction\n")
        for d, frac in curve:
            fh.write(_csv_row([d, frac]))
    return written + ["collapse.csv"]


def run_tomography(cfg, out: Path):
    if cfg["counts"]:
        counts = tomography.parse_counts(_read(cfg["counts"]))
    else:
        rng = np.random.default_rng(cfg["seed"])
        counts = tomography.sample_counts([cfg["r1"], cfg["r2"], cfg["r3"]], cfg["shots"], rng)
    r, valid = tomography.direct_inversion(counts)
    with open(out / "tomography.csv", "w") as fh:
        fh.write("axis,N_a,N_d\n")
        for j in range(3):
            fh.write(f"{j + 1},{counts.alive[j]},{counts.dead[j]}\n")
        fh.write("r1,r2,r3,valid\n")
        fh.write(_csv_row([*r, str(int(valid))]))
    return ["tomography.csv"]


def _provider(cfg):
    return open_system.provider_from_expr(
        cfg["metric.expr"], cfg["metric.alpha"], cfg["metric.kind"], cfg["beta"]
    )


def run_open_geodesic(cfg, out: Path):
    p = _provider(cfg)
    path = open_system.integrate_geodesic_open(p, cfg["lambda0"], cfg["velocity"], cfg["duration"], cfg["step"])
    with open(out / "open_geodesic.csv", "w") as fh:
        if path.truncated:
            fh.write("# truncated=1\n")
        open_system.write_path_csv(path, fh)
    with open(out / "dissipation.csv", "w") as fh:
        fh.write("dissipation\n")
        fh.write(_csv_row([open_system.dissipation_integral(p, path)]))
    return ["open_geodesic.csv", "dissipation.csv"]


def run_dissipation(cfg, out: Path):
    p = _provider(cfg)
    path = open_system.read_path_csv(_read(cfg["path"]))
    if path.alpha != p.alpha:
        raise ConfigError(f"path has {path.alpha} coefficients, metric.alpha is {p.alpha}")
    with open(out / "dissipation.csv", "w") as fh:
        fh.write("dissipation\n")
        fh.write(_csv_row([open_system.dissipation_integral(p, path)]))
    return ["dissipation.csv"]


def run_complexity_cost(cfg, out: Path):
    h = parse_element(_read(cfg["hamiltonian"]))
    q, norm = cfg["penalty"], cfg["normalize_q_term"]
    split = complexity.split_pq(h)
    with open(out / "complexity_cost.csv", "w") as fh:
        fh.write("n,penalty,cost,p_cost,q_cost\n")
        fh.write(
            _csv_row(
                [
                    str(h.n),
                    q,
                    complexity.cost(h, q, norm),
                    complexity.cost(split.p_part, q, norm),
                    complexity.cost(split.q_part, q, norm),
                ]
            )
        )
    return ["complexity_cost.csv"]


def run_brandt(cfg, out: Path):
    hpath = complexity.parse_hamiltonian_path(_read(cfg["hpath"]))
    if cfg["k0"]:
        k0 = complexity.VariationState(parse_element(_read(cfg["k0"])).matrix(), hpath.times[0])
    else:
        k0 = complexity.VariationState.zero(hpath.n, hpath.times[0])
    times, ks = complexity.integrate_brandt(
        hpath, k0, cfg["penalty"], cfg["duration"], cfg["step"], cfg["record_every"]
    )
    words = [str(s) for s in all_strings(hpath.n)[1:]]
    with open(out / "brandt.csv", "w") as fh:
        fh.write("t," + ",".join(words) + ",hermitian_dev,trace_dev\n")
        for t, k in zip(times, ks):
            c = coefficients(k).real[1:]
            herm = np.max(np.abs(k - k.conj().T))
            fh.write(_csv_row([t, *c, herm, abs(np.trace(k))]))
    return ["brandt.csv"]


RUNNERS = {
    "evolve": run_evolve,
    "entropy-map": run_entropy_map,
    "geodesic": run_geodesic,
    "sustainability-grid": run_sustainability_grid,
    "tomography": run_tomography,
    "open-geodesic": run_open_geodesic,
    "dissipation": run_dissipation,
    "complexity-cost": run_complexity_cost,
    "brandt": run_brandt,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="geoecon", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--delta")
        p.add_argument("--time", help="evaluation time(s); for sustainability-grid, multiples of pi/delta")
        p.add_argument("--grid-step", dest="grid_step")
        p.add_argument("--threshold")
        p.add_argument("--source", choices=("paper", "exact"))
        p.add_argument("--penalty")
        p.add_argument("--workers")
        p.add_argument("--seed")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any key")
    return parser


def resolve(args) -> RunConfig:
    keys = schema(args.command)
    overrides = []
    for flag, candidates in FLAG_KEYS.items():
        val = getattr(args, flag)
        if val is None:
            continue
        key = next((k for k in candidates if k in keys), None)
        if key is None:
            raise ConfigError(f"--{flag.replace('_', '-')} does not apply to {args.command}")
        overrides.append((key, val))
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides.append((key.strip(), val.strip()))
    text = _read(args.config) if args.config else ""
    return parse_config(text, overrides, args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.txt").write_text(cfg.to_text())
        written = RUNNERS[cfg.command](cfg, out)
    except ConfigError as exc:
        print(f"geoecon: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, GeoEconError) as exc:
        print(f"geoecon: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"geoecon: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for name in ["manifest.txt", *written]:
        print(out / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
