import numpy as np
import pytest

from geoecon.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO, EXIT_OK, main
from geoecon.config import COMMANDS, parse_config
from geoecon.errors import ConfigError
from geoecon.geometry import grid_axis, read_field_csv
from geoecon.render import read_pgm


def test_flag_overrides_file():
    cfg = parse_config("delta = 0.1\n", [("delta", "0.2")])
    assert cfg["delta"] == 0.2


def test_grid_defaults():
    cfg = parse_config("", command="sustainability-grid")
    assert cfg["delta"] == 0.1
    assert cfg["threshold"] == 0.01
    assert grid_axis(cfg["grid_step"]).size == 201
    assert cfg["times"] == (0.0, 0.2, 0.4, 0.6, 0.8)


@pytest.mark.parametrize(
    "text",
    ["grid_step = -1\n", "delta = 0\n", "source = other\n", "workers = 0\n", "bogus = 1\n", "delta\n", "delta = x\n"],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_required_keys():
    with pytest.raises(ConfigError):
        parse_config("", command="complexity-cost")


@pytest.mark.parametrize("command", COMMANDS)
def test_manifest_round_trip(command):
    required = {"dissipation": "path = p.csv\n", "complexity-cost": "hamiltonian = h.txt\n", "brandt": "hpath = h.txt\n"}
    cfg = parse_config(required.get(command, ""), command=command)
    again = parse_config(cfg.to_text(), command=command)
    assert again == cfg
    assert again.to_text() == cfg.to_text()


def test_grid_command(tmp_path):
    out = tmp_path / "grid"
    code = main(["sustainability-grid", "--out", str(out), "--grid-step", "0.1", "--time", "0,0.5"])
    assert code == EXIT_OK
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "collapse.csv",
        "field_0.csv",
        "field_0.pgm",
        "field_1.csv",
        "field_1.pgm",
        "manifest.txt",
    ]
    field = read_field_csv((out / "field_0.csv").read_text())
    assert field.shape == (21, 21)
    assert read_pgm((out / "field_0.pgm").read_bytes()).shape == (21, 21)
    rows = (out / "collapse.csv").read_text().splitlines()
    assert rows[0] == "delta,shaded_fraction" and len(rows) == 5


def test_manifest_rerun_is_byte_identical(tmp_path):
    a = tmp_path / "a"
    assert main(["sustainability-grid", "--out", str(a), "--grid-step", "0.1", "--delta", "0.3"]) == EXIT_OK
    b = tmp_path / "b"
    assert main(["sustainability-grid", "--config", str(a / "manifest.txt"), "--out", str(b)]) == EXIT_OK
    for p in a.iterdir():
        if p.name != "manifest.txt":
            assert (b / p.name).read_bytes() == p.read_bytes()
    # rerunning into the same directory reproduces the manifest as well
    before = {p.name: p.read_bytes() for p in a.iterdir()}
    assert main(["sustainability-grid", "--config", str(a / "manifest.txt")]) == EXIT_OK
    assert {p.name: p.read_bytes() for p in a.iterdir()} == before


def test_exit_code_config(tmp_path, capsys):
    assert main(["sustainability-grid", "--out", str(tmp_path), "--grid-step", "-1"]) == EXIT_CONFIG
    assert "grid_step" in capsys.readouterr().err
    assert main(["evolve", "--out", str(tmp_path), "--penalty", "2"]) == EXIT_CONFIG
    assert main(["evolve", "--out", str(tmp_path), "--set", "nonsense"]) == EXIT_CONFIG


def test_exit_code_domain(tmp_path):
    code = main(["open-geodesic", "--out", str(tmp_path), "--set", "metric.expr=0*lambda_1"])
    assert code == EXIT_DOMAIN


def test_exit_code_io(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["tomography", "--out", str(blocker / "sub")]) == EXIT_IO
    missing = tmp_path / "nope.txt"
    assert main(["tomography", "--out", str(tmp_path / "o"), "--set", f"counts={missing}"]) == EXIT_IO


def test_tomography_command(tmp_path):
    counts = tmp_path / "counts.txt"
    counts.write_text("1 60 40\n2 50 50\n3 90 10\n")
    out = tmp_path / "o"
    assert main(["tomography", "--out", str(out), "--set", f"counts={counts}"]) == EXIT_OK
    text = (out / "tomography.csv").read_text().splitlines()
    assert text[:4] == ["axis,N_a,N_d", "1,60,40", "2,50,50", "3,90,10"]
    vals = dict(zip(text[4].split(","), text[5].split(",")))
    assert float(vals["r1"]) == pytest.approx(0.2)
    assert float(vals["r3"]) == pytest.approx(0.8)
    assert vals["valid"] == "1"


def test_complexity_command(tmp_path):
    h = tmp_path / "h.txt"
    h.write_text("XXI 1\nXXX 1\n")
    out = tmp_path / "o"
    assert main(["complexity-cost", "--out", str(out), "--set", f"hamiltonian={h}", "--penalty", "3"]) == EXIT_OK
    rows = (out / "complexity_cost.csv").read_text().splitlines()
    vals = dict(zip(rows[0].split(","), rows[1].split(",")))
    assert float(vals["cost"]) == 25.0
    assert float(vals["q_cost"]) == 24.0


def test_other_commands_run(tmp_path):
    hp = tmp_path / "hpath.txt"
    hp.write_text("t=0\nZII 1\nXXX 1\n")
    path_csv = tmp_path / "path.csv"
    t = np.linspace(0, 1, 11)
    path_csv.write_text("t,lambda_1\n" + "".join(f"{x},{x}\n" for x in t.tolist()))
    cases = [
        ["evolve", "--time", "3"],
        ["entropy-map"],
        ["geodesic", "--time", "1"],
        ["open-geodesic", "--time", "0.5"],
        ["dissipation", "--set", f"path={path_csv}", "--set", "metric.expr=1"],
        ["brandt", "--set", f"hpath={hp}", "--time", "0.5"],
    ]
    for i, argv in enumerate(cases):
        out = tmp_path / f"run{i}"
        assert main([*argv, "--out", str(out)]) == EXIT_OK, argv
        assert (out / "manifest.txt").exists()
        assert len(list(out.iterdir())) >= 2
