import os

import numpy as np
import pytest

from dfwave.cli import main
from dfwave.config import load_config
from dfwave.exceptions import ConfigError
from dfwave.io import read_csv, read_model, write_points, write_radial
from dfwave.transforms import RadialSamples

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_load_config_strictness(tmp_path):
    good = _write(tmp_path / "a.ini", "[run]\ncommand = kernel-eval\n")
    cfg = load_config(good)
    assert cfg.command == "kernel-eval"
    assert cfg.seed == 0
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(_write(tmp_path / "b.ini",
                           "[run]\ncommand = fit\n[mystery]\nx = 1\n"))
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(_write(tmp_path / "c.ini",
                           "[run]\ncommand = fit\nverbose = yes\n"))
    with pytest.raises(ConfigError, match="command is required"):
        load_config(_write(tmp_path / "d.ini", "[run]\nseed = 1\n"))
    with pytest.raises(ConfigError, match="unknown command"):
        load_config(_write(tmp_path / "e.ini", "[run]\ncommand = frobnicate\n"))
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "nope.ini"))


def test_load_config_paths_and_overrides(tmp_path):
    ini = _write(tmp_path / "a.ini",
                 "[run]\ncommand = evaluate\n[input]\nmodel = m.txt\npoints = p.txt\n")
    with pytest.raises(ConfigError, match="missing file"):
        load_config(ini)
    (tmp_path / "m.txt").write_text("x\n")
    (tmp_path / "p.txt").write_text("0\n")
    cfg = load_config(ini)
    # relative inputs resolve against the config's own directory
    assert cfg.get("input", "model") == str(tmp_path / "m.txt")
    cfg = load_config(ini, overrides=["run.seed=7"])
    assert cfg.seed == 7
    with pytest.raises(ConfigError, match="--set"):
        load_config(ini, overrides=["runseed=7"])
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(ini, overrides=["run.volume=11"])


def test_output_dir_from_environment(tmp_path, monkeypatch):
    ini = _write(tmp_path / "a.ini", "[run]\ncommand = kernel-eval\n")
    monkeypatch.delenv("DFWAVE_OUTPUT_DIR", raising=False)
    assert load_config(ini).output_dir == "."
    monkeypatch.setenv("DFWAVE_OUTPUT_DIR", str(tmp_path / "envout"))
    assert load_config(ini).output_dir == str(tmp_path / "envout")
    ini2 = _write(tmp_path / "b.ini",
                  f"[run]\ncommand = kernel-eval\noutput_dir = {tmp_path}\n")
    assert load_config(ini2).output_dir == str(tmp_path)


def _kernel_eval_config(tmp_path, shape="1.0"):
    pts = np.array([[0.0, 3.0], [0.0, 4.0], [1.0, 1.0]])
    write_points(tmp_path / "pairs.txt", pts)
    return _write(tmp_path / "keval.ini", f"""
[run]
command = kernel-eval
output_dir = {tmp_path / "out"}

[kernel]
family = mq
n = 1
shape = {shape}

[input]
points = pairs.txt
""")


def test_cli_kernel_eval_and_override(tmp_path):
    ini = _kernel_eval_config(tmp_path)
    assert main([ini]) == 0
    header, rows = read_csv(tmp_path / "out" / "kernel_eval.csv")
    assert header == ["r", "value"]
    r0, v0 = (float(c) for c in rows[0])
    assert r0 == 3.0 and abs(v0 - np.sqrt(10.0)) <= 1e-15
    assert main([ini, "--set", "kernel.shape=2.0"]) == 0
    _, rows2 = read_csv(tmp_path / "out" / "kernel_eval.csv")
    assert abs(float(rows2[0][1]) - np.sqrt(13.0)) <= 1e-15


def test_cli_fit_then_evaluate(tmp_path):
    X = np.linspace(-1.0, 1.0, 7)[:, None]
    write_points(tmp_path / "nodes.txt", X)
    write_points(tmp_path / "vals.txt", np.exp(-X))
    fit_ini = _write(tmp_path / "fit.ini", f"""
[run]
command = fit
output_dir = {tmp_path / "out"}

[kernel]
family = mq
n = 1

[scales]
kind = shape_params
values = 1.0

[input]
points = nodes.txt
values = vals.txt
""")
    assert main([fit_ini]) == 0
    model = read_model(tmp_path / "out" / "model.txt")
    assert model.nodes.M == 7
    header, rows = read_csv(tmp_path / "out" / "fit_report.csv")
    assert header[0] == "strategy" and rows[0][0] == "square"
    assert float(rows[0][1]) <= 1e-10

    write_points(tmp_path / "probe.txt", X)
    ev_ini = _write(tmp_path / "ev.ini", f"""
[run]
command = evaluate
output_dir = {tmp_path / "out"}

[input]
model = out/model.txt
points = probe.txt
""")
    assert main([ev_ini]) == 0
    _, evrows = read_csv(tmp_path / "out" / "evaluate.csv")
    got = np.array([float(r[1]) for r in evrows])
    assert np.max(np.abs(got - np.exp(-X[:, 0]))) <= 1e-10


def test_cli_exit_code_2_for_config_errors(tmp_path, capsys):
    ini = _write(tmp_path / "bad.ini", "[run]\ncommand = fit\nbogus = 1\n")
    assert main([ini]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_exit_code_3_singular_fit_leaves_no_outputs(tmp_path, capsys):
    X = np.linspace(-1.0, 1.0, 6)[:, None]
    write_points(tmp_path / "nodes.txt", X)
    write_points(tmp_path / "vals.txt", np.exp(-X))
    ini = _write(tmp_path / "fit.ini", f"""
[run]
command = fit
output_dir = {tmp_path / "out"}

[kernel]
family = gaussian
n = 1
shape = 1e4

[scales]
kind = shape_params
values = 1e4

[input]
points = nodes.txt
values = vals.txt
""")
    assert main([ini]) == 3
    err = capsys.readouterr().err
    assert "condition estimate" in err
    assert not (tmp_path / "out" / "model.txt").exists()
    assert not (tmp_path / "out" / "fit_report.csv").exists()


def test_cli_exit_code_4_bad_model_file(tmp_path, capsys):
    (tmp_path / "m.txt").write_text("not-a-model\n")
    write_points(tmp_path / "p.txt", np.array([[0.0]]))
    ini = _write(tmp_path / "ev.ini", f"""
[run]
command = evaluate
output_dir = {tmp_path / "out"}

[input]
model = m.txt
points = p.txt
""")
    assert main([ini]) == 4
    assert "io error" in capsys.readouterr().err
    assert not (tmp_path / "out" / "evaluate.csv").exists()


def test_cli_transform_spectral_and_abel(tmp_path):
    n = 64
    x = np.arange(n) * 2 * np.pi / n
    lines = ["1 %d %.17g" % (n, 2 * np.pi)]
    vals = np.sin(x)
    lines += [" ".join("%.17g" % v for v in vals[i:i + 8]) for i in range(0, n, 8)]
    (tmp_path / "g.txt").write_text("\n".join(lines) + "\n")
    ini = _write(tmp_path / "t.ini", f"""
[run]
command = transform
output_dir = {tmp_path / "out"}

[transform]
op = fractional_laplacian
y = 2.0

[input]
grid = g.txt
""")
    assert main([ini]) == 0
    from dfwave.io import read_grid
    out = read_grid(tmp_path / "out" / "transform_out.grid.txt")
    assert np.max(np.abs(out.values - np.sin(x))) <= 1e-10

    t = np.linspace(0.0, 2.0, 200)
    write_radial(tmp_path / "r.txt", RadialSamples(t, np.ones_like(t)))
    ini2 = _write(tmp_path / "t2.ini", f"""
[run]
command = transform
output_dir = {tmp_path / "out"}

[transform]
op = abel_forward
beta = 0.5

[input]
radial = r.txt
""")
    assert main([ini2]) == 0
    from dfwave.io import read_radial
    rs = read_radial(tmp_path / "out" / "transform_out.radial.txt")
    assert abs(rs.values[-1] - 2.0 * np.sqrt(2.0)) <= 1e-6


def test_cli_transform_weyl_builtin_ball(tmp_path):
    ini = _write(tmp_path / "w.ini", f"""
[run]
command = transform
output_dir = {tmp_path / "out"}

[transform]
op = weyl
n = 3
gamma = 0.0
support_radius = 1.0
breakpoints = 0.999
""")
    assert main([ini]) == 0
    _, rows = read_csv(tmp_path / "out" / "transform.csv")
    assert rows[0][0] == "weyl"
    assert abs(float(rows[0][2]) - np.pi) <= 1e-2 * np.pi


def test_cli_nodes_optimize_bundled(tmp_path):
    ini = os.path.join(CONFIGS, "nodes_optimize.ini")
    out = str(tmp_path / "out")
    assert main([ini, "--set", f"run.output_dir={out}"]) == 0
    text = open(os.path.join(out, "nodes.csv")).read()
    assert "final_max_omega" in text
    header, rows = read_csv(os.path.join(out, "nodes.csv"))
    assert header == ["x0"] and len(rows) == 4


def test_cli_study_edge_bundled(tmp_path):
    ini = os.path.join(CONFIGS, "edge_exp.ini")
    out = str(tmp_path / "out")
    assert main([ini, "--set", f"run.output_dir={out}"]) == 0
    _, rows = read_csv(os.path.join(out, "edge.csv"))
    ratio = float(rows[0][0])
    assert 0.0 < ratio < 1.0
    _, field = read_csv(os.path.join(out, "edge_field.csv"))
    assert len(field) == 1001


def test_cli_study_converge_bundled_and_rerun_identical(tmp_path):
    ini = os.path.join(CONFIGS, "runge_uniform.ini")
    out = str(tmp_path / "out")
    override = f"run.output_dir={out}"
    assert main([ini, "--set", override]) == 0
    names = ("convergence.csv", "errorfield.csv", "convergence.svg")
    first = {n: open(os.path.join(out, n), "rb").read() for n in names}
    header, rows = read_csv(os.path.join(out, "convergence.csv"))
    assert header == ["M", "N", "max_err", "rms_err", "cond", "order_row_flag"]
    assert [int(r[0]) for r in rows] == [5, 9, 13, 17]
    assert abs(float(rows[0][2]) - 0.31453330907633015) <= 1e-12
    text = first["convergence.csv"].decode()
    assert "conjecture_score = " in text and "conjecture_C = " in text
    assert "band_max = " in first["errorfield.csv"].decode()
    # second run into the same directory reproduces every byte
    assert main([ini, "--set", override]) == 0
    for n in names:
        again = open(os.path.join(out, n), "rb").read()
        assert again == first[n], n
