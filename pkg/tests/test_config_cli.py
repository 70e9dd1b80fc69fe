import csv
import math
import subprocess
import sys
from pathlib import Path

import pytest

from actinwire import __version__
from actinwire import config as cfgmod
from actinwire.cli import main
from actinwire.errors import ConfigError
from actinwire.network import RelayPolicy
from actinwire.transport import DEFAULT_ALPHA_S

T_1032_BITS = 4.4205429634453155e-05


def read_csv(path: Path):
    lines = path.read_text().splitlines()
    header = lines[0]
    rows = list(csv.DictReader(lines[1:]))
    return header, rows


def write_toml(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


TWO_NODE = """
[scenario]
message_bits = 1000
per_hop_overhead_bits = 32
seeds = 3

[[nodes]]
id = 0
x_um = 0.0
y_um = 0.0
radius_um = 1.0
initial_detector = true

[[nodes]]
id = 1
x_um = 10.0
y_um = 0.0
radius_um = 11.0
gateway = true
"""


# ------------------------------------------------------------------ config


def test_defaults_and_hash_stable():
    a, b = cfgmod.load_config(), cfgmod.load_config()
    assert a == b and cfgmod.config_hash(a) == cfgmod.config_hash(b)
    assert len(cfgmod.config_hash(a)) == 16
    assert cfgmod.transport_params(a).alpha == DEFAULT_ALPHA_S
    sc = cfgmod.scenario_config(a)
    assert sc.relay_policy is RelayPolicy.EXCLUDING_SOURCE and len(sc.nodes) == 13


def test_override_changes_hash():
    a = cfgmod.load_config()
    b = cfgmod.load_config(overrides=["physical.rho_ohm_m=1.652"])
    assert b["physical"]["rho_ohm_m"] == 1.652
    assert cfgmod.config_hash(a) != cfgmod.config_hash(b)


@pytest.mark.parametrize("text,expected", [
    ("rho_ohm_m=2", ("physical", "rho_ohm_m", 2)),
    ("scenario.relay_policy=random_neighbor_epidemic",
     ("scenario", "relay_policy", "random_neighbor_epidemic")),
    ("distances_um=[10, 20]", ("sweep", "distances_um", [10, 20])),
    ("t_stop_s = \"none\"", ("transport", "t_stop_s", "none")),
])
def test_parse_override(text, expected):
    assert cfgmod.parse_override(text) == expected


@pytest.mark.parametrize("text", ["nokey", "bogus=1", "physical.bogus=1", "nosection.rho=1"])
def test_parse_override_rejects(text):
    with pytest.raises(ConfigError):
        cfgmod.parse_override(text)


@pytest.mark.parametrize("body", [
    "[physical]\nbogus = 1\n",
    "[extra]\nx = 1\n",
    "[physical]\nrho_ohm_m = \"abc\"\n",
    "[scenario]\nseeds = 1.5\n",
    "[sweep]\nboth_phase_modes = 1\n",
    "[[nodes]]\nid = 0\nx_um = 0.0\n",
    "[[nodes]]\nid = 0\nx_um = 0.0\ny_um = 0.0\nradius_um = 1.0\ncolor = 1\n",
    "not toml = = 1",
])
def test_bad_files_are_config_errors(tmp_path, body):
    with pytest.raises(ConfigError):
        cfgmod.load_config(write_toml(tmp_path, body))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        cfgmod.load_config(tmp_path / "absent.toml")


def test_builders_wrap_domain_errors():
    cfg = cfgmod.load_config(overrides=["physical.rho_ohm_m=-1"])
    with pytest.raises(ConfigError):
        cfgmod.physical_params(cfg)
    cfg = cfgmod.load_config(overrides=["scenario.relay_policy=flood"])
    with pytest.raises(ConfigError):
        cfgmod.scenario_config(cfg)


def test_literal_alpha_keyword_warns():
    cfg = cfgmod.load_config(overrides=["alpha_s=literal"])
    with pytest.warns(RuntimeWarning, match="dimensionally"):
        tp = cfgmod.transport_params(cfg)
    assert tp.alpha > 1e18


def test_dump_roundtrip(tmp_path):
    cfg = cfgmod.load_config(overrides=["channel_delay_s=0.25"])
    again = cfgmod.load_config(write_toml(tmp_path, cfgmod.dump_config(cfg)))
    assert again == cfg


# ------------------------------------------------------------------ cli


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_derive_components(tmp_path, capsys):
    out = tmp_path / "components.csv"
    assert run_cli("derive-components", "--out", out) == 0
    header, rows = read_csv(out)
    assert header.startswith(f"# actinwire {__version__} config-hash=")
    values = {(r["quantity"], r["mode"]): float(r["value"]) for r in rows}
    assert values[("R_eq_per_um_ohm", "paper")] == 1.2e9
    assert values[("C_eq_per_um_F", "paper")] == 0.02e-12
    assert values[("R0_ohm", "monomer")] == pytest.approx(6108462.5525603712, rel=1e-12)
    assert values[("R_eq_per_um_ohm", "derived")] == pytest.approx(200 * 6108462.5525603712, rel=1e-12)
    # the effective config written beside the report re-runs identically
    written = tmp_path / "components.config.toml"
    out2 = tmp_path / "again.csv"
    assert run_cli("derive-components", "--config", written, "--out", out2) == 0
    assert out.read_text() == out2.read_text()
    assert "R0_ohm" in capsys.readouterr().out


def test_derive_components_resistivity_scales(tmp_path):
    base, doubled = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("derive-components", "--out", base)
    run_cli("derive-components", "--out", doubled, "--overrides", "physical.rho_ohm_m=1.652")
    r0 = {r["quantity"]: float(r["value"]) for r in read_csv(base)[1] if r["mode"] == "monomer"}
    r1 = {r["quantity"]: float(r["value"]) for r in read_csv(doubled)[1] if r["mode"] == "monomer"}
    assert r1["R0_ohm"] == pytest.approx(2 * r0["R0_ohm"], rel=1e-12)
    assert r1["C0_F"] == r0["C0_F"]


def test_sweep(tmp_path):
    out = tmp_path / "sweep"
    assert run_cli("sweep", "--out", out) == 0
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 10 and "sweep_d10um_0-700hz_standard.csv" in files
    _, d10 = read_csv(out / "sweep_d10um_0-900hz_standard.csv")
    _, d50 = read_csv(out / "sweep_d50um_0-900hz_standard.csv")
    assert len(d10) == 901
    first = d10[0]
    assert float(first["freq_hz"]) == 0.0
    assert abs(float(first["atten_db"])) < 1e-9
    assert float(first["phase_deg"]) == 0.0
    assert float(first["delay_s"]) == pytest.approx(2.4e-3, rel=1e-9)
    # longer wire: more loss everywhere above DC, more delay at DC
    for a, b in zip(d10[1:], d50[1:]):
        assert float(b["atten_db"]) < float(a["atten_db"])
    assert float(d50[0]["delay_s"]) > float(d10[0]["delay_s"])


def test_sweep_both_phase_modes(tmp_path):
    out = tmp_path / "sweep"
    assert run_cli("sweep", "--out", out, "--overrides", "both_phase_modes=true",
                   "distances_um=[10.0]", "ranges_hz=[[0.0, 100.0, 11]]") == 0
    _, lit = read_csv(out / "sweep_d10um_0-100hz_literal.csv")
    assert float(lit[0]["phase_deg"]) == pytest.approx(45.0, abs=1e-12)
    assert len(list(out.iterdir())) == 2


def test_sweep_derived_mode_is_model_error(tmp_path, capsys):
    # derived circuit with a huge n_eff is still overdamped; a tiny resistivity is not
    code = run_cli("sweep", "--out", tmp_path / "s", "--mode", "derived",
                   "--overrides", "rho_ohm_m=1e-30")
    err = capsys.readouterr().err
    assert code == 3
    assert err.startswith("actinwire: error[model]:") and err.count("\n") == 1


def test_throughput(tmp_path):
    out = tmp_path / "tp.csv"
    assert run_cli("throughput", "--out", out) == 0
    _, rows = read_csv(out)
    assert len(rows) == 601
    assert float(rows[0]["throughput_bps"]) == pytest.approx(4.44e7, rel=1e-12)
    assert float(rows[0]["v_m_s"]) == pytest.approx(0.03, rel=1e-12)
    mid = next(r for r in rows if float(r["t_s"]) == pytest.approx(30e-6))
    assert float(mid["throughput_bps"]) == pytest.approx(22876738.657862446, rel=1e-9)
    assert float(rows[-1]["throughput_bps"]) == 0.0  # t = t_stop


def test_compare_fret(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run_cli("compare-fret", "--out", out) == 0
    _, rows = read_csv(out)
    wan = [r for r in rows if r["network"] == "wannet"]
    fret = [r for r in rows if r["network"] == "fret_mamnet"]
    assert len(wan) == len(fret) == 601
    assert float(wan[0]["ratio_to_fret"]) == pytest.approx(8072.727, abs=5e-4)
    assert float(wan[0]["log10_throughput_bps"]) == pytest.approx(7.6474, abs=5e-5)
    assert {r["throughput_bps"] for r in fret} == {"5500.0"}


def test_simulate_gateway_is_detector(tmp_path):
    cfg = write_toml(tmp_path, """
[[nodes]]
id = 0
x_um = 0.0
y_um = 0.0
radius_um = 1.0
gateway = true
initial_detector = true
""")
    out = tmp_path / "sim"
    assert run_cli("simulate", "--config", cfg, "--out", out, "--seeds", 2) == 0
    _, rows = read_csv(out / "metrics.csv")
    assert [float(r["delivery_time_s"]) for r in rows] == [0.0, 0.0]
    assert [r["hops"] for r in rows] == ["0", "0"]


def test_simulate_two_nodes(tmp_path):
    cfg = write_toml(tmp_path, TWO_NODE)
    out = tmp_path / "sim"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 0
    _, rows = read_csv(out / "metrics.csv")
    expected = 10.0 + 2.4e-3 + T_1032_BITS + 1.0
    for r in rows:
        assert r["delivered"] == "true"
        assert float(r["delivery_time_s"]) == pytest.approx(expected, abs=1e-9)
    _, summary = read_csv(out / "summary.csv")
    assert float(summary[0]["delivery_rate"]) == 1.0
    _, timeline = read_csv(out / "timeline.csv")
    assert {float(r["informed_fraction"]) for r in timeline} == {0.5, 1.0}


def test_simulate_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli("simulate", "--out", a, "--seeds", 5) == 0
    assert run_cli("simulate", "--out", b, "--seeds", 5) == 0
    for name in ("metrics.csv", "timeline.csv", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("body", [
    "[[nodes]]\nid = 0\nx_um = 0.0\ny_um = 0.0\nradius_um = 1.0\ngateway = true\n",  # no detector
    "[[nodes]]\nid = 0\nx_um = 0.0\ny_um = 0.0\nradius_um = 1.0\ninitial_detector = true\n",
    "[scenario]\ndimension = 3\n",  # default layout has no z
    "[scenario]\nseeds = 0\n",
])
def test_simulate_malformed_scenario(tmp_path, capsys, body):
    code = run_cli("simulate", "--config", write_toml(tmp_path, body), "--out", tmp_path / "s")
    err = capsys.readouterr().err
    assert code == 2
    assert err.startswith("actinwire: error[config]:") and err.count("\n") == 1


def test_unknown_key_exit_code(tmp_path, capsys):
    code = run_cli("throughput", "--out", tmp_path / "t.csv", "--overrides", "bogus=1")
    assert code == 2
    assert capsys.readouterr().err.startswith("actinwire: error[config]: unknown config key")


def test_usage_errors_exit_2(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "actinwire", "sweep"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stderr.startswith("actinwire: error[usage]:")
    proc = subprocess.run([sys.executable, "-m", "actinwire", "fly", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ACTINWIRE_THREADS", "x")
    assert run_cli("simulate", "--out", tmp_path / "s", "--seeds", 1) == 2
    monkeypatch.setenv("ACTINWIRE_THREADS", "2")
    assert run_cli("simulate", "--out", tmp_path / "p", "--seeds", 4) == 0
    monkeypatch.delenv("ACTINWIRE_THREADS")
    assert run_cli("simulate", "--out", tmp_path / "q", "--seeds", 4) == 0
    assert (tmp_path / "p" / "metrics.csv").read_bytes() == (tmp_path / "q" / "metrics.csv").read_bytes()


def test_not_deliverable_message(tmp_path):
    cfg = write_toml(tmp_path, TWO_NODE.replace("message_bits = 1000", "message_bits = 5000"))
    out = tmp_path / "sim"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 0
    _, rows = read_csv(out / "metrics.csv")
    assert all(r["delivered"] == "false" and r["delivery_time_s"] == "" for r in rows)
    _, summary = read_csv(out / "summary.csv")
    assert math.isnan(float(summary[0]["mean_delivery_time_s"]))
