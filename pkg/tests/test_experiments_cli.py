import xml.etree.ElementTree as ET

import pytest

from scripts.cbit_recovery import main, parse_count


SVG_NS = "{http://www.w3.org/2000/svg}"
HEADER = "alpha,beta_opt,k_opt,k_prime_opt,f_bar,f_noop,f_classical"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def parse_key_values(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and " " not in line)


def test_parse_count_forms():
    assert parse_count("1000") == 1000
    assert parse_count("10^6") == 1_000_000
    assert parse_count("1e5") == 100_000


def test_sweep_writes_csv(tmp_path, capsys):
    output = tmp_path / "sweep.csv"
    code, _ = run(["sweep", "--alpha-min", "0", "--alpha-max", "1", "--steps", "101", "-o", str(output), "--no-progress"], capsys)
    assert code == 0
    raw = output.read_bytes()
    assert b"\r" not in raw
    assert not raw.startswith(b"\xef\xbb\xbf")
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 102
    first = dict(zip(HEADER.split(","), lines[1].split(",")))
    assert float(first["alpha"]) == 0.0
    assert float(first["f_bar"]) == pytest.approx(0.75, abs=1e-9)
    for line in lines[1:]:
        values = dict(zip(HEADER.split(","), map(float, line.split(","))))
        assert values["f_bar"] >= max(values["f_noop"], values["f_classical"]) - 1e-9


def test_sweep_csv_is_byte_stable(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (first, second):
        assert run(["sweep", "--steps", "21", "-o", str(path), "--no-progress"], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_sweep_svg_figures(tmp_path, capsys):
    output = tmp_path / "sweep.csv"
    code, _ = run(["sweep", "--steps", "101", "-o", str(output), "--format", "svg", "--no-progress"], capsys)
    assert code == 0

    fig1 = ET.parse(tmp_path / "fig1.svg").getroot()
    assert fig1.get("viewBox") == "0 0 800 600"
    series = {p.get("data-series") for p in fig1.iter(f"{SVG_NS}polyline")}
    assert series == {"f_bar", "f_noop", "f_classical", "gisin"}

    fig2 = ET.parse(tmp_path / "fig2.svg").getroot()
    polylines = list(fig2.iter(f"{SVG_NS}polyline"))
    assert {p.get("data-series") for p in polylines} == {"beta_opt"}
    # one break, at the jump in beta_opt; the flat alpha = 1 point is not drawn
    assert [p.get("data-segment") for p in polylines] == ["0", "1"]
    sizes = [len(p.get("points").split()) for p in polylines]
    assert sizes == [55, 45]


def test_sweep_rejects_unwritable_path(tmp_path, capsys):
    code, _ = run(["sweep", "--steps", "5", "-o", str(tmp_path / "missing" / "out.csv"), "--no-progress"], capsys)
    assert code == 2


def test_sweep_rejects_invalid_range(tmp_path, capsys):
    code, _ = run(["sweep", "--alpha-min", "0.8", "--alpha-max", "0.2", "-o", str(tmp_path / "x.csv")], capsys)
    assert code == 2


def test_optimize_reports_fields(capsys):
    code, out = run(["optimize", "--alpha", "0.5"], capsys)
    assert code == 0
    values = parse_key_values(out)
    assert values["beta_opt"] == "1.570796327"
    assert values["k_opt"] == "0.75"
    assert values["f_bar"] == "0.7916666667"
    assert values["branch"] == "boundary_beta"
    assert values["degenerate"] == "false"


def test_optimize_noiseless(capsys):
    code, out = run(["optimize", "--alpha", "1.0"], capsys)
    assert code == 0
    values = parse_key_values(out)
    assert float(values["f_bar"]) == pytest.approx(1.0, abs=1e-9)
    assert float(values["k_opt"]) == 0.0
    assert values["degenerate"] == "true"


def test_optimize_rejects_invalid_alpha(capsys):
    code, _ = run(["optimize", "--alpha", "1.5"], capsys)
    assert code == 2


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_verify_default_run_passes(capsys):
    code, out = run(["verify"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert out.rstrip().endswith("all checks passed")


def test_verify_is_deterministic(capsys):
    first = run(["verify", "--mc-samples", "5000", "--seed", "42"], capsys)
    second = run(["verify", "--mc-samples", "5000", "--seed", "42"], capsys)
    assert first == second


def test_verify_reports_injected_channel(capsys):
    code, out = run(["verify", "--mc-samples", "0", "--inject-broken-channel"], capsys)
    assert code == 1
    assert "FAIL injected_channel_cp" in out
    assert "verification failed: injected_channel_cp" in out


def test_kink_command(capsys):
    code, out = run(["kink", "--no-progress"], capsys)
    assert code == 0
    values = parse_key_values(out)
    assert 0.52 <= float(values["alpha_kink"]) <= 0.56
    assert 1.05 <= float(values["beta_jump_to"]) <= 1.15
    assert float(values["bracket_width"]) <= 1e-4


def test_kink_command_without_kink(capsys):
    code, out = run(["kink", "--alpha-min", "0", "--alpha-max", "0.3", "--no-progress"], capsys)
    assert code == 1
    assert "no kink found" in out
