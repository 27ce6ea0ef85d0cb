"""Command-line contract: report shape, exit codes, CSV format, determinism."""

import json

import pytest
from click.testing import CliRunner

from finslerlab.cli import main
from finslerlab.instances import REGISTERED, theorem_family_instance

from conftest import RANDERS_FAMILY_PARAMS


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def randers_file(tmp_path):
    path = tmp_path / "randers-radial.json"
    path.write_text(json.dumps(REGISTERED["randers-radial"]))
    return str(path)


@pytest.fixture
def thm_randers_file(tmp_path):
    doc = theorem_family_instance(
        {"family": "thm-randers", "params": RANDERS_FAMILY_PARAMS}, dim=3, c=0.1
    )
    path = tmp_path / "thm-randers.json"
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------


def test_inspect_report_shape(runner, randers_file):
    res = runner.invoke(main, ["inspect", randers_file, "--no-timestamp"])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["report_version"] == 1
    assert report["instance"]["dim"] == 3
    assert report["regularity"]["passed"] is True
    assert report["conformal"]["closed_conformal"] is True
    assert "timestamp" not in report


def test_inspect_timestamp_present_by_default(runner, randers_file):
    res = runner.invoke(main, ["inspect", randers_file])
    assert res.exit_code == 0
    assert "timestamp" in json.loads(res.output)


def test_inspect_notes_parallel_one_form(runner, tmp_path):
    doc = {
        "dim": 3,
        "alpha": {"family": "euclidean", "params": {}},
        "beta": {"family": "constant", "params": {"values": [0.1, 0.0, 0.2]}},
        "phi": {"family": "randers", "params": {}},
        "name": "parallel",
    }
    path = tmp_path / "parallel.json"
    path.write_text(json.dumps(doc))
    res = runner.invoke(main, ["inspect", str(path), "--no-timestamp"])
    assert res.exit_code == 0
    assert "trivial case c=0" in json.loads(res.output)["note"]


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_family_instance_passes(runner, thm_randers_file):
    res = runner.invoke(
        main, ["verify", thm_randers_file, "--samples", "6", "--no-timestamp"]
    )
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["pass"] is True and report["report_version"] == 1
    by_name = {c["name"]: c for c in report["checks"]}
    assert set(by_name) == {"spray", "berwald", "isotropic", "lemma41", "pde", "regularity"}
    assert by_name["isotropic"]["tau"] == pytest.approx(0.03, abs=1e-9)


def test_verify_failure_sets_exit_code_one(runner, randers_file):
    res = runner.invoke(
        main, ["verify", randers_file, "--checks", "isotropic", "--samples", "6"]
    )
    assert res.exit_code == 1
    report = json.loads(res.output.strip())
    assert report["pass"] is False


def test_verify_subset_of_checks(runner, randers_file):
    res = runner.invoke(
        main,
        ["verify", randers_file, "--checks", "spray,berwald", "--samples", "5", "--no-timestamp"],
    )
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert [c["name"] for c in report["checks"]] == ["spray", "berwald"]
    assert all(c["residual"] < c["tolerance"] for c in report["checks"])


def test_verify_tolerance_override_can_fail(runner, randers_file):
    res = runner.invoke(
        main,
        ["verify", randers_file, "--checks", "spray", "--samples", "4", "--tol", "spray=1e-30"],
    )
    assert res.exit_code == 1


def test_verify_seed_from_environment(runner, randers_file):
    res = runner.invoke(
        main,
        ["verify", randers_file, "--checks", "spray", "--samples", "4", "--no-timestamp"],
        env={"FINSLER_LAB_SEED": "7"},
    )
    assert res.exit_code == 0
    assert json.loads(res.output)["seed"] == 7


def test_verify_explicit_seed_wins(runner, randers_file):
    res = runner.invoke(
        main,
        [
            "verify", randers_file, "--checks", "spray", "--samples", "4",
            "--seed", "11", "--no-timestamp",
        ],
        env={"FINSLER_LAB_SEED": "7"},
    )
    assert json.loads(res.output)["seed"] == 11


def test_verify_is_deterministic_up_to_timing(runner, randers_file, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"report{i}.json"
        res = runner.invoke(
            main,
            [
                "verify", randers_file, "--checks", "spray,berwald", "--samples", "5",
                "--seed", "3", "--no-timestamp", "--out", str(out),
            ],
        )
        assert res.exit_code == 0
        report = json.loads(out.read_text())
        report.pop("seconds_total")
        for c in report["checks"]:
            c.pop("seconds")
        outs.append(json.dumps(report, sort_keys=True))
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "SELF", "--checks", "spray,unknown"],
        ["verify", "SELF", "--samples", "0"],
        ["verify", "SELF", "--tol", "spray=abc"],
    ],
)
def test_verify_bad_inputs_exit_two(runner, randers_file, args):
    args = [randers_file if a == "SELF" else a for a in args]
    res = runner.invoke(main, args)
    assert res.exit_code == 2


def test_missing_and_malformed_instance_files_exit_two(runner, tmp_path):
    res = runner.invoke(main, ["verify", str(tmp_path / "nope.json")])
    assert res.exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert runner.invoke(main, ["verify", str(bad)]).exit_code == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"dim": 3}))
    assert runner.invoke(main, ["verify", str(wrong)]).exit_code == 2


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_sweep_values_and_format(runner, randers_file, tmp_path):
    out = tmp_path / "sweep.csv"
    res = runner.invoke(
        main,
        ["sweep", randers_file, "--quantity", "E", "--grid", "b2=0.04,s=0.1", "--out", str(out)],
    )
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[0] == "b2,s,value"
    b2, s, val = lines[1].split(",")
    assert float(b2) == 0.04 and float(s) == 0.1
    # E = 1 / (2 (1 + s)) for the linear profile
    assert float(val) == pytest.approx(0.5 / 1.1, rel=1e-14)
    # 17 significant digits captured
    assert len(val.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_sweep_residual_quantity(runner, randers_file, tmp_path):
    out = tmp_path / "res.csv"
    res = runner.invoke(
        main,
        [
            "sweep", randers_file, "--quantity", "residual:lemma-H",
            "--grid", "b2=0.01:0.09:3,s=-0.05:0.05:3", "--out", str(out),
        ],
    )
    assert res.exit_code == 0, res.output
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 9
    assert all(abs(float(r.split(",")[2])) < 1e-14 for r in rows)


def test_sweep_is_byte_deterministic(runner, randers_file, tmp_path):
    texts = []
    for i in range(2):
        out = tmp_path / f"sweep{i}.csv"
        res = runner.invoke(
            main,
            [
                "sweep", randers_file, "--quantity", "H",
                "--grid", "b2=0.01:0.09:4,s=-0.05:0.05:4", "--out", str(out),
            ],
        )
        assert res.exit_code == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_sweep_bad_inputs_exit_two(runner, randers_file, tmp_path):
    out = str(tmp_path / "x.csv")
    assert (
        runner.invoke(
            main, ["sweep", randers_file, "--quantity", "Z", "--out", out]
        ).exit_code
        == 2
    )
    assert (
        runner.invoke(
            main,
            ["sweep", randers_file, "--quantity", "E", "--grid", "b2=1:2", "--out", out],
        ).exit_code
        == 2
    )
    assert (
        runner.invoke(
            main,
            ["sweep", randers_file, "--quantity", "E", "--grid", "b2=0.1", "--out", out],
        ).exit_code
        == 2
    )


def test_sweep_domain_failure_exits_one(runner, tmp_path):
    # b^2 > 1 puts the navigation profile outside its domain
    doc = dict(REGISTERED["randers-navigation"])
    path = tmp_path / "nav.json"
    path.write_text(json.dumps(doc))
    out = str(tmp_path / "x.csv")
    res = runner.invoke(
        main,
        ["sweep", str(path), "--quantity", "E", "--grid", "b2=4.0,s=0.0", "--out", out],
    )
    assert res.exit_code == 1


# ---------------------------------------------------------------------------
# family
# ---------------------------------------------------------------------------


def test_family_emits_verifiable_instance(runner, tmp_path):
    emit = tmp_path / "fam.json"
    res = runner.invoke(
        main,
        [
            "family", "--family", "thm-randers",
            "--params", json.dumps(RANDERS_FAMILY_PARAMS), "--emit", str(emit),
        ],
    )
    assert res.exit_code == 0, res.output
    doc = json.loads(emit.read_text())
    assert doc["phi"]["family"] == "thm-randers"
    check = runner.invoke(
        main, ["verify", str(emit), "--checks", "lemma41,pde", "--samples", "4"]
    )
    assert check.exit_code == 0, check.output


def test_family_bad_inputs_exit_two(runner, tmp_path):
    emit = str(tmp_path / "x.json")
    assert (
        runner.invoke(main, ["family", "--family", "thm-nope", "--emit", emit]).exit_code == 2
    )
    assert (
        runner.invoke(
            main, ["family", "--family", "thm-randers", "--params", "{bad", "--emit", emit]
        ).exit_code
        == 2
    )
    # negative k makes the radicand negative on the probe points
    assert (
        runner.invoke(
            main,
            [
                "family", "--family", "thm-randers",
                "--params", json.dumps({"rho": 0.0, "k": -1.0}), "--emit", emit,
            ],
        ).exit_code
        == 2
    )


def test_version_flag(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0
    assert "finslerlab" in res.output
