import json
import os
import shutil
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from blockmf import cli
from blockmf.cli import ConfigError, RunConfig, exit_code, main, parse_checks
from blockmf.exceptions import InternalInconsistency
from blockmf.groebner import buchberger_check, g_a_generators
from blockmf.matchfield import Composition, compositions, is_eligible
from blockmf.records import CHECKS, emit_fixture, fixture_text, verify_instance

GOLDEN = Path(__file__).parent / "golden"

jsonschema = pytest.importorskip("jsonschema")


@pytest.fixture(scope="module")
def validator():
    schema = json.loads(resources.files("blockmf").joinpath("certificate.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def C(*parts):
    return Composition(parts)


def failing_generators():
    """Drop one generator of an eligible instance so that Buchberger's criterion fails."""
    G = g_a_generators(3, 6, C(2, 2, 2))
    for k in range(len(G)):
        H = G[:k] + G[k + 1 :]
        if not buchberger_check(H).passed:
            return H
    raise AssertionError("no failing subset")


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--r", "3", "--n", "6", "--a", "2,2,2", "--check", "all"],
            ["verify", "--r", "2", "--n", "4", "--a", "4", "--check", "gb"],
            ["verify", "--r", "3", "--n", "6", "--a", "1,3,2", "--check", "dim2"],
        ],
    )
    def test_ok(self, argv, capsys):
        assert main(argv) == 0
        assert "eligible=" in capsys.readouterr().out

    def test_outside_hypotheses_does_not_fail(self, capsys):
        assert main(["verify", "--r", "2", "--n", "5", "--a", "1,3,1", "--check", "gb,sagbi"]) == 0
        out = capsys.readouterr().out
        assert "outside-hypotheses" in out and "observed=fail" in out

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--r", "2", "--n", "5", "--a", "2,2"],
            ["verify", "--r", "2", "--n", "10", "--a", "10"],
            ["verify", "--r", "5", "--n", "4", "--a", "4"],
            ["verify", "--r", "2", "--n", "4", "--a", "4", "--check", "nope"],
            ["verify", "--r", "2", "--n", "4", "--a", "x"],
            ["sweep", "--r", "2", "--n", "4", "--jobs", "0"],
        ],
    )
    def test_bad_arguments(self, argv, capsys):
        assert main(argv) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_argparse_errors(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--r", "2"])
        assert exc.value.code == 2

    def test_internal_inconsistency(self, monkeypatch, capsys):
        def boom(cfg):
            raise InternalInconsistency("synthetic")

        monkeypatch.setattr(cli, "run_verify", boom)
        assert main(["verify", "--r", "2", "--n", "4", "--a", "4"]) == 3

    def test_io_error(self, tmp_path):
        out = tmp_path / "missing" / "x.json"
        assert main(["verify", "--r", "2", "--n", "4", "--a", "4", "--out", str(out)]) == 4
        assert main(["fixture-check", str(tmp_path / "nope.json")]) == 4

    def test_unsafe_bounds(self, capsys):
        assert main(["verify", "--r", "2", "--n", "10", "--a", "10", "--check", "coherence", "--unsafe-bounds"]) == 0

    def test_failure_sets_exit_code(self):
        rec = verify_instance(3, 6, C(2, 2, 2), ["gb"], generators=failing_generators())
        assert rec.failed and exit_code([rec]) == 1
        assert exit_code([verify_instance(2, 4, C(4), ["gb"])]) == 0


class TestConfig:
    def test_parse_checks(self):
        assert parse_checks(None) == CHECKS
        assert parse_checks(["sagbi,gb"]) == ("gb", "sagbi")
        assert parse_checks(["dim2", "all"]) == CHECKS
        with pytest.raises(ConfigError):
            parse_checks(["fast"])

    def test_sweep_selection(self):
        assert len(RunConfig(2, 6).compositions()) == 32
        eligible = RunConfig(2, 6, only_eligible=True).compositions()
        assert eligible == [a for a in compositions(6) if is_eligible(a)]
        assert RunConfig(2, 6, a=C(6)).compositions() == [C(6)]

    def test_rejects_wrong_sum(self):
        with pytest.raises(ConfigError):
            RunConfig(2, 6, a=C(2, 2))


class TestRecords:
    @pytest.mark.parametrize("r, n, a", [(2, 4, C(4)), (2, 5, C(1, 3, 1)), (3, 6, C(1, 3, 2)), (3, 7, C(7))])
    def test_schema(self, r, n, a, validator):
        rec = verify_instance(r, n, a)
        validator.validate(rec.to_json())
        validator.validate(json.loads(fixture_text(rec)))

    def test_skipped_sagbi_beyond_limits(self, validator):
        rec = verify_instance(3, 7, C(7))
        assert rec.checks["sagbi"] == {"status": "skipped", "reason": "instance-too-large"}

    def test_failure_record_has_witness(self, validator):
        rec = verify_instance(3, 6, C(2, 2, 2), ["gb"], generators=failing_generators())
        doc = rec.to_json()
        validator.validate(doc)
        gb = doc["checks"]["gb"]
        assert gb["status"] == "fail" and gb["observed"] == "fail"
        assert set(gb["witness"]) == {"f", "g", "remainder"}
        assert doc["checks"]["coherence"] == {"status": "skipped"}

    def test_ineligible_witness(self, validator):
        rec = verify_instance(2, 5, C(1, 3, 1), ["gb"])
        assert rec.checks["gb"]["status"] == "outside-hypotheses"
        assert rec.checks["gb"]["witness"] is not None
        assert not rec.failed

    def test_emission_is_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        emit_fixture(verify_instance(3, 6, C(2, 2, 2)), p1)
        emit_fixture(verify_instance(3, 6, C(2, 2, 2)), p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_bytes().endswith(b"}\n") and b"\r" not in p1.read_bytes()
        assert b"timing" not in p1.read_bytes()


class TestSweep:
    def test_coverage(self, tmp_path, capsys):
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--r", "2", "--n", "5", "--check", "all", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        summary = doc["summary"]
        assert len(doc["records"]) == summary["records"] == 16
        assert all(summary["assertions"].values())
        assert summary["dim2_values"] == [50]
        assert summary["ineligible_gb_observed"] == {"1,3,1": "fail"}
        assert "coverage: PASS" in capsys.readouterr().out

    def test_only_eligible(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--r", "3", "--n", "6", "--check", "gb", "--only-eligible", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["status_counts"]["gb"] == {"pass": 27}
        assert {tuple(r["instance"]["a"]) for r in doc["records"]} == {a.parts for a in compositions(6) if is_eligible(a)}

    def test_parallel_matches_serial(self, tmp_path):
        outs = []
        for jobs in ("1", "2"):
            out = tmp_path / f"s{jobs}.json"
            assert main(["sweep", "--r", "2", "--n", "6", "--check", "gb,dim2", "--jobs", jobs, "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestFixtures:
    def test_golden(self, capsys):
        paths = sorted(GOLDEN.glob("*.json"))
        assert len(paths) == 3
        assert main(["fixture-check", *map(str, paths)]) == 0
        assert capsys.readouterr().out.count(": match") == 3

    def test_golden_validates(self, validator):
        for p in GOLDEN.glob("*.json"):
            validator.validate(json.loads(p.read_text()))

    def test_tampered(self, tmp_path, capsys):
        p = tmp_path / "t.json"
        shutil.copy(GOLDEN / "r2-n4-a4.json", p)
        p.write_text(p.read_text().replace('"dim2": 20', '"dim2": 21'))
        assert main(["fixture-check", str(p)]) == 1
        assert "MISMATCH" in capsys.readouterr().out


def test_mf_log_controls_verbosity():
    env = dict(os.environ, MF_LOG="DEBUG")
    argv = [sys.executable, "-m", "blockmf", "verify", "--r", "2", "--n", "4", "--a", "4", "--check", "gb"]
    loud = subprocess.run(argv, env=env, capture_output=True, text=True)
    env["MF_LOG"] = "WARNING"
    quiet = subprocess.run(argv, env=env, capture_output=True, text=True)
    assert loud.returncode == quiet.returncode == 0
    assert "DEBUG blockmf" in loud.stderr
    assert quiet.stderr == ""
    assert loud.stdout == quiet.stdout
