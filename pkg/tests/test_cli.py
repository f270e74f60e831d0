import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from weakdyn.cli import DENSITY_COLUMNS, execute, main, run
from weakdyn.errors import ParseError, ValidationError
from weakdyn.report import Report, fnv1a64, report_files, table_csv, write_report
from weakdyn.scenario import Scenario, parse_scenario, serialize_scenario

ROOT = Path(__file__).resolve().parents[1]
QUBIT = ROOT / "scenarios" / "qubit.json"


def minimal(**extra):
    doc = {"dim": 2, "states": {"a": [[1, 0], [0, 0]]}}
    doc.update(extra)
    return json.dumps(doc)


class TestScenario:
    def test_minimal(self):
        s = parse_scenario(minimal().encode())
        assert s.dim == 2
        np.testing.assert_array_equal(s.states["a"], [1, 0])

    def test_dangling_observable(self):
        with pytest.raises(ValidationError, match="'B'"):
            parse_scenario(minimal(options={"observable": "B"}))

    def test_three_entry_amplitude(self):
        with pytest.raises(ParseError, match=r"\[re, im\]"):
            parse_scenario(json.dumps({"dim": 2, "states": {"a": [[1, 0, 0], [0, 0]]}}))

    def test_syntax_error_location(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario('{\n  "dim": 2,\n  "states": {,}\n}')
        assert exc.value.line == 3

    @pytest.mark.parametrize(
        "doc",
        [
            {"dim": 2, "states": {"a": [[0, 0], [0, 0]]}},
            {"dim": 3, "states": {"a": [[1, 0], [0, 0]]}},
            {"dim": 2, "observables": {"A": [[[1, 0]]]}},
            {"dim": 0},
            {"dim": 2, "options": {"free_particle": {"points": 7}}},
        ],
    )
    def test_validation(self, doc):
        with pytest.raises(ValidationError):
            parse_scenario(json.dumps(doc))

    def test_round_trip(self):
        s = parse_scenario(QUBIT.read_bytes())
        again = parse_scenario(serialize_scenario(s))
        assert again == s
        assert serialize_scenario(again) == serialize_scenario(s)

    def test_random_state_literal(self):
        s = parse_scenario(json.dumps({"dim": 3, "states": {"r": "random"}}))
        assert s.states["r"] == "random"


class TestReport:
    def test_fnv_reference_vectors(self):
        assert fnv1a64(b"") == "cbf29ce484222325"
        assert fnv1a64(b"a") == "af63dc4c8601ec8c"

    def test_empty_table_header_only(self):
        assert table_csv({"x": [], "y": []}) == b"x,y\n"

    def test_json_round_trip_bitwise(self):
        vals = [0.1, 1 / 3, np.pi, 2.0**-1074, 1e308, -0.0]
        r = Report("demo", "0" * 16, scalars={f"v{k}": v for k, v in enumerate(vals)})
        r.scalars["z"] = complex(np.e, -1 / 7)
        back = json.loads(write_report(r, "json"))
        for k, v in enumerate(vals):
            assert back["scalars"][f"v{k}"] == v
        assert complex(*back["scalars"]["z"]) == complex(np.e, -1 / 7)

    def test_csv_files(self):
        r = Report("demo", "0" * 16)
        r.add_table("t", {"a": [1.5, 2.5]})
        files = report_files(r, "csv")
        assert set(files) == {"t.csv", "scalars.csv"}
        assert files["t.csv"] == b"a\n1.5\n2.5\n"


class TestExecute:
    @pytest.fixture
    def qubit(self):
        return parse_scenario(QUBIT.read_bytes())

    def test_tension_coincident(self, qubit):
        r = execute("tension", {"i": "i", "m": "i", "f": "i"}, qubit)
        assert r.scalars["tension"] == 0.0

    def test_weak_value(self, qubit):
        r = execute("weak-value", {"observable": "Z", "initial": "i", "final": "f"}, qubit)
        assert abs(r.scalars["weak_value"] - 1j) < 1e-15

    def test_free_particle_kick(self):
        r = execute("free-particle", {"kick": 2.0}, None)
        t = r.tables["density"]
        assert tuple(t) == DENSITY_COLUMNS
        grad = np.gradient(np.array(t["arg_unwrapped"]), np.diff(t["x"][:2])[0])
        x_star = t["x"][int(np.argmin(np.abs(grad)))]
        assert abs(x_star - 0.5) <= 80 / 16384

    def test_random_states_follow_seed(self):
        s = parse_scenario(json.dumps({"dim": 3, "states": {"a": "random", "b": "random"}}))
        r1 = execute("dist", {"basis": "standard", "initial": "a", "final": "b", "seed": 4}, s)
        r2 = execute("dist", {"basis": "standard", "initial": "a", "final": "b", "seed": 5}, s)
        assert r1.tables["conditional"]["re"] != r2.tables["conditional"]["re"]


class TestMain:
    def test_exit_codes(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2,')
        assert main(["dist", "--scenario", str(bad)]) == 2
        orth = tmp_path / "orth.json"
        orth.write_text(json.dumps({"dim": 2, "states": {"a": [[1, 0], [0, 0]], "b": [[0, 0], [1, 0]]}}))
        assert main(["dist", "--scenario", str(orth), "--basis", "standard", "--initial", "a", "--final", "b"]) == 3
        assert main(["response", "--scenario", str(QUBIT), "--initial", "zero", "--final", "zero", "--fd-step", "-1"]) == 2
        assert main(["tension", "--scenario", str(QUBIT), "--nope"]) == 5
        assert main(["weak-value"]) == 5
        err = capsys.readouterr().err
        assert "Traceback" not in err

    def test_numeric_failure_code(self, monkeypatch):
        import weakdyn.hilbert as hb

        monkeypatch.setattr(hb, "JACOBI_MAX_SWEEPS", 0)
        assert main(["weak-value", "--scenario", str(QUBIT), "--observable", "X"]) == 4

    def test_out_path(self, tmp_path):
        assert main(["umax", "--scenario", str(QUBIT), "--out", "csv", "--out-path", str(tmp_path)]) == 0
        assert (tmp_path / "umax.csv").read_text().startswith("m,phase,term_abs\n")

    def test_subprocess_no_traceback(self):
        proc = subprocess.run(
            [sys.executable, "-m", "weakdyn", "free-particle", "--points", "256"], capture_output=True, text=True
        )
        assert proc.returncode == 2
        assert "Traceback" not in proc.stderr and "phase step" in proc.stderr

    def test_deterministic_bytes(self):
        argv = ["response", "--scenario", str(QUBIT), "--seed", "3"]
        assert run(argv) == run(argv)
