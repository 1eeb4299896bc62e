import io
import json

from graphcohom.cli import main


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_cohomology_text_and_determinism():
    code1, text1 = run(["cohomology", "--algebra", "builtin:sphere:2", "--graph", "complete:3", "--ring", "Q"])
    code2, text2 = run(["cohomology", "--algebra", "builtin:sphere:2", "--graph", "complete:3", "--ring", "Q"])
    assert code1 == code2 == 0
    assert text1 == text2  # byte-identical output
    assert "P_cohomology(t,u) = t^2*u + t^6" in text1


def test_cohomology_json_roundtrip():
    code, text = run(["cohomology", "--algebra", "builtin:torus:2", "--graph", "path:3", "--format", "json"])
    assert code == 0
    data = json.loads(text)
    assert json.dumps(data, sort_keys=True, indent=2) + "\n" == text
    assert any(r["rank"] for r in data["ranks"])


def test_cohomology_integer_ring_torsion_column():
    code, text = run(["cohomology", "--algebra", "builtin:sphere:2", "--graph", "complete:3", "--ring", "Z"])
    assert code == 0
    assert "torsion" in text


def test_cohomology_bad_inputs_exit_1():
    code, _ = run(["cohomology", "--algebra", "builtin:nope", "--graph", "complete:3"])
    assert code == 1
    code, _ = run(["cohomology", "--algebra", "/no/such/file.json", "--graph", "complete:3"])
    assert code == 1
    code, _ = run(["cohomology", "--algebra", "builtin:sphere:2", "--graph", "heptagon:9"])
    assert code == 1


def test_ss_pages_limit_and_field_requirement():
    code, text = run(["ss", "--dga", "builtin:massey", "--graph", "path:3", "--pages", "1"])
    assert code == 0
    assert "E_1 dimensions" in text and "E_2" not in text
    code, _ = run(["ss", "--dga", "builtin:massey", "--graph", "path:3", "--ring", "Z"])
    assert code == 1


def test_ss_formal_degenerates_at_e2():
    code, text = run(["ss", "--dga", "builtin:formal:sphere:2", "--graph", "path:3", "--pages", "2"])
    assert code == 0
    assert "degenerate at E_2" in text


def test_config_space_compare_pass():
    code, text = run(["config-space", "--complex", "builtin:circle", "--graph", "complete:2", "--compare"])
    assert code == 0
    assert "E_1 PASS" in text and "total vs relative PASS" in text


def test_config_space_point():
    code, text = run(["config-space", "--complex", "point", "--graph", "complete:2", "--format", "json"])
    assert code == 0
    data = json.loads(text)
    assert data["relative_cohomology"] == {}


def test_config_space_cap_exit_2():
    code, _ = run(["config-space", "--complex", "sphere2", "--graph", "complete:3", "--cap", "1000"])
    assert code == 2


def test_verify_selector_and_unknown():
    code, text = run(["verify", "multi-edge"])
    assert code == 0
    assert "PASS" in text
    code, _ = run(["verify", "definitely-not-a-suite"])
    assert code == 1


def test_verify_stability_seed():
    code, text = run(["verify", "stability", "--seed", "7"])
    assert code == 0 and "PASS" in text


def test_verify_json_roundtrip():
    code, text = run(["verify", "loop-vanishing", "--format", "json"])
    assert code == 0
    data = json.loads(text)
    assert data["status"] == "pass"
    assert json.dumps(data, sort_keys=True, indent=2) + "\n" == text
