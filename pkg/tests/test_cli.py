import copy
import json
import stat

import jsonschema
import pytest

from _support import PRESENTATIONS, SCHEMA
from qig.cli import main
from qig.report import RunConfig, digest

LAMP = str(PRESENTATIONS / "lamplighter.grp")


@pytest.fixture(scope="module")
def validator():
    schema = json.loads(SCHEMA.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def _derive(tmp_path, *extra, src=LAMP):
    out = tmp_path / "out.json"
    code = main(["derive", src, "--cache-dir", str(tmp_path / "cache"), "--json", str(out), "-q", *extra])
    return code, (out.read_text() if out.exists() else None)


def test_derive_report_validates_and_caches(tmp_path, validator):
    code, blob = _derive(tmp_path)
    assert code == 0
    rep = json.loads(blob)
    validator.validate(rep)
    assert rep["structure"]["kind"] == "doubling"
    cached = (tmp_path / "cache" / f"{rep['digest']}.json")
    assert cached.read_text() == blob
    assert stat.S_IMODE(cached.stat().st_mode) == 0o644
    (tmp_path / "out.json").unlink()
    code, again = _derive(tmp_path, "--workers", "3")
    assert code == 0 and again == blob


def test_digest_depends_on_config_not_workers():
    text = "generators a\nrelations a^2 = 1\n"
    assert digest(text, RunConfig()) == digest(text, RunConfig(workers=8))
    assert digest(text, RunConfig()) != digest(text, RunConfig(degree_bound=5))


def test_cache_location_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("QIG_CACHE", str(tmp_path / "env"))
    assert main(["derive", LAMP, "-q"]) == 0
    assert len(list((tmp_path / "env").glob("*.json"))) == 1
    monkeypatch.delenv("QIG_CACHE")
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    assert RunConfig().cache() == tmp_path / "xdg" / "qig"


def test_text_summary_and_verbose_timing(tmp_path, capsys):
    assert main(["derive", LAMP, "--cache-dir", str(tmp_path), "-v"]) == 0
    out, err = capsys.readouterr()
    assert "reduced matrix:" in out and "[ " in out
    assert "structure: doubling (certified)" in out
    assert "derived" in err and "s " in err
    assert "seconds" not in json.loads(next(tmp_path.glob("*.json")).read_text())


def test_oracle_check_in_report(tmp_path, validator):
    code, blob = _derive(tmp_path, "--oracle-check")
    rep = json.loads(blob)
    validator.validate(rep)
    assert code == 0 and [o["agree"] for o in rep["oracle"]] == [True, True, True]


def test_recognize_with_pin(tmp_path, validator, capsys):
    code, blob = _derive(tmp_path)
    key = json.loads(blob)["digest"]
    cache = str(tmp_path / "cache")
    out = tmp_path / "rec.json"
    assert main(["recognize", key[:10], "--cache-dir", cache, "--pin", "t->t^-1", "--json", str(out), "-q"]) == 0
    rec = json.loads(out.read_text())
    validator.validate(rec)
    assert rec["structure"]["kind"] == "doubling" and rec["pinned"] == ["t->t^-1, a->a"]
    assert main(["recognize", key, "--cache-dir", cache, "--pin", "t->a"]) == 5
    assert main(["recognize", "0000", "--cache-dir", cache]) == 4
    assert "no cached derive report" in capsys.readouterr().err


def test_recognize_without_pin_matches_derive(tmp_path):
    code, blob = _derive(tmp_path)
    rep = json.loads(blob)
    out = tmp_path / "rec.json"
    assert main(["recognize", rep["digest"], "--cache-dir", str(tmp_path / "cache"), "--json", str(out), "-q"]) == 0
    assert json.loads(out.read_text())["structure"] == rep["structure"]


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.grp"
    bad.write_text("group X\ngenerators a\nrelations a^2 = = 1\n")
    assert main(["derive", str(bad), "--cache-dir", str(tmp_path)]) == 1
    assert f"{bad}:3:17:" in capsys.readouterr().err
    assert main(["derive", str(tmp_path / "missing.grp"), "--cache-dir", str(tmp_path)]) == 1


def test_backend_mismatch_exit_code(tmp_path):
    bad = tmp_path / "mismatch.grp"
    bad.write_text("generators a\nrelations a^3 = 1\nbackend cyclic(4)\n")
    assert main(["derive", str(bad), "--cache-dir", str(tmp_path)]) == 2


def test_budget_exit_code(tmp_path):
    src = str(PRESENTATIONS / "braid2.grp")
    assert main(["derive", src, "--cache-dir", str(tmp_path), "--expansion-cap", "2", "-q"]) == 3


def test_invalid_config_exit_code(tmp_path):
    assert main(["derive", LAMP, "--cache-dir", str(tmp_path), "--degree-bound", "0"]) == 1


def test_wreath_check_generic_caveat(tmp_path, validator):
    out = tmp_path / "w.json"
    assert main(["wreath-check", "--s", "5", "--n", "2", "--json", str(out), "-q"]) == 0
    rep = json.loads(out.read_text())
    validator.validate(rep)
    assert rep["caveat"] and rep["passed"] is False and rep["checks"] == {}
    assert main(["wreath-check", "--s", "1", "--n", "2"]) == 1


def test_wreath_check_single_copy(tmp_path, validator, capsys):
    out = tmp_path / "w.json"
    assert main(["wreath-check", "--s", "4", "--n", "1", "--json", str(out)]) == 0
    rep = json.loads(out.read_text())
    validator.validate(rep)
    assert rep["passed"] and all(v["status"] == "true" for v in rep["checks"].values())
    assert "all checks pass" in capsys.readouterr().out


def test_schema_rejects_malformed_reports(tmp_path, validator):
    code, blob = _derive(tmp_path)
    rep = json.loads(blob)
    for mutate in (lambda r: r["structure"].__setitem__("kind", "bogus"),
                   lambda r: r.pop("assumptions"),
                   lambda r: r.__setitem__("digest", "xyz"),
                   lambda r: r["derived_relations"][0]["terms"][0].__setitem__("coef", "1.5")):
        bad = copy.deepcopy(rep)
        mutate(bad)
        with pytest.raises(jsonschema.ValidationError):
            validator.validate(bad)
