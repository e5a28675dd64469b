"""Command-line contract: parsing, exit codes, output formats, determinism."""

import json
import os
import re
from fractions import Fraction
from pathlib import Path

import pytest
from mpmath import mp

from zetacap import cli
from zetacap.errors import QuadratureFailure
from zetacap.oracle import root_table_csv
from zetacap.specfun import CapGeometry, Precision

SCHEMA_PATH = Path(cli.__file__).parent / "schemas" / "result.schema.json"


def run(capsys, args, expect=0):
    try:
        code = cli.main(args)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    captured = capsys.readouterr()
    assert code == expect, (code, captured.out, captured.err)
    return captured.out, captured.err


# ---------------------------------------------------------------------------
# minimal JSON-schema checker (draft-07 subset used by the shipped schema)


def validate(doc, schema, root=None, path="$"):
    root = schema if root is None else root
    if "$ref" in schema:
        target = root
        for part in schema["$ref"].lstrip("#/").split("/"):
            target = target[part]
        validate(doc, target, root, path)
        return
    if "oneOf" in schema:
        hits = 0
        for alt in schema["oneOf"]:
            try:
                validate(doc, alt, root, path)
                hits += 1
            except AssertionError:
                pass
        assert hits == 1, "%s: oneOf matched %d alternatives" % (path, hits)
        return
    if "const" in schema:
        assert doc == schema["const"], path
    if "enum" in schema:
        assert doc in schema["enum"], path
    kind = schema.get("type")
    if kind is not None:
        py = {"object": dict, "array": list, "string": str,
              "integer": int, "boolean": bool, "null": type(None)}[kind]
        assert isinstance(doc, py), "%s: not %s" % (path, kind)
        if kind == "integer":
            assert not isinstance(doc, bool), path
    if "pattern" in schema:
        assert re.search(schema["pattern"], doc), "%s: %r" % (path, doc)
    if kind == "object":
        for req in schema.get("required", ()):
            assert req in doc, "%s: missing %s" % (path, req)
        props = schema.get("properties", {})
        for key, val in doc.items():
            if key in props:
                validate(val, props[key], root, "%s.%s" % (path, key))
            else:
                assert schema.get("additionalProperties", True), \
                    "%s: unexpected key %s" % (path, key)
    if kind == "array" and "items" in schema:
        for i, item in enumerate(doc):
            validate(item, schema["items"], root, "%s[%d]" % (path, i))


@pytest.fixture(scope="module")
def schema():
    return json.loads(SCHEMA_PATH.read_text())


def strip_timestamp(payload: str) -> str:
    return "\n".join(l for l in payload.splitlines() if '"timestamp"' not in l)


# ---------------------------------------------------------------------------
# compute


def test_compute_conformal_d3_json(capsys, schema):
    out, _ = run(capsys, ["compute", "--D", "3", "--sigma", "0.5",
                          "--theta0", "1.5707963", "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    assert doc["command"] == "compute"
    assert doc["config"]["D"] == 3 and doc["config"]["d"] == 2
    row = doc["rows"][0]
    with mp.workdps(60):
        assert abs(mp.mpf(row["zeta0"]) + mp.mpf(1) / 48) < mp.mpf("1e-12")
        assert abs(mp.mpf(row["logdet"]) + mp.mpf(row["zeta_prime0"])) < mp.mpf("1e-40")
    assert row["error"] is None


def test_compute_conformal_d4(capsys):
    out, _ = run(capsys, ["compute", "--D", "4", "--sigma", "0.5",
                          "--theta0", "0.3", "--format", "csv"])
    lines = out.splitlines()
    assert lines[0] == "theta0,sigma,zeta0,zeta_prime0,logdet,error"
    zeta0 = lines[1].split(",")[2]
    with mp.workdps(60):
        assert abs(mp.mpf(zeta0) + mp.mpf(1) / 180) < mp.mpf("1e-12")


def test_compute_sigma_from_mass(capsys):
    out, _ = run(capsys, ["compute", "--D", "3", "--mass", "0",
                          "--theta0", "0.5"])
    assert "sigma     = 1.0  (from mass 0)" in out
    assert "zeta(0)" in out and "ln det" in out


def test_compute_explain_json(capsys, schema):
    out, _ = run(capsys, ["compute", "--D", "3", "--sigma", "1.3",
                          "--theta0", "1.1", "--explain", "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    row = doc["rows"][0]
    assert "partie_finie" in row["term_ledger"]
    assert "abel_plana" in row["term_ledger"]
    report = row["discrepancy_report"]
    assert report["zeta0"]["routes_agree_identically"] is True
    assert report["zeta_prime0"]["matched_candidate"] == "tower_log_promotion"


def test_compute_deterministic_bytes(capsys):
    args = ["compute", "--D", "3", "--sigma", "0.8", "--theta0", "2.0",
            "--format", "json"]
    first, _ = run(capsys, args)
    second, _ = run(capsys, args)
    assert strip_timestamp(first) == strip_timestamp(second)


def test_compute_singular_exit2(capsys):
    _, err = run(capsys, ["compute", "--D", "3", "--sigma", "2.0",
                          "--theta0", "2.9"], expect=2)
    assert "singular determinant" in err
    assert "w^2 - sigma^2" in err


def test_compute_numeric_failure_exit3(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise QuadratureFailure("partie-finie quadrature did not converge")

    monkeypatch.setattr("zetacap.invariants.logdet", boom)
    _, err = run(capsys, ["compute", "--D", "3", "--sigma", "0.5",
                          "--theta0", "1.0"], expect=3)
    assert "numerical failure" in err
    assert "partie-finie quadrature" in err


def test_compute_domain_error_exit2(capsys):
    _, err = run(capsys, ["compute", "--D", "3", "--sigma", "0.5",
                          "--theta0", "-1.0"], expect=2)
    assert "error" in err


def test_compute_writes_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    run(capsys, ["compute", "--D", "3", "--sigma", "0.5", "--theta0", "1.0",
                 "--format", "csv", "--output", str(target)])
    raw = target.read_bytes()
    assert raw.startswith(b"theta0,sigma,")
    assert b"\r" not in raw  # LF endings only


# ---------------------------------------------------------------------------
# argument validation (argparse exits with code 2)


@pytest.mark.parametrize("args", [
    ["compute", "--theta0", "1.0", "--sigma", "0.5"],                    # no d
    ["compute", "--d", "2", "--D", "3", "--theta0", "1.0", "--sigma", "0.5"],
    ["compute", "--D", "3", "--theta0", "1.0"],                          # no sigma/mass
    ["compute", "--D", "3", "--theta0", "1.0", "--sigma", "0.5", "--mass", "0"],
    ["compute", "--D", "3", "--theta0", "0.1:1.0:5", "--sigma", "0.5"],  # range
    ["sweep", "--D", "3", "--theta0", "1.0", "--sigma", "0.5"],          # no range
    ["sweep", "--D", "3", "--theta0", "0.1:1.0:0", "--sigma", "0.5"],    # empty range
    ["compute", "--D", "3", "--theta0", "abc", "--sigma", "0.5"],
    ["compute", "--D", "3", "--theta0", "1.0", "--sigma", "0.5",
     "--precision", "10"],
    ["coeffs", "--order", "9"],
    ["coeffs", "--order", "0"],
    ["coeffs", "--sigma", "0.1:1:3"],
])
def test_usage_errors_exit2(capsys, args):
    run(capsys, args, expect=2)


# ---------------------------------------------------------------------------
# sweep


def test_sweep_conformal_constant_zeta0(capsys, schema):
    out, _ = run(capsys, ["sweep", "--D", "3", "--sigma", "0.5",
                          "--theta0", "0.4:2.8:3", "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    assert len(doc["rows"]) == 3
    zeta0s = {row["zeta0"] for row in doc["rows"]}
    assert len(zeta0s) == 1
    with mp.workdps(60):
        assert abs(mp.mpf(zeta0s.pop()) + mp.mpf(1) / 48) < mp.mpf("1e-40")


def test_sweep_duplicate_rows_bit_identical(capsys):
    out, _ = run(capsys, ["sweep", "--D", "3", "--sigma", "0.7",
                          "--theta0", "1.3:1.3:2", "--format", "csv"])
    lines = out.splitlines()
    assert len(lines) == 3
    assert lines[1] == lines[2]


def test_sweep_partial_failure_exit0(capsys):
    out, err = run(capsys, ["sweep", "--D", "3", "--sigma", "0.5:2.5:2",
                            "--theta0", "2.9", "--format", "csv"])
    lines = out.splitlines()
    assert len(lines) == 3
    assert lines[1].endswith(",")            # first row succeeded
    assert "SingularDeterminant" in lines[2]  # second row failed in-band
    assert "1 of 2 rows failed" in err


def test_sweep_all_rows_failed_exit3(capsys):
    out, _ = run(capsys, ["sweep", "--D", "3", "--sigma", "3.0",
                          "--theta0", "2.8:2.9:2", "--format", "csv"],
                 expect=3)
    lines = out.splitlines()
    assert all("SingularDeterminant" in line for line in lines[1:])


def test_sweep_jobs_parallel_identical_bytes(capsys):
    args = ["sweep", "--D", "3", "--sigma", "0.6:1.2:2", "--theta0", "1.3",
            "--format", "csv"]
    serial, _ = run(capsys, args)
    parallel, _ = run(capsys, args + ["--jobs", "2"])
    assert serial == parallel


def test_sweep_mass_range_derives_sigma(capsys, schema):
    out, _ = run(capsys, ["sweep", "--D", "3", "--mass", "0:1:2",
                          "--theta0", "1.0", "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    assert doc["config"]["mass"] == ["0.0", "1.0"]  # range values are re-rendered
    with mp.workdps(40):
        sigmas = [mp.mpf(s) for s in doc["config"]["sigma"]]
        assert abs(sigmas[0] - 1) < mp.mpf("1e-30")
        assert abs(sigmas[1] - mp.sqrt(2)) < mp.mpf("1e-30")


# ---------------------------------------------------------------------------
# verify


def test_verify_unsupported_dimension_exit2(capsys):
    _, err = run(capsys, ["verify", "--D", "9"], expect=2)
    assert "unsupported dimension" in err


def _fake_checks(status_second):
    def ok(d, digits, full=False):
        return cli._result("pass", "0", "1", "stub check")

    def other(d, digits, full=False):
        return cli._result(status_second, "2", "1", "stub check")

    return (
        ("criterion-01-stub", ok, lambda d: True, None),
        ("criterion-02-stub", other, lambda d: True, None),
        ("criterion-03-stub", ok, lambda d: False, "not applicable here"),
    )


def test_verify_json_schema_and_exit0(capsys, schema, monkeypatch):
    monkeypatch.setattr(cli, "_CHECKS", _fake_checks("pass"))
    out, _ = run(capsys, ["verify", "--D", "3", "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    statuses = [c["status"] for c in doc["checks"]]
    assert statuses == ["pass", "pass", "skip"]


def test_verify_failing_check_exit1(capsys, monkeypatch):
    monkeypatch.setattr(cli, "_CHECKS", _fake_checks("fail"))
    out, _ = run(capsys, ["verify", "--D", "3", "--format", "csv"], expect=1)
    assert "criterion-02-stub,fail" in out


def test_verify_crashing_check_reported_as_fail(capsys, monkeypatch):
    def boom(d, digits, full=False):
        raise RuntimeError("synthetic crash")

    monkeypatch.setattr(cli, "_CHECKS",
                        (("criterion-01-stub", boom, lambda d: True, None),))
    out, _ = run(capsys, ["verify", "--D", "3", "--format", "csv"], expect=1)
    assert "RuntimeError: synthetic crash" in out


def test_verify_real_single_check_text(capsys, monkeypatch):
    # run one cheap real criterion end to end through the CLI
    monkeypatch.setattr(cli, "_CHECKS", (cli._CHECKS[0], cli._CHECKS[1]))
    out, _ = run(capsys, ["verify", "--D", "3"])
    assert "[PASS] criterion-01-appendix-cumulants" in out
    assert "[PASS] criterion-02-conformal-zeta0" in out
    assert "2 passed, 0 failed, 0 skipped" in out


# ---------------------------------------------------------------------------
# coeffs


def test_coeffs_sigma_half_constant(capsys):
    out, _ = run(capsys, ["coeffs", "--order", "1", "--sigma", "0.5"])
    assert "a_1 at sigma = 0.5: -1/12" in out
    assert "C_1 = -1/12" in out


def test_coeffs_default_order_csv(capsys):
    out, _ = run(capsys, ["coeffs", "--format", "csv"])
    lines = out.splitlines()
    assert lines[0] == "n,a_limit,cumulant,a_at_sigma"
    assert len(lines) == 5
    assert lines[1].startswith("1,")


def test_coeffs_json_schema(capsys, schema):
    out, _ = run(capsys, ["coeffs", "--order", "8", "--sigma", "1.5",
                          "--format", "json"])
    doc = json.loads(out)
    validate(doc, schema)
    assert [c["n"] for c in doc["coefficients"]] == list(range(1, 9))
    assert all(c["a_at_sigma"] is not None for c in doc["coefficients"])


def test_coeffs_substitution_matches_poly_eval(capsys):
    out, _ = run(capsys, ["coeffs", "--order", "3", "--sigma", "1.5",
                          "--format", "json"])
    rec = json.loads(out)["coefficients"][2]
    # evaluate both renderings at one rational S and compare exactly
    s_val = Fraction(1, 3)
    sigma2 = Fraction(9, 4)
    from zetacap.asympt import limit_cumulants_s

    poly = limit_cumulants_s(3)[2]
    direct = sum(c * sigma2 ** i * s_val ** j for (i, j), c in poly.items())
    rendered = rec["a_at_sigma"]
    total = Fraction(0)
    for term in rendered.split(" + "):
        m = re.fullmatch(r"\((-?\d+(?:/\d+)?)\)(?:\*S(?:\^(\d+))?)?", term)
        assert m, rendered
        power = int(m.group(2) or (1 if "S" in term else 0))
        total += Fraction(m.group(1)) * s_val ** power
    assert total == direct


# ---------------------------------------------------------------------------
# cache wiring


def test_cache_dir_flag_creates_keyed_file(capsys, tmp_path):
    run(capsys, ["compute", "--D", "3", "--sigma", "0.5", "--theta0", "1.0",
                 "--cache-dir", str(tmp_path)])
    assert (tmp_path / "base_d2_wd50.json").exists()


def test_cache_env_var_honored(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ZETACAP_CACHE_DIR", str(tmp_path))
    run(capsys, ["compute", "--D", "4", "--sigma", "0.5", "--theta0", "1.0",
                 "--precision", "35"])
    assert (tmp_path / "base_d3_wd35.json").exists()


# ---------------------------------------------------------------------------
# exported root table


def test_root_table_csv_header_and_rows():
    prec = Precision(30, 1e-20)
    with mp.workdps(40):
        geom = CapGeometry(2, mp.pi / 2, mp.mpf("0.5"))
    text = root_table_csv(geom, 1, 2, prec)
    lines = text.splitlines()
    assert lines[0] == "k,n,omega,alpha2"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"  # n is 0-based within each k
    with mp.workdps(40):
        omega, alpha2 = mp.mpf(first[2]), mp.mpf(first[3])
        assert abs(alpha2 - (omega ** 2 - mp.mpf("0.25"))) < mp.mpf("1e-18")
