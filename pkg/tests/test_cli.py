import json

import mpmath
import pytest

from skpullback.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


def _all_strings(obj):
    # numbers in reports are decimal strings; only ints for counts, bools and runtime are allowed
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "runtime_seconds":
                continue
            yield from _all_strings(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _all_strings(v)
    else:
        yield obj


@pytest.fixture(scope="module")
def verify1():
    import io
    import contextlib

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["verify", "--example", "1", "--digits", "16"])
    return code, json.loads(buf.getvalue())


def test_verify_example1(verify1):
    code, doc = verify1
    assert code == EXIT_PASS
    assert doc["schema"] == 1 and doc["verdict"] == "pass"
    assert doc["parameters"] == {"kappa": 11, "kappa_prime": 9, "m": 1, "N": 1}
    assert doc["intermediates"]["pullback_ratio_abs"]["computed"] == "1/2"
    assert doc["theorem"]["verdict"] == "pass"
    for v in _all_strings(doc):
        assert not isinstance(v, float)


def test_verify_deterministic(verify1, capsys):
    _, a = verify1
    _, b = _json(capsys, "verify", "--example", "1", "--digits", "16")
    a.pop("runtime_seconds"), b.pop("runtime_seconds")
    assert a == b


def test_verify_writes_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text = _run(capsys, "verify", "--example", "1", "--digits", "12", "--out", str(out))
    assert code == EXIT_PASS and text == ""
    assert json.loads(out.read_text())["example_id"] == 1


def test_verify_conductor_mismatch_fails(capsys):
    # level one: the scan picks Q = 1, which is not offered here
    code, _ = _run(capsys, "verify", "--example", "1", "--digits", "12", "--conductor-candidates", "2,3")
    assert code in (EXIT_FAIL, EXIT_USAGE)


def test_verify_conductor_scan_level_one(capsys):
    code, doc = _json(capsys, "verify", "--example", "1", "--digits", "12", "--conductor-candidates", "1,2,3")
    assert code == EXIT_PASS
    assert doc["conductor_scan"]["conductor"] == 1 and doc["conductor_scan"]["sign"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--example", "3"],
        ["verify", "--example", "1", "--digits", "0"],
        ["verify", "--example", "1", "--conductor-candidates", "a,b"],
        ["bogus"],
        [],
        ["coeffs", "--form", "nope"],
        ["constants", "--m-max", "-1"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def _write(tmp_path, obj, name="d.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _delta_inline():
    from skpullback.qseries import newform_fixture

    g = newform_fixture("g12.1", 200)
    return {
        "label": "Delta",
        "degree": 2,
        "gamma_shifts": [0],
        "weight": 12,
        "conductor": 1,
        "sign": 1,
        "coefficients": [g.coefficient(n) for n in range(1, 200)],
    }


def test_lvalue_inline_matches_mellin_integral(tmp_path, capsys):
    from skpullback.qseries import newform_fixture

    path = _write(tmp_path, _delta_inline())
    code, doc = _json(capsys, "lvalue", path, "--s", "6", "--digits", "25")
    assert code == EXIT_PASS and doc["schema"] == 1
    g = newform_fixture("g12.1", 200)
    with mpmath.workdps(35):
        D = lambda y: sum(g.coefficient(n) * mpmath.exp(-2 * mpmath.pi * n * y) for n in range(1, 150))
        ref = 4 * mpmath.quad(lambda y: D(y) * y**5, [1, 3, mpmath.inf])
        assert abs(mpmath.mpf(doc["value"]) - ref) / ref < mpmath.mpf(10) ** -22


def test_lvalue_reflected_point(tmp_path, capsys):
    path = _write(tmp_path, {"fixture": {"type": "twist", "f": "f18.1", "D": 3}, "truncation": 2000, "conductor": 9})
    _, a = _json(capsys, "lvalue", path, "--s", "19/2", "--digits", "20")
    _, b = _json(capsys, "lvalue", path, "--s", "17/2", "--digits", "20")
    assert abs(mpmath.mpf(a["value"]) - mpmath.mpf(b["value"])) < 1e-15 * abs(mpmath.mpf(a["value"]))


def test_lvalue_gamma_normalization(tmp_path, capsys):
    path = _write(tmp_path, {"fixture": {"type": "twist", "f": "f18.1", "D": 3}, "truncation": 2000, "conductor": 9})
    _, a = _json(capsys, "lvalue", path, "--s", "10", "--digits", "15")
    _, b = _json(capsys, "lvalue", path, "--s", "10", "--digits", "15", "--normalization", "gamma")
    assert abs(mpmath.mpf(a["value"]) / mpmath.mpf(b["value"]) - 9**5) < 1e-8 * 9**5


@pytest.mark.parametrize(
    "desc",
    [
        "{not json",
        "[1, 2]",
        {"label": "x", "degree": 2, "gamma_shifts": [0, 1], "weight": 12, "conductor": 1, "sign": 1, "coefficients": [1]},
        {"label": "x", "degree": 2, "gamma_shifts": [0], "weight": 12, "conductor": 1, "sign": 1},
        {"label": "x", "degree": 2, "gamma_shifts": [0], "weight": 12, "conductor": 1, "sign": 1, "coefficients": ["a"]},
        {"fixture": {"type": "cube", "f": "f18.1"}},
        {"fixture": {"type": "twist", "f": "missing", "D": 3}},
    ],
)
def test_malformed_descriptor(tmp_path, capsys, desc):
    path = _write(tmp_path, desc)
    assert main(["lvalue", path, "--s", "6"]) == EXIT_USAGE


def test_lvalue_shortfall_is_usage_error(tmp_path, capsys):
    d = _delta_inline()
    d["coefficients"] = d["coefficients"][:10]
    path = _write(tmp_path, d)
    assert main(["lvalue", path, "--s", "6", "--digits", "60"]) == EXIT_USAGE


def test_lvalue_missing_file(capsys):
    assert main(["lvalue", "/nonexistent/x.json", "--s", "6"]) == EXIT_USAGE


def test_constants_m_zero(capsys):
    code, doc = _json(capsys, "constants", "--m-max", "0")
    assert code == EXIT_PASS
    assert {r["m"] for r in doc["rows"]} == {0}
    assert len(doc["rows"]) == 6
    assert doc["named"] == {"C(11,9)": "1", "C(1,1)": "1"}
    assert all(doc["verdicts"].values())


def test_constants_csv(capsys):
    code, text = _run(capsys, "constants", "--kappa-prime-max", "3", "--m-max", "2", "--format", "csv")
    assert code == EXIT_PASS
    lines = text.strip().splitlines()
    assert lines[0].startswith("kappa,kappa_prime,m")
    assert len(lines) == 1 + 3 * 3
    assert all(l.endswith("True") for l in lines[1:])


def test_constants_deterministic(capsys):
    _, a = _json(capsys, "constants", "--kappa-prime-max", "2", "--m-max", "2")
    _, b = _json(capsys, "constants", "--kappa-prime-max", "2", "--m-max", "2")
    assert a == b


def test_coeffs(capsys):
    from skpullback.halfintegral import plus_form_fixture

    code, text = _run(capsys, "coeffs", "--form", "h19_2.4")
    assert code == EXIT_PASS and text == plus_form_fixture("h19_2.4").to_text()
    code, text = _run(capsys, "coeffs", "--form", "g12.1", "--truncation", "10")
    assert code == EXIT_PASS and "-24" in text


def test_petersson_command(capsys):
    code, doc = _json(capsys, "petersson", "--form", "g12.1", "--digits", "12")
    assert code == EXIT_PASS
    assert abs(mpmath.mpf(doc["value"]) - mpmath.mpf("1.0353620568043209223e-6")) < 1e-17
    assert main(["petersson", "--form", "nope"]) == EXIT_USAGE
