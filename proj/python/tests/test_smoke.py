import os
import pathlib

import pytest

import aprkit

FIXTURES = pathlib.Path(
    os.environ.get("APRKIT_FIXTURES", pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures")
)

BUGGY = "int clamp(int v) {\n  if (v < 0) {\n    return 0;\n  }\n  return v;\n}"
FIXED = "int clamp(int v) {\n  if (v <= 0) {\n    return 0;\n  }\n  return v;\n}"


def test_pairs():
    assert aprkit.valid_pairs() == ["IR1xOR1", "IR1xOR3", "IR1xOR4", "IR2xOR2", "IR3xOR2", "IR4xOR2"]
    assert aprkit.valid_pair("IR4xOR2")
    assert not aprkit.valid_pair("IR1xOR2")
    assert not aprkit.valid_pair("nonsense")


@pytest.mark.parametrize("pair", aprkit.valid_pairs())
def test_round_trip(pair):
    region = aprkit.derive_region(BUGGY, FIXED)
    assert region == (2, 2)
    output = aprkit.build_output(BUGGY, FIXED, region, pair[-3:])
    assert aprkit.reconstruct(BUGGY, region, pair, output) == FIXED


def test_inputs():
    ir3 = aprkit.build_input(BUGGY, (2, 2), "IR3")
    assert ir3.count("<FILL_ME>") == 1
    assert aprkit.build_input(BUGGY, (2, 2), "IR1") == BUGGY
    with pytest.raises(aprkit.InvalidRegion):
        aprkit.build_input(BUGGY, (5, 9), "IR3")
    with pytest.raises(aprkit.InvalidPair):
        aprkit.reconstruct(BUGGY, (2, 2), "IR1xOR2", "x")
    assert issubclass(aprkit.InvalidPair, ValueError)


def test_regions():
    n = len(BUGGY.splitlines())
    assert len(aprkit.enumerate_regions(BUGGY)) == n * (n + 1) // 2


def test_diff():
    a = "".join(f"line {i}\n" for i in range(1, 21))
    b = a.replace("line 10\n", "ten\n")
    patch = aprkit.make_diff(a, b, 1)
    assert patch.startswith("@@ -9,3 +9,3 @@")
    assert aprkit.apply_diff(patch, a) == b
    with pytest.raises(aprkit.HunkApplyFailure):
        aprkit.apply_diff(patch, "unrelated\n")


def test_matching():
    reformatted = "int clamp(int v) { if (v <= 0) { return 0; } return v; }"
    assert aprkit.exact_match(FIXED, FIXED.replace("\n", "\r\n"))
    assert not aprkit.exact_match(reformatted, FIXED)
    assert aprkit.ast_match(reformatted, FIXED) == "match"
    assert aprkit.ast_match(BUGGY, FIXED) == "no-match"
    assert aprkit.ast_match("int f( {", FIXED) == "parse-failure"


def test_extract_functions():
    source = (FIXTURES / "java" / "TwoMethods.java").read_text()
    names = [f["name"] for f in aprkit.extract_functions(source)]
    assert names == ["first", "second"]


def test_kappa():
    ratings = []
    for i, (a, b) in enumerate([("correct", "correct"), ("incorrect", "incorrect"),
                                ("correct", "incorrect"), ("correct", "correct")]):
        ratings += [(f"B{i}", 0, "a", a), (f"B{i}", 0, "b", b)]
    k = aprkit.cohen_kappa(ratings, "a", "b")
    # p_o = 3/4; p_e = 3/4 * 1/2 + 1/4 * 1/2 = 1/2.
    assert k["observed"] == pytest.approx(0.75)
    assert k["kappa"] == pytest.approx(0.5)
    with pytest.raises(aprkit.AprkitError):
        aprkit.cohen_kappa(ratings, "a", "nobody")


def test_training_config():
    golden = (FIXTURES / "golden" / "training_config.txt").read_text()
    assert aprkit.render_training_config() == golden
    assert aprkit.render_training_config("IR4xOR2") == golden + "representation=IR4xOR2\n"
