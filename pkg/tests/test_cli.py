import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sullivan_inert import cli
from sullivan_inert.cli import SpecError, parse_spec, run, serialize

S2XS2 = {
    "kind": "cdga-presentation",
    "basis": [{"name": "1", "degree": 0}, {"name": "a", "degree": 2}, {"name": "b", "degree": 2},
              {"name": "ab", "degree": 4}],
    "products": [["a", "b", {"ab": 1}]],
}
WEDGE = {"spheres": [2, 2], "scenario": {"n": 3, "class": "[i1,i2]"}}
HOPF = {"kind": "cdga-presentation", "basis": [{"name": "1", "degree": 0}, {"name": "s", "degree": 2}],
        "scenario": {"n": 3, "class": {"v3_1": 1}}}
TORUS = {"r": 2, "word": "[a,b]"}


def _write(tmp_path, doc, name="space.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def _main(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kind_is_inferred():
    assert parse_spec(WEDGE).kind == "wedge-of-spheres"
    assert parse_spec(TORUS).kind == "one-relator"
    assert parse_spec({k: v for k, v in S2XS2.items() if k != "kind"}).kind == "cdga-presentation"
    assert parse_spec({"kind": "pd-complex", "surface": 2}).kind == "pd-complex"


def test_caps_aliases():
    spec = parse_spec(dict(WEDGE, caps={"N": 7, "L": 4}))
    assert (spec.caps.max_degree, spec.caps.max_length) == (7, 4)


@pytest.mark.parametrize("doc,where", [
    ({"spheres": [2, 0]}, "spheres[1]"),
    ({"spheres": []}, "spheres"),
    ({"r": 2, "word": "axb"}, "word"),
    ({"kind": "torus"}, "kind"),
    ({"spheres": [2], "caps": {"max_degree": "8"}}, "caps.max_degree"),
    ({"spheres": [2], "caps": {"Q": 1}}, "caps"),
    ({"basis": [{"name": "1", "degree": 0}], "products": [["x", "1", {"1": 1}]]}, "products"),
    ({"spheres": [2], "scenario": {"n": 2}}, "scenario.class"),
    ("{not json", "line 1"),
])
def test_spec_errors_name_the_offending_path(doc, where):
    with pytest.raises(SpecError) as err:
        parse_spec(doc if isinstance(doc, str) else json.dumps(doc))
    assert where in str(err.value)


documents = st.one_of(
    st.builds(lambda s: {"spheres": s}, st.lists(st.integers(1, 6), min_size=1, max_size=4)),
    st.builds(lambda r, w: {"r": r, "word": w}, st.integers(2, 4), st.sampled_from(["ab", "[a,b]", "a^2", "aB"])),
    st.builds(lambda g: {"kind": "pd-complex", "surface": g}, st.integers(1, 3)),
)
caps = st.fixed_dictionaries({"max_degree": st.integers(2, 12), "max_length": st.integers(1, 8)})


@settings(max_examples=50, deadline=None)
@given(documents, caps)
def test_spec_round_trip(doc, cap):
    spec = parse_spec(dict(doc, caps=cap))
    text = serialize(spec)
    again = parse_spec(text)
    assert serialize(again) == text
    assert again == spec


def test_exit_codes(tmp_path, capsys):
    assert _main(capsys, "inert", _write(tmp_path, WEDGE))[0] == cli.EXIT_DECIDED
    assert _main(capsys, "inert", _write(tmp_path, HOPF))[0] == cli.EXIT_DECIDED
    code, _, err = _main(capsys, "inert", _write(tmp_path, {"spheres": [2, -1]}))
    assert code == cli.EXIT_SPEC and "spheres[1]" in err
    assert _main(capsys, "inert", str(tmp_path / "missing.json"))[0] == cli.EXIT_SPEC
    assert _main(capsys, "onerel", _write(tmp_path, WEDGE))[0] == cli.EXIT_UNSUPPORTED
    assert _main(capsys, "onerel", _write(tmp_path, {"r": 1, "word": "a"}))[0] == cli.EXIT_HYPOTHESIS


def test_duality_space_with_a_degree_one_dual_pair(tmp_path, capsys):
    # S1 x S3: the degree-1 class pairs with the degree-3 class
    doc = {"kind": "pd-complex", "spheres": [1, 3]}
    code, out, _ = _main(capsys, "inert", _write(tmp_path, doc), "--format", "json")
    assert code == cli.EXIT_DECIDED
    verdict = json.loads(out)["verdict"]
    assert verdict["status"] == "inert-up-to-caps"
    assert verdict["checks"] == {"primitive_products_vanish": True}


def test_circle_times_sphere_product_is_decided(tmp_path, capsys):
    # S1 x S2 x S2 given by its cohomology algebra
    doc = {"kind": "pd-complex", "algebra": {
        "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 1, "weight": 1},
                  {"name": "y", "degree": 2, "weight": 1}, {"name": "xy", "degree": 3, "weight": 2},
                  {"name": "z", "degree": 2, "weight": 1}, {"name": "xz", "degree": 3, "weight": 2},
                  {"name": "yz", "degree": 4, "weight": 2}, {"name": "xyz", "degree": 5, "weight": 3}],
        "products": [["x", "y", {"xy": 1}], ["x", "z", {"xz": 1}], ["y", "z", {"yz": 1}],
                     ["x", "yz", {"xyz": 1}], ["y", "xz", {"xyz": -1}], ["z", "xy", {"xyz": 1}]]}}
    code, out, _ = _main(capsys, "inert", _write(tmp_path, doc), "--format", "json")
    assert code == cli.EXIT_DECIDED
    assert json.loads(out)["verdict"]["checks"] == {"primitive_products_vanish": True}


def test_undecided_and_falsified_exit_codes(tmp_path, monkeypatch, capsys):
    path = _write(tmp_path, WEDGE)
    undecided = cli.Report("inert", "wedge-of-spheres", parse_spec(WEDGE).caps, decided=False)
    monkeypatch.setattr(cli, "run", lambda *a, **k: undecided)
    assert _main(capsys, "inert", path)[0] == cli.EXIT_UNDECIDED
    broken = cli.Report("inert", "wedge-of-spheres", parse_spec(WEDGE).caps)
    broken.identity("cone_square_zero", False)
    monkeypatch.setattr(cli, "run", lambda *a, **k: broken)
    code, _, err = _main(capsys, "inert", path)
    assert code == cli.EXIT_FALSIFIED and "cone_square_zero" in err


def test_json_report_shape(tmp_path, capsys):
    code, out, _ = _main(capsys, "certify", _write(tmp_path, WEDGE), "--format", "json")
    assert code == cli.EXIT_DECIDED
    report = json.loads(out)
    assert report["verdict"]["status"] == "inert-up-to-caps"
    assert report["certified_fiber_degrees"] == 6
    assert all(i["holds"] is not False for i in report["identities"])
    assert report["free_lie_certificate"]["prop5_match"]
    assert [r["fiber"] for r in report["fiber_table"]["rows"]][2:] == [1, 2, 3, 4]


def test_onerel_table(tmp_path, capsys):
    code, out, _ = _main(capsys, "onerel", _write(tmp_path, TORUS), "--format", "json", "--certify")
    assert code == cli.EXIT_DECIDED
    report = json.loads(out)
    assert [r["H0"] for r in report["rows"]] == [2, 0, 0, 0, 0, 0]
    assert {r["verdict"] for r in report["rows"]} == {"aspherical"}


def test_text_format_lists_identities(tmp_path, capsys):
    code, out, _ = _main(capsys, "attach", _write(tmp_path, WEDGE))
    assert code == cli.EXIT_DECIDED
    assert "[ok] cone_square_zero" in out


def test_cap_override_on_the_command_line(tmp_path, capsys):
    _, out, _ = _main(capsys, "inert", _write(tmp_path, WEDGE), "--format", "json", "--max-degree", "6")
    assert json.loads(out)["caps"]["max_degree"] == 6


def test_stdin_document(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(TORUS)))
    code, out, _ = _main(capsys, "aspherical", "-", "--format", "json")
    assert code == cli.EXIT_DECIDED
    assert json.loads(out)["aspherical"] is True


@pytest.mark.parametrize("doc", [WEDGE, HOPF, TORUS, dict(S2XS2, scenario={"n": 3, "class": "0"})])
def test_reports_are_byte_identical_across_runs(doc):
    spec = parse_spec(doc)
    assert run(spec, "certify").to_json() == run(parse_spec(doc), "certify").to_json()


@pytest.mark.parametrize("seed", ["canonical", "reverse", "0", "7"])
def test_basis_order_does_not_change_the_verdict(seed):
    spec = parse_spec({"kind": "pd-complex", "algebra": {k: v for k, v in S2XS2.items() if k != "kind"}})
    report = run(spec, "inert", seed_order=seed).to_dict()
    assert report["verdict"]["status"] == "inert-up-to-caps"
    assert report["verdict"]["fiber_cohomology"] == run(spec, "inert").to_dict()["verdict"]["fiber_cohomology"]
