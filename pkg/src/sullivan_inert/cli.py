"""Command line front end: space documents in, reports out.

Exit codes: 0 decided, 10 undecided at caps, 20-22 input problems,
30 an internal identity failed, 39 unexpected internal error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .attach import (
    UNDECIDED,
    ConeCdga,
    UnsupportedSpaceError,
    attach_trace,
    fiber_dimension_table,
    inertness_check,
    pd_inertness,
    wedge_of_spheres_model,
)
from .gca import Caps
from .lie import NotInertError, WordSyntaxError, theorem3_certificate
from .onerel import (
    OneRelatorScenario,
    aspherical_check,
    build_d0,
    build_dg_lie,
    circle_inertness_scenario,
    dg_lie_homology,
    ideal_quotient_dims,
)
from .sullivan import CapOverflowError, CdgaPresentation, HypothesisError, minimal_model

KINDS = ("cdga-presentation", "wedge-of-spheres", "pd-complex", "one-relator")
COMMANDS = ("model", "attach", "inert", "fiber", "certify", "onerel", "aspherical")

EXIT_DECIDED = 0
EXIT_UNDECIDED = 10
EXIT_SPEC = 20
EXIT_UNSUPPORTED = 21
EXIT_HYPOTHESIS = 22
EXIT_FALSIFIED = 30
EXIT_INTERNAL = 39


class SpecError(ValueError):
    """Schema violation, with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedCommand(ValueError):
    pass


# ---------------------------------------------------------------------------
# space documents


@dataclass
class SpaceSpec:
    kind: str
    payload: Dict
    caps: Caps = field(default_factory=Caps)
    scenario: Optional[Dict] = None

    def to_dict(self) -> Dict:
        out = {"kind": self.kind, "caps": {"max_degree": self.caps.max_degree, "max_length": self.caps.max_length}}
        out.update(self.payload)
        if self.scenario is not None:
            out["scenario"] = dict(self.scenario)
        return out


def serialize(spec: SpaceSpec) -> str:
    return json.dumps(spec.to_dict(), sort_keys=True)


def _int(doc, key, path, minimum=None):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"{path}.{key}", "expected an integer")
    if minimum is not None and v < minimum:
        raise SpecError(f"{path}.{key}", f"must be >= {minimum}")
    return v


def _parse_caps(doc) -> Caps:
    if doc is None:
        return Caps()
    if not isinstance(doc, dict):
        raise SpecError("caps", "expected an object")
    aliases = {"N": "max_degree", "L": "max_length"}
    norm = {aliases.get(k, k): v for k, v in doc.items()}
    unknown = set(norm) - {"max_degree", "max_length"}
    if unknown:
        raise SpecError("caps", f"unknown keys {sorted(unknown)}")
    N = _int(norm, "max_degree", "caps", 1) if "max_degree" in norm else Caps().max_degree
    L = Caps().max_length
    if "max_length" in norm:
        L = None if norm["max_length"] is None else _int(norm, "max_length", "caps", 1)
    return Caps(N, L)


def _infer_kind(doc) -> str:
    if "kind" in doc:
        kind = doc["kind"]
        if kind not in KINDS:
            raise SpecError("kind", f"must be one of {list(KINDS)}")
        return kind
    if "spheres" in doc:
        return "wedge-of-spheres"
    if "r" in doc and "word" in doc:
        return "one-relator"
    if "basis" in doc:
        return "cdga-presentation"
    raise SpecError("kind", "missing and cannot be inferred")


def _check_presentation(doc, path):
    basis = doc.get("basis")
    if not isinstance(basis, list) or not basis:
        raise SpecError(f"{path}.basis", "expected a nonempty list")
    names = set()
    for t, b in enumerate(basis):
        p = f"{path}.basis[{t}]"
        if not isinstance(b, dict) or not isinstance(b.get("name"), str):
            raise SpecError(p, "expected {name, degree[, weight]}")
        _int(b, "degree", p, 0)
        if "weight" in b:
            _int(b, "weight", p, 0)
        if b["name"] in names:
            raise SpecError(p, f"duplicate name {b['name']!r}")
        names.add(b["name"])
    if basis[0]["degree"] != 0:
        raise SpecError(f"{path}.basis[0]", "the first basis element must be the unit")
    for t, row in enumerate(doc.get("products", [])):
        p = f"{path}.products[{t}]"
        if not (isinstance(row, list) and len(row) == 3 and isinstance(row[2], dict)):
            raise SpecError(p, "expected [x, y, {z: coeff}]")
        for nm in [row[0], row[1], *row[2]]:
            if nm not in names:
                raise SpecError(p, f"unknown basis element {nm!r}")
    for nm, val in doc.get("differential", {}).items():
        if nm not in names or not isinstance(val, dict) or any(k not in names for k in val):
            raise SpecError(f"{path}.differential.{nm}", "unknown basis element")


def parse_spec(document) -> SpaceSpec:
    """Validate a space document (dict or JSON text) into a SpaceSpec."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SpecError(f"line {e.lineno}", e.msg) from None
    if not isinstance(document, dict):
        raise SpecError("$", "expected a JSON object")
    doc = dict(document)
    kind = _infer_kind(doc)
    caps = _parse_caps(doc.pop("caps", None))
    scenario = doc.pop("scenario", None)
    doc.pop("kind", None)
    if kind == "wedge-of-spheres":
        sph = doc.get("spheres")
        if not isinstance(sph, list) or not sph:
            raise SpecError("spheres", "expected a nonempty list of dimensions")
        for t, d in enumerate(sph):
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise SpecError(f"spheres[{t}]", "sphere dimensions must be integers >= 1")
        payload = {"spheres": list(sph)}
    elif kind == "one-relator":
        r = _int(doc, "r", "$", 1)
        word = doc.get("word")
        if not isinstance(word, str):
            raise SpecError("word", "expected a string")
        try:
            from .lie import parse_group_word

            parse_group_word(word, r)
        except WordSyntaxError as e:
            raise SpecError("word", str(e)) from None
        payload = {"r": r, "word": word}
    elif kind == "cdga-presentation":
        _check_presentation(doc, "$")
        payload = {k: doc[k] for k in ("basis", "products", "differential") if k in doc}
    else:
        forms = [k for k in ("algebra", "spheres", "surface", "torus") if k in doc]
        if len(forms) != 1:
            raise SpecError("$", "pd-complex needs exactly one of algebra, spheres, surface, torus")
        form = forms[0]
        if form == "algebra":
            _check_presentation(doc["algebra"], "algebra")
        elif form == "spheres":
            for t, d in enumerate(doc["spheres"]):
                if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                    raise SpecError(f"spheres[{t}]", "sphere dimensions must be integers >= 1")
        else:
            _int(doc, form, "$", 1)
        payload = {form: doc[form]}
    if scenario is not None:
        if not isinstance(scenario, dict):
            raise SpecError("scenario", "expected an object")
        if kind not in ("one-relator", "pd-complex"):
            _int(scenario, "n", "scenario", 1)
            if "class" not in scenario:
                raise SpecError("scenario.class", "missing")
    return SpaceSpec(kind, payload, caps, scenario)


def load_spec(path: str) -> SpaceSpec:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_spec(text)


# ---------------------------------------------------------------------------
# building spaces


def _presentation(doc, order: Optional[List[int]] = None) -> CdgaPresentation:
    basis = doc["basis"]
    if order is not None:
        basis = [basis[0]] + [basis[1 + i] for i in order]
    names = [b["name"] for b in basis]
    degrees = [b["degree"] for b in basis]
    weights = None
    if any("weight" in b for b in basis):
        weights = [b.get("weight", 0 if b["degree"] == 0 else 1) for b in basis]
    prods = {(x, y): {k: Fraction(str(c)) for k, c in z.items()} for x, y, z in doc.get("products", [])}
    diff = {k: {kk: Fraction(str(c)) for kk, c in v.items()} for k, v in doc.get("differential", {}).items()}
    return CdgaPresentation(names, degrees, prods, diff, weights)


def _pd_algebra(spec: SpaceSpec, order=None) -> CdgaPresentation:
    p = spec.payload
    if "algebra" in p:
        return _presentation(p["algebra"], order)
    if "surface" in p:
        return CdgaPresentation.surface(p["surface"])
    if "torus" in p:
        return CdgaPresentation.exterior([f"x{i + 1}" for i in range(p["torus"])])
    out = None
    for i, d in enumerate(p["spheres"]):
        s = CdgaPresentation.sphere(d, f"s{i + 1}")
        out = s if out is None else out.tensor(s)
    return out


def _seed_permutation(n: int, seed_order: Optional[str]) -> Optional[List[int]]:
    if not seed_order or seed_order == "canonical":
        return None
    if seed_order == "reverse":
        return list(reversed(range(n)))
    rng = random.Random(int(seed_order))
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def _scenario(spec: SpaceSpec):
    if spec.scenario is None:
        raise UnsupportedCommand("this command needs a scenario {n, class}")
    return spec.scenario["n"], spec.scenario["class"]


# ---------------------------------------------------------------------------
# reports


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class Report:
    command: str
    kind: str
    caps: Caps
    decided: bool = True
    body: Dict = field(default_factory=dict)
    identities: List[Dict] = field(default_factory=list)

    def identity(self, name: str, holds) -> None:
        self.identities.append({"identity": name, "holds": holds})

    @property
    def falsified(self) -> List[str]:
        return [i["identity"] for i in self.identities if i["holds"] is False]

    def to_dict(self):
        return _jsonable({
            "command": self.command,
            "kind": self.kind,
            "caps": {"max_degree": self.caps.max_degree, "max_length": self.caps.max_length},
            "certified_fiber_degrees": self.caps.max_degree - 2,
            "decided": self.decided,
            "identities": self.identities,
            **self.body,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"{self.command} on {self.kind} at N={self.caps.max_degree}, L={self.caps.max_length}"]
        for k in sorted(d):
            if k in ("command", "kind", "caps", "identities"):
                continue
            lines.append(f"  {k}: {json.dumps(d[k], sort_keys=True)}")
        for i in self.identities:
            mark = {True: "ok", False: "FAILED", None: "n/a"}[i["holds"]]
            lines.append(f"  [{mark}] {i['identity']}")
        return "\n".join(lines) + "\n"


def _add_checks(report: Report, checks: Dict[str, bool]):
    for k, v in sorted(checks.items()):
        report.identity(k, v)


def _verdict_body(report: Report, v):
    report.body["verdict"] = v.to_dict()
    report.decided = v.status != UNDECIDED
    _add_checks(report, v.checks)


def _fiber_body(report: Report, v, certify: bool):
    if v.relative_fiber is None:
        return
    table = fiber_dimension_table(v)
    report.body["fiber_table"] = table.to_dict()
    report.identity("fiber_dims_match_shifted", table.matches if v.inert else None)
    report.identity("fiber_products_vanish", table.products_vanish if v.inert else None)
    if certify and v.inert:
        cert = theorem3_certificate(v)
        report.body["free_lie_certificate"] = cert.to_dict()
        report.identity("prop5_match", cert.prop5_match)
        report.identity("free_dims_match", cert.free_dims_match)


def _inert_verdict(spec: SpaceSpec, order=None):
    caps = spec.caps
    if spec.kind == "one-relator":
        return circle_inertness_scenario(OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps))
    if spec.kind == "pd-complex":
        return pd_inertness(_pd_algebra(spec, order), caps)
    n, cls = _scenario(spec)
    if spec.kind == "wedge-of-spheres":
        W = wedge_of_spheres_model(spec.payload["spheres"], caps)
    else:
        W, _ = minimal_model(_presentation(spec.payload, order), caps)
    return inertness_check(W, n, cls, caps)


def _model_table(M) -> List[Dict]:
    return [{"name": r["name"], "degree": r["degree"], "weight": r["weight"], "d": r["d"]} for r in M.describe()]


def run(spec: SpaceSpec, command: str, certify: bool = False, seed_order: Optional[str] = None) -> Report:
    if command not in COMMANDS:
        raise UnsupportedCommand(f"unknown command {command!r}")
    caps = spec.caps
    report = Report(command, spec.kind, caps)
    order = None
    if spec.kind in ("cdga-presentation",) or (spec.kind == "pd-complex" and "algebra" in spec.payload):
        basis = spec.payload["basis"] if spec.kind == "cdga-presentation" else spec.payload["algebra"]["basis"]
        order = _seed_permutation(len(basis) - 1, seed_order)

    if command == "model":
        if spec.kind == "wedge-of-spheres":
            M = wedge_of_spheres_model(spec.payload["spheres"], caps)
        elif spec.kind == "one-relator":
            datum = build_d0(OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps))
            M = datum.model
            report.body["d0"] = datum.to_dict()
            report.identity("d0_square_zero", datum.square_zero())
            report.identity("d0_anticommutes_with_d1", datum.anticommutes())
        else:
            H = _presentation(spec.payload, order) if spec.kind == "cdga-presentation" else _pd_algebra(spec, order)
            M, rho = minimal_model(H, caps)
            report.identity("comparison_is_chain_map", not rho.check_chain_map())
            report.body["cohomology"] = M.cohomology_dims(range(caps.max_degree + 1)) if not M.weighted else None
        report.body["generator_counts"] = {str(k): v for k, v in sorted(M.degree_counts().items())}
        report.body["generators"] = _model_table(M)
        report.identity("sullivan_condition", M.check_sullivan())
        return report

    if command == "attach":
        if spec.kind == "one-relator":
            scn = OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps)
            W = wedge_of_spheres_model([1] * scn.r, caps)
            trace = attach_trace(W, 1, scn.word, caps)
        elif spec.kind in ("wedge-of-spheres", "cdga-presentation"):
            n, cls = _scenario(spec)
            if spec.kind == "wedge-of-spheres":
                W = wedge_of_spheres_model(spec.payload["spheres"], caps)
            else:
                W, _ = minimal_model(_presentation(spec.payload, order), caps)
            trace = attach_trace(W, n, cls, caps)
        else:
            raise UnsupportedCommand("attach is defined for wedges, presentations and one-relator words")
        cone = ConeCdga(trace)
        top = min(caps.max_degree, trace.n + 3)
        report.body["trace"] = trace.to_dict()
        report.body["cone_cohomology"] = cone.cohomology_dims(range(top + 1))
        report.identity("cone_square_zero", cone.square_zero(range(caps.max_degree + 1)))
        report.identity("cone_quotient_is_base", cone.quotient_matches_base(range(caps.max_degree + 1)))
        report.identity("epsilon_kills_boundaries", trace.kills_boundaries())
        return report

    if command in ("inert", "fiber", "certify"):
        v = _inert_verdict(spec, order)
        _verdict_body(report, v)
        full = certify or command == "certify"
        if command != "inert" or certify:
            _fiber_body(report, v, full)
        if full and spec.kind == "one-relator":
            asph = aspherical_check(OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps))
            report.identity("inert_iff_aspherical", asph.aspherical == v.inert)
        return report

    if command == "onerel":
        if spec.kind != "one-relator":
            raise UnsupportedCommand("onerel needs a one-relator document")
        scn = OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps)
        D = build_dg_lie(scn)
        hom = dg_lie_homology(D, caps)
        verdict = "aspherical" if hom.higher_vanishes else "not aspherical"
        report.body["rows"] = [dict(row, verdict=verdict) for row in hom.rows()]
        report.body["homology"] = hom.to_dict()
        report.body["leading_length"] = D.lead_length
        report.body["relator"] = D.alpha.format()
        report.body["flags"] = D.flags
        report.identity("dg_lie_square_zero", D.square_zero() and D.square_zero(leading=False))
        oracle = ideal_quotient_dims(scn.r, D.lead, caps.max_length)
        report.identity("h0_matches_ideal_quotient", oracle == hom.h0())
        if certify:
            asph = aspherical_check(scn, caps, homology=hom)
            _add_checks(report, asph.checks)
        return report

    # aspherical
    if spec.kind == "one-relator":
        rep = aspherical_check(OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps), caps)
        _add_checks(report, rep.checks)
        if certify:
            v = circle_inertness_scenario(OneRelatorScenario(spec.payload["r"], spec.payload["word"], caps))
            report.identity("inert_iff_aspherical", rep.aspherical == v.inert)
    elif spec.kind == "wedge-of-spheres":
        rep = aspherical_check(wedge_of_spheres_model(spec.payload["spheres"], caps), caps)
    else:
        H = _presentation(spec.payload, order) if spec.kind == "cdga-presentation" else _pd_algebra(spec, order)
        rep = aspherical_check(H, caps)
    report.body["aspherical"] = rep.aspherical
    report.body["asphericity"] = rep.to_dict()
    report.decided = rep.aspherical is not None
    return report


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sullivan-inert", description="Rational inertness of cell attachments.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="space document (JSON file, or - for stdin)")
    p.add_argument("--max-degree", type=int, help="override the degree cap N")
    p.add_argument("--max-length", type=int, help="override the length cap L")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--certify", action="store_true", help="run every cross-identity that applies")
    p.add_argument("--seed-order", default=None,
                   help="basis order for presentations: canonical, reverse or an integer shuffle seed")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        if args.max_degree is not None or args.max_length is not None:
            spec.caps = Caps(args.max_degree or spec.caps.max_degree,
                             args.max_length if args.max_length is not None else spec.caps.max_length)
        report = run(spec, args.command, args.certify, args.seed_order)
    except (SpecError, OSError, WordSyntaxError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except (UnsupportedCommand, UnsupportedSpaceError, NotInertError) as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except HypothesisError as e:
        print(f"hypothesis not met: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except CapOverflowError as e:
        print(f"undecided at caps: {e}", file=sys.stderr)
        return EXIT_UNDECIDED
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    if report.falsified:
        print(f"identity failed: {', '.join(report.falsified)}", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_DECIDED if report.decided else EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
