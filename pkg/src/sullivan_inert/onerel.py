"""One-relator attachments on a wedge of circles.

The class of a word is attached as a 2-cell.  On the Lie side this is the
dg Lie algebra on letters ``x1..xr`` (degree 0) and ``y`` (degree 1) with
``dy`` the Magnus logarithm of the word.  On the cochain side it is a degree
one map ``d0`` on the generators of the quadratic model of the wedge of the
circles with one extra 2-sphere class ``a``.

Everything is graded by weight, with ``x_i`` of weight 1 and ``y`` (dually
``a``) of weight equal to the leading length of the logarithm.  The
differentials then only raise weight on the Lie side (only lower it on the
cochain side), and the weight-preserving parts are exact per weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .attach import (
    INERT,
    NOT_INERT,
    UNDECIDED,
    AttachTrace,
    FiberRow,
    FiberTable,
    InertnessVerdict,
    UnsupportedSpaceError,
    attach_trace,
    fiber_cohomology,
    wedge_like_check,
)
from .gca import ONE, Caps, Derivation, GradedAlgebra, Generator, Poly, cohomology
from .lie import (
    FreeLieAlgebra,
    GroupWord,
    LieElement,
    Tensor,
    magnus_log,
    parse_group_word,
    tensor_mul,
    witt_formula,
)
from .linalg import Echelon, kernel, vec_iadd
from .sullivan import (
    CapOverflowError,
    CdgaPresentation,
    HypothesisError,
    SullivanAlgebra,
    minimal_model,
    quadratic_model,
    quotient_by_base,
    relative_model,
)


@dataclass
class OneRelatorScenario:
    r: int
    word: GroupWord
    caps: Caps = field(default_factory=Caps)

    def __post_init__(self):
        if isinstance(self.word, str):
            self.word = parse_group_word(self.word, self.r)
        if self.r < 2:
            raise HypothesisError("a one-relator scenario needs at least two circles")
        if self.word.rank != self.r:
            raise ValueError(f"word is over {self.word.rank} letters, expected {self.r}")
        if self.caps.max_length is None:
            raise ValueError("circle wedges need a length cap")

    @property
    def trivial(self) -> bool:
        return not self.word.letters

    def to_dict(self):
        return {"r": self.r, "word": self.word.text or self.word.format(), "caps": self.caps.as_dict()}


# ---------------------------------------------------------------------------
# the dg Lie algebra


@dataclass
class DgLie:
    scenario: OneRelatorScenario
    lie: FreeLieAlgebra
    alpha: LieElement
    lead: LieElement
    lead_length: Optional[int]
    flags: List[str] = field(default_factory=list)

    @property
    def y(self) -> int:
        return self.scenario.r

    @property
    def max_weight(self) -> int:
        return self.scenario.caps.max_length

    def dy(self, leading: bool = True) -> Tensor:
        return (self.lead if leading else self.alpha).to_tensor()

    def boundary(self, t: Tensor, leading: bool = True) -> Tensor:
        """Apply the odd derivation with dx = 0 and dy = α (or its leading part)."""
        dy = self.dy(leading)
        wt = self.lie.weights
        out: Tensor = {}
        for word, c in t.items():
            sign = 1
            for pos, letter in enumerate(word):
                if letter != self.y:
                    continue
                head, tail = word[:pos], word[pos + 1:]
                base = sum(wt[i] for i in head + tail)
                for mid, cm in dy.items():
                    if base + sum(wt[i] for i in mid) > self.max_weight:
                        continue
                    new = head + mid + tail
                    out[new] = out.get(new, 0) + sign * c * cm
                sign = -sign
        return {k: v for k, v in out.items() if v}

    def basis(self, weight: int, q: int):
        """Hall basis keys of the given weight and y-count."""
        out = []
        for length in range(1, weight + 1):
            for j, e in enumerate(self.lie.basis(length)):
                if e.weight == weight and e.degree == q:
                    out.append((length, j))
        return out

    def boundary_of_basis(self, key, leading: bool = True) -> Dict:
        e = self.lie.basis(key[0])[key[1]]
        img = self.boundary(self.lie.expand(e.tree), leading)
        if not img:
            return {}
        return dict(self.lie.from_tensor(img).coords)

    def square_zero(self, leading: bool = True) -> bool:
        for w in range(1, self.max_weight + 1):
            for q in range(1, w + 1):
                for key in self.basis(w, q):
                    e = self.lie.basis(key[0])[key[1]]
                    if self.boundary(self.boundary(self.lie.expand(e.tree), leading), leading):
                        return False
        return True


def build_dg_lie(scenario: OneRelatorScenario) -> DgLie:
    r, L = scenario.r, scenario.caps.max_length
    alpha = magnus_log(scenario.word, r, L)
    n = alpha.leading_length
    flags = list(alpha.flags)
    if n is None:
        flags.append("trivial word: the asphericity statement does not apply")
    lie = FreeLieAlgebra([0] * r + [1], [f"x{i + 1}" for i in range(r)] + ["y"],
                         [1] * r + [n or 1], L)
    lead = alpha.component(n) if n is not None else alpha
    return DgLie(scenario, lie, alpha, lead, n, flags)


@dataclass
class LieHomology:
    """dims[(q, weight)] for the leading-term complex; totals[q] for the full one."""

    dims: Dict[Tuple[int, int], int]
    chain_dims: Dict[Tuple[int, int], int]
    totals: Dict[int, int]
    max_weight: int

    def h0(self) -> List[int]:
        return [self.dims.get((0, w), 0) for w in range(1, self.max_weight + 1)]

    def higher(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in self.dims.items() if k[0] >= 1 and v}

    @property
    def higher_vanishes(self) -> bool:
        return not self.higher()

    def rows(self):
        out = []
        for w in range(1, self.max_weight + 1):
            out.append({"length": w, "H0": self.dims.get((0, w), 0), "H1": self.dims.get((1, w), 0)})
        return out

    def to_dict(self):
        return {
            "H0": self.h0(),
            "higher_nonzero": {f"{q},{w}": v for (q, w), v in sorted(self.higher().items())},
            "full_totals": {str(q): v for q, v in sorted(self.totals.items())},
        }


def _rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def dg_lie_homology(D: DgLie, caps: Optional[Caps] = None) -> LieHomology:
    """Exact homology per (y-count, weight) of the leading-term complex.

    The full differential is also reduced modulo weights above the cap; its
    total homology per y-count is recorded for comparison.
    """
    L = (caps or D.scenario.caps).max_length
    chain, ranks = {}, {}
    qmax = L // (D.lead_length or 1)
    for w in range(1, L + 1):
        for q in range(0, qmax + 2):
            keys = D.basis(w, q)
            chain[(q, w)] = len(keys)
            ranks[(q, w)] = _rank(D.boundary_of_basis(k) for k in keys) if q else 0
    dims = {}
    for w in range(1, L + 1):
        for q in range(0, qmax + 1):
            h = chain[(q, w)] - ranks[(q, w)] - ranks.get((q + 1, w), 0)
            if h:
                dims[(q, w)] = h
    totals = {}
    for q in range(0, qmax + 1):
        keys = [k for w in range(1, L + 1) for k in D.basis(w, q)]
        up = [k for w in range(1, L + 1) for k in D.basis(w, q + 1)]
        rk_out = _rank(D.boundary_of_basis(k, leading=False) for k in keys) if q else 0
        rk_in = _rank(D.boundary_of_basis(k, leading=False) for k in up)
        totals[q] = len(keys) - rk_out - rk_in
    return LieHomology(dims, chain, totals, L)


def ideal_quotient_dims(r: int, relator: LieElement, max_weight: int) -> List[int]:
    """dim of (free Lie)/(ideal of a homogeneous relator) per length.

    The ideal is spanned by iterated brackets [x_i1, [x_i2, ... relator]]; the
    free part is counted by Witt's formula.
    """
    n = relator.leading_length
    rel = relator.to_tensor()
    out = []
    layer = [rel] if n is not None else []
    for w in range(1, max_weight + 1):
        if n is None or w < n:
            out.append(witt_formula(r, w))
            continue
        if w > n:
            nxt = []
            for t in layer:
                for i in range(r):
                    x = {(i,): Fraction(1)}
                    b = tensor_mul(x, t)
                    vec_iadd(b, tensor_mul(t, x), -1)
                    nxt.append(b)
            ech = Echelon()
            layer = [v for v in nxt if ech.add(v)]
        out.append(witt_formula(r, w) - len(layer))
    return out


# ---------------------------------------------------------------------------
# cochain side


@dataclass
class D0Datum:
    scenario: OneRelatorScenario
    model: SullivanAlgebra
    a: int
    trace: AttachTrace
    d0: Derivation
    gr: Derivation
    lead_length: Optional[int]
    flags: List[str] = field(default_factory=list)

    @property
    def algebra(self) -> GradedAlgebra:
        return self.model.algebra

    def degree_one(self) -> List[int]:
        return [i for i, g in enumerate(self.algebra.generators) if g.degree == 1]

    def generators(self, degree: int, weight: Optional[int] = None) -> List[int]:
        return [i for i, g in enumerate(self.algebra.generators)
                if g.degree == degree and (weight is None or g.weight == weight)]

    def square_zero(self, graded: bool = False) -> bool:
        d = self.gr if graded else self.d0
        return all(not d(d.values[i]) for i in range(len(self.algebra)))

    def anticommutes(self, graded: bool = False) -> bool:
        d = self.gr if graded else self.d0
        d1 = self.model.d
        for i in range(len(self.algebra)):
            s = d1(d.values[i])
            vec_iadd(s, d(d1.values[i]))
            if s:
                return False
        return True

    def total_stages(self) -> Optional[Dict[int, int]]:
        """Sullivan stages of (ΛW, d1 + d0), or None if the differential is not triangular."""
        vals = {}
        for i in range(len(self.algebra)):
            v = dict(self.model.d.values[i])
            vec_iadd(v, self.d0.values[i])
            vals[i] = {g for m in v for g in m}
        stage: Dict[int, int] = {}
        active = set()

        def visit(i):
            if i in stage:
                return stage[i]
            if i in active:
                raise ValueError
            active.add(i)
            stage[i] = 1 + max((visit(g) for g in vals[i]), default=-1)
            active.discard(i)
            return stage[i]

        try:
            for i in vals:
                visit(i)
        except ValueError:
            return None
        return stage

    def matches_cone(self) -> bool:
        """φ(d1 + d0) = (d1 + δ)φ on generators, φ: ΛW -> ΛW¹ ⊕ Q·a."""
        A = self.algebra

        def phi(p: Poly) -> Poly:
            out = {}
            for m, c in p.items():
                if all(A.deg[g] == 1 for g in m) or m == (self.a,):
                    out[m] = c
            return out

        for i in range(len(A)):
            lhs = dict(self.model.d.values[i])
            vec_iadd(lhs, self.d0.values[i])
            lhs = phi(lhs)
            rhs: Poly = {}
            if A.deg[i] == 1 or i == self.a:
                gen = {(i,): Fraction(1)}
                rhs = phi(self.model.d(gen))
                e = self.trace(gen) if A.deg[i] == 1 else 0
                if e:
                    vec_iadd(rhs, {(self.a,): Fraction(1)}, e)
            if lhs != rhs:
                return False
        return True

    def first_nonzero_weight(self) -> Optional[int]:
        ws = [self.algebra.wt[i] for i in self.degree_one() if self.gr.values[i]]
        return min(ws) if ws else None

    def linear_cohomology(self, graded: bool = True) -> Dict[Tuple[int, int], int]:
        """dims of H(W, d0) per (degree, weight); d0 is linear on generators."""
        d = self.gr if graded else self.d0
        A = self.algebra
        L = self.scenario.caps.max_length
        top = max(A.deg) if len(A) else 0
        out = {}
        weights = range(1, L + 1) if graded else [None]
        for w in weights:
            for k in range(1, top + 1):
                cur = self.generators(k, w)
                prev = self.generators(k - 1, w)
                z = len(kernel([_linear(d.values[i]) for i in cur]))
                b = _rank(_linear(d.values[i]) for i in prev)
                if z - b:
                    out[(k, w if w is not None else 0)] = z - b
        return out

    def kernel_on_degree_one(self, weight: int) -> List[Dict[int, Fraction]]:
        idx = self.generators(1, weight)
        return [{idx[t]: c for t, c in kv.items()} for kv in kernel([_linear(self.gr.values[i]) for i in idx])]

    def to_dict(self):
        A = self.algebra
        return {
            "lead_length": self.lead_length,
            "d0": {A.generators[i].name: A.format(v) for i, v in sorted(self.d0.values.items()) if v},
            "flags": list(self.flags),
        }


def _linear(p: Poly) -> Dict[int, Fraction]:
    return {m[0]: c for m, c in p.items() if len(m) == 1}


def build_d0(scenario: OneRelatorScenario, caps: Optional[Caps] = None) -> D0Datum:
    """Construct d0 generator by generator in index (hence weight) order.

    On a generator w, d1 d0 w must equal -d0 d1 w; the right side is a
    d1-cycle in wedge length two and so is d1 of a unique combination u of
    non-closed generators.  Degree-1 generators additionally pick up ε(w)a.
    """
    caps = caps or scenario.caps
    r, L = scenario.r, caps.max_length
    alpha = magnus_log(scenario.word, r, L)
    n = alpha.leading_length
    classes = [(f"z{i + 1}", 1, 1) for i in range(r)] + [("a", 2, n or 1)]
    W = quadratic_model(classes, caps, prefix="w")
    A = W.algebra
    a = A.index["a"]
    trace = attach_trace(W, 1, scenario.word, caps)
    flags = list(alpha.flags)
    vals: Dict[int, Poly] = {i: {} for i in range(len(A))}
    d0 = Derivation(A, vals)
    solvers: Dict[int, Tuple[Echelon, List[int]]] = {}

    def solver(k):
        if k not in solvers:
            idx = [i for i in range(len(A)) if A.deg[i] == k and W.d.values[i]]
            ech = Echelon(track=True)
            for i in idx:
                ech.add(W.d.values[i])
            solvers[k] = (ech, idx)
        return solvers[k]

    for i in range(len(A)):
        if i == a:
            continue
        out: Poly = {}
        if A.deg[i] == 1:
            e = trace({(i,): Fraction(1)})
            if e:
                out[(a,)] = e
        target = d0(W.d.values[i])
        if target:
            ech, idx = solver(A.deg[i] + 1)
            sol = ech.solve(target)
            if sol is None:
                raise CapOverflowError(f"no lift for d0 on {A.generators[i].name}")
            for t, c in sol.items():
                vec_iadd(out, {(idx[t],): Fraction(1)}, -c)
        vals[i] = out
    gr_vals = {i: {m: c for m, c in v.items() if A.mono_weight(m) == A.wt[i]} for i, v in vals.items()}
    return D0Datum(scenario, W, a, trace, d0, Derivation(A, gr_vals), n, flags)


# ---------------------------------------------------------------------------
# asphericity


@dataclass
class AsphericalReport:
    aspherical: Optional[bool]
    caps: Caps
    higher: Dict[Tuple[int, int], int] = field(default_factory=dict)
    v_dims: List[int] = field(default_factory=list)
    h0_dims: List[int] = field(default_factory=list)
    model: Optional[SullivanAlgebra] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        out = {
            "aspherical": self.aspherical,
            "caps": self.caps.as_dict(),
            "checks": dict(sorted(self.checks.items())),
            "notes": list(self.notes),
        }
        if self.v_dims:
            out["V_dims"] = list(self.v_dims)
        if self.h0_dims:
            out["H0_dims"] = list(self.h0_dims)
        if self.higher:
            out["higher_nonzero"] = {f"{k},{w}": v for (k, w), v in sorted(self.higher.items())}
        return out


def corollary_model(datum: D0Datum) -> Tuple[SullivanAlgebra, bool, List[Dict[int, Fraction]]]:
    """(ΛV, d1) for V = W¹ ∩ ker d0 (leading part), and whether d1(V) ⊂ Λ²V."""
    A = datum.algebra
    L = datum.scenario.caps.max_length
    basis: List[Dict[int, Fraction]] = []
    weights: List[int] = []
    for w in range(1, L + 1):
        for v in datum.kernel_on_degree_one(w):
            basis.append(v)
            weights.append(w)
    V = GradedAlgebra([Generator(f"v{w}_{j}", 1, w) for j, w in enumerate(weights)])
    # products of pairs of basis vectors, tracked to read d1 in V coordinates
    pairs, ech = [], Echelon(track=True)
    for s in range(len(basis)):
        for t in range(s + 1, len(basis)):
            if weights[s] + weights[t] > L:
                continue
            ps = {(i,): c for i, c in basis[s].items()}
            pt = {(i,): c for i, c in basis[t].items()}
            ech.add(A.mul(ps, pt))
            pairs.append((s, t))
    closed = True
    dvals: Dict[int, Poly] = {}
    for s, v in enumerate(basis):
        img = datum.model.d({(i,): c for i, c in v.items()})
        sol = ech.solve(img) if img else {}
        if sol is None:
            closed = False
            dvals[s] = {}
            continue
        dvals[s] = {pairs[j]: c for j, c in sol.items()}
    return SullivanAlgebra(V, dvals, datum.scenario.caps), closed, basis


def aspherical_check(source: Union[OneRelatorScenario, SullivanAlgebra, CdgaPresentation],
                     caps: Optional[Caps] = None, datum: Optional[D0Datum] = None,
                     homology: Optional[LieHomology] = None) -> AsphericalReport:
    """Decide whether the rational model has generators only in degree 1."""
    if not isinstance(source, OneRelatorScenario):
        caps = caps or Caps()
        M = source if isinstance(source, SullivanAlgebra) else minimal_model(source, caps)[0]
        higher = {}
        for g in M.generators:
            if g.degree >= 2 and g.degree <= caps.max_degree:
                key = (g.degree, g.weight)
                higher[key] = higher.get(key, 0) + 1
        return AsphericalReport(not higher, caps, higher, model=M)
    scn = source
    caps = caps or scn.caps
    datum = datum or build_d0(scn, caps)
    rep = AsphericalReport(None, caps)
    rep.checks["d0_square_zero"] = datum.square_zero() and datum.square_zero(graded=True)
    rep.checks["d0_anticommutes_with_d1"] = datum.anticommutes() and datum.anticommutes(graded=True)
    rep.checks["cone_comparison"] = datum.matches_cone()
    rep.checks["total_is_sullivan"] = datum.total_stages() is not None
    lin = datum.linear_cohomology()
    rep.higher = {k: v for k, v in lin.items() if k[0] >= 2}
    rep.v_dims = [lin.get((1, w), 0) for w in range(1, caps.max_length + 1)]
    full = datum.linear_cohomology(graded=False)
    rep.checks["full_matches_leading"] = all(
        full.get((k, 0), 0) == sum(v for (kk, _), v in lin.items() if kk == k) for k in {kk for kk, _ in lin} | {kk for kk, _ in full}
    )
    model, closed, _ = corollary_model(datum)
    rep.model = model
    rep.checks["corollary_model_closed"] = closed
    if closed:
        rep.checks["corollary_model_square_zero"] = all(not model.d(v) for v in model.d.values.values())
    D = build_dg_lie(scn)
    hom = homology or dg_lie_homology(D, caps)
    rep.h0_dims = hom.h0()
    rep.checks["v_dims_match_h0"] = rep.v_dims == rep.h0_dims
    rep.checks["duality"] = all(
        lin.get((q + 1, w), 0) == hom.dims.get((q, w), 0)
        for q in range(0, caps.max_length + 1) for w in range(1, caps.max_length + 1)
    )
    if datum.lead_length is not None:
        rep.checks["leading_length_consistent"] = datum.first_nonzero_weight() == datum.lead_length
    rep.notes += datum.flags
    rep.aspherical = not rep.higher
    return rep


# ---------------------------------------------------------------------------
# inertness and the fiber


def _fiber_algebra(datum: D0Datum, basis: List[Dict[int, Fraction]]) -> SullivanAlgebra:
    """(ΛZ, d̄) with Z = W¹ / V, V spanned by ``basis``."""
    A = datum.algebra
    ech = Echelon()
    for v in basis:
        ech.add(v)
    ones = datum.degree_one()
    z_idx = [i for i in ones if i not in ech.rows]
    Z = GradedAlgebra([A.generators[i] for i in z_idx])
    pos = {i: t for t, i in enumerate(z_idx)}
    proj = {i: {pos[k]: c for k, c in ech.normal_form({i: Fraction(1)}).items()} for i in ones}

    def q_poly(p: Poly) -> Poly:
        out: Poly = {}
        for m, c in p.items():
            acc: Poly = {ONE: c}
            for g in m:
                acc = Z.mul(acc, {(k,): x for k, x in proj[g].items()})
                if not acc:
                    break
            vec_iadd(out, acc)
        return out

    dbar = {t: q_poly(datum.model.d.values[i]) for t, i in enumerate(z_idx)}
    return SullivanAlgebra(Z, dbar, datum.scenario.caps)


def _reindexed(A: GradedAlgebra, B: GradedAlgebra, new: Dict[int, int], p: Poly) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        acc: Poly = {ONE: c}
        for g in m:
            acc = B.mul(acc, {(new[g],): Fraction(1)})
        vec_iadd(out, acc)
    return out


def graded_cone(datum: D0Datum) -> Tuple[SullivanAlgebra, SullivanAlgebra, Dict[int, Poly]]:
    """(ΛW, d1 + gr d0), the model (ΛW¹, d1) of the wedge and the restriction between them.

    Generators are reordered by weight and then by decreasing degree, which
    makes d1 + gr d0 triangular.
    """
    A, caps = datum.algebra, datum.scenario.caps
    order = sorted(range(len(A)), key=lambda i: (A.wt[i], -A.deg[i], i))
    new = {old: t for t, old in enumerate(order)}
    B = GradedAlgebra([A.generators[i] for i in order])
    dvals = {}
    for i in range(len(A)):
        v = dict(datum.model.d.values[i])
        vec_iadd(v, datum.gr.values[i])
        dvals[new[i]] = _reindexed(A, B, new, v)
    cone = SullivanAlgebra(B, dvals, caps)
    ones = datum.degree_one()
    low = {old: t for t, old in enumerate(ones)}
    W1 = GradedAlgebra([A.generators[i] for i in ones])
    base = SullivanAlgebra(W1, {low[i]: _reindexed(A, W1, low, datum.model.d.values[i]) for i in ones}, caps)
    restriction = {new[i]: ({(low[i],): Fraction(1)} if i in low else {}) for i in range(len(A))}
    return cone, base, restriction


def circle_inertness_scenario(scn: OneRelatorScenario) -> InertnessVerdict:
    """Inertness of a word on a wedge of circles, with both criteria.

    Criterion (i): the cone has a model with generators in degree 1 only,
    i.e. H^{≥2}(W, d0) vanishes per weight.  Criterion (ii): the fiber
    (ΛZ, d̄) over ΛV is wedge-like, i.e. H^{≥2} vanishes per weight and ΛZ has
    the generator counts of the quadratic model of its H¹.
    """
    caps = scn.caps
    L = caps.max_length
    datum = build_d0(scn, caps)
    D = build_dg_lie(scn)
    hom = dg_lie_homology(D, caps)
    asph = aspherical_check(scn, caps, datum, hom)
    v = InertnessVerdict(UNDECIDED, 1, caps, "one-relator", trace=datum.trace)
    v.checks.update(asph.checks)
    v.checks["dg_lie_square_zero"] = D.square_zero() and D.square_zero(leading=False)
    v.checks["cone_square_zero"] = datum.square_zero() and datum.anticommutes()
    v.checks["cone_quotient_is_base"] = datum.matches_cone()
    v.criterion_i = asph.aspherical
    _, _, basis = corollary_model(datum)
    ones = datum.degree_one()
    full_kernel = kernel([_linear(datum.d0.values[i]) for i in ones])
    v.checks["epsilon_lambda_zero"] = all(
        datum.trace({(ones[t],): c for t, c in kv.items()}) == 0 for kv in full_kernel
    )
    F = _fiber_algebra(datum, basis)
    v.fiber = F
    v.cone_model = asph.model
    # criterion (ii) on the relative fiber of ΛW¹ over the cone, independent of V
    cone, base, restriction = graded_cone(datum)
    rel = relative_model(base, caps, base=cone, base_map=restriction, prefix="f")
    R = quotient_by_base(rel.algebra, rel.n_base, caps)
    v.relative_fiber = R
    v.fiber_top = caps.max_degree - 2
    wl = wedge_like_check(R, v.fiber_top, caps)
    v.wedge_like = wl
    higher = {k: d for k, d in wl.h_dims.items() if k[0] >= 2}
    v.criterion_ii = bool(wl.holds) and not higher
    if v.criterion_i:
        split_h = {k: r.dim for k, r in fiber_cohomology(F, v.fiber_top, caps).items()}
        v.checks["split_fiber_matches_relative_fiber"] = split_h == wl.h_dims
    v.checks["criteria_agree"] = v.criterion_i == v.criterion_ii
    v.status = INERT if v.criterion_i else NOT_INERT
    v.notes += asph.notes
    v.extra.update(
        lead_length=datum.lead_length,
        V_dims=asph.v_dims,
        H0_dims=asph.h0_dims,
        dg_lie_higher_vanishes=hom.higher_vanishes,
        word=scn.word.text or scn.word.format(),
        r=scn.r,
    )
    v.extra["_scenario"] = scn
    v.extra["_datum"] = datum
    v.extra["_homology"] = hom
    return v


def circle_inertness(W: SullivanAlgebra, class_spec, caps: Caps) -> InertnessVerdict:
    """Entry point for a circle-wedge model W and a group word."""
    if any(g.degree != 1 for g in W.generators if g.degree <= caps.max_degree):
        raise UnsupportedSpaceError("only wedges of circles are supported for n = 1")
    r = sum(1 for i, g in enumerate(W.generators) if g.weight == 1 and not W.d.values[i])
    word = class_spec if isinstance(class_spec, GroupWord) else parse_group_word(str(class_spec), r)
    return circle_inertness_scenario(OneRelatorScenario(r, word, caps))


def circle_fiber_table(verdict: InertnessVerdict, caps: Optional[Caps] = None) -> FiberTable:
    """H¹(ΛZ) per weight w against the weight w - n part of ΛU, U = V desuspended.

    ΛU is a polynomial algebra on degree-0 letters, one per basis vector of V.
    """
    caps = caps or verdict.caps
    L = caps.max_length
    n = verdict.extra["lead_length"] or 1
    vdims = verdict.extra["V_dims"]
    sym = [1] + [0] * L
    for w, cnt in enumerate(vdims, start=1):
        for _ in range(cnt):
            for t in range(w, L + 1):
                sym[t] += sym[t - w]
    coh = fiber_cohomology(verdict.relative_fiber, verdict.fiber_top, caps)
    rows = []
    for w in range(1, L + 1):
        h = coh[(1, w)].dim if (1, w) in coh else 0
        rows.append(FiberRow((1, w), h, sym[w - n] if w >= n else 0))
    vanish = not any(k[0] >= 2 for k in coh)
    return FiberTable(rows, vanish, caps)
