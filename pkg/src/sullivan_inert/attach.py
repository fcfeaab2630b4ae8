"""Cell attachments: traces, cones, inertness, fibers and duality models."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .gca import ONE, Caps, Derivation, Generator, GradedAlgebra, Poly, cohomology
from .lie import (
    FreeLieAlgebra,
    GroupWord,
    LieElement,
    circle_lie_algebra,
    magnus_log,
    parse_group_word,
    parse_lie_expression,
    tree_functional,
)
from .linalg import Echelon, kernel, vec_iadd
from .sullivan import (
    CdgaMorphism,
    CdgaPresentation,
    FailureWitness,
    HypothesisError,
    SullivanAlgebra,
    acyclic_closure,
    extension_split,
    minimal_model,
    quadratic_model,
    quadratic_part,
    quotient_by_base,
    relative_model,
)

INERT = "inert-up-to-caps"
NOT_INERT = "not-inert"
UNDECIDED = "undecided"


class UnsupportedSpaceError(ValueError):
    pass


class DegreeMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# traces and cones


@dataclass
class AttachTrace:
    """ε: a functional on the degree-n generators, zero on Λ^{≥2} and 1."""

    algebra: SullivanAlgebra
    n: int
    values: Dict[int, Fraction]
    source: str = ""
    lie_class: Optional[LieElement] = None

    def __call__(self, p: Poly) -> Fraction:
        return sum((c * self.values.get(m[0], 0) for m, c in p.items() if len(m) == 1), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def kills_boundaries(self) -> bool:
        """ε ∘ d = 0 on every generator of degree n - 1."""
        A = self.algebra.algebra
        return all(self(self.algebra.d.values[i]) == 0 for i, g in enumerate(A.generators) if g.degree == self.n - 1)

    def to_dict(self):
        A = self.algebra.algebra
        return {A.generators[i].name: str(c) for i, c in sorted(self.values.items()) if c}


def _letter_functionals(W: SullivanAlgebra, lie_degree: Optional[int] = None):
    """Dual functionals of the closed weight-1 generators (the sphere classes)."""
    out = []
    for i, g in enumerate(W.generators):
        if g.weight == 1 and not W.d.values[i] and (lie_degree is None or g.degree - 1 == lie_degree):
            out.append((g.name, {i: Fraction(1)}))
    return out


def attach_trace(W: SullivanAlgebra, n: int, class_spec, caps: Optional[Caps] = None) -> AttachTrace:
    """ε from a functional ``{generator: coeff}``, a Lie word or a group word.

    Lie words use the letters ``i1, i2, ...`` for the sphere classes in
    generator order (generator names are accepted too).  Group words need a
    circle model and ``n = 1``.
    """
    A = W.algebra
    if isinstance(class_spec, dict):
        vals = {}
        for name, c in class_spec.items():
            i = A.index[name]
            if A.deg[i] != n:
                raise DegreeMismatchError(f"{name} has degree {A.deg[i]}, not {n}")
            if Fraction(c):
                vals[i] = Fraction(c)
        return AttachTrace(W, n, vals, "functional")
    if isinstance(class_spec, GroupWord) or (isinstance(class_spec, str) and _looks_like_group_word(W, class_spec, n)):
        letters = _letter_functionals(W, 0)
        if n != 1 or not letters:
            raise DegreeMismatchError("group words need a circle model and n = 1")
        L = caps.max_length if caps else W.caps.max_length
        word = class_spec if isinstance(class_spec, GroupWord) else parse_group_word(class_spec, len(letters))
        alpha = magnus_log(word, len(letters), L)
        return _trace_from_lie(W, n, alpha, [f for _, f in letters], "group-word " + word.format())
    if isinstance(class_spec, LieElement):
        letters = _letter_functionals(W)
        return _trace_from_lie(W, n, class_spec, [f for _, f in letters], "lie-element")
    if isinstance(class_spec, str):
        letters = _letter_functionals(W)
        names = [f"i{k + 1}" for k in range(len(letters))]
        alias = {nm: f"i{k + 1}" for k, (nm, _) in enumerate(letters)}
        text = class_spec
        for nm, al in sorted(alias.items(), key=lambda kv: -len(kv[0])):
            if nm not in names:
                text = text.replace(nm, al)
        if text.strip() in ("0", ""):
            return AttachTrace(W, n, {}, "zero")
        terms = parse_lie_expression(text, names)
        Q = quadratic_part(W)
        funcs = [f for _, f in letters]
        vals: Dict[int, Fraction] = {}
        for c, tree in terms:
            lie_deg = sum(A.deg[next(iter(funcs[i]))] - 1 for i in _leaves(tree))
            if lie_deg != n - 1:
                raise DegreeMismatchError(f"Lie word of degree {lie_deg} cannot define a class in π_{n}")
            vec_iadd(vals, tree_functional(Q, tree, funcs), c)
        return AttachTrace(W, n, vals, f"lie-word {class_spec}")
    raise TypeError(f"unsupported class specification {class_spec!r}")


def _leaves(t):
    return [t] if isinstance(t, int) else _leaves(t[0]) + _leaves(t[1])


def _looks_like_group_word(W, text, n):
    return n == 1 and any(g.degree == 1 for g in W.generators) and "i" not in text


def _trace_from_lie(W, n, alpha: LieElement, letter_funcs, source):
    Q = quadratic_part(W)
    vals: Dict[int, Fraction] = {}
    for key, c in alpha.items():
        tree = alpha.basis_element(key).tree
        vec_iadd(vals, tree_functional(Q, tree, letter_funcs), c)
    vals = {i: c for i, c in vals.items() if W.algebra.deg[i] == n}
    return AttachTrace(W, n, vals, source, alpha)


class ConeCdga:
    """ΛW ⊕ Q·a with a² = a·Λ⁺W = 0 and DΦ = dΦ + ε(Φ)a."""

    def __init__(self, trace: AttachTrace, a_weight: int = 1):
        self.base = trace.algebra
        self.trace = trace
        self.n = trace.n
        gens = list(self.base.generators)
        self.algebra = GradedAlgebra(gens)
        name = "a"
        while name in self.algebra.index:
            name += "'"
        self.a = self.algebra.add_generator(Generator(name, trace.n + 1, a_weight))
        self.weighted = False

    def _truncate(self, p: Poly) -> Poly:
        a = self.a
        return {m: c for m, c in p.items() if a not in m or len(m) == 1}

    def keys(self, degree, weight=None):
        out = self.base.keys(degree, weight)
        if degree == self.n + 1:
            out = out + [(self.a,)]
        return out

    def unit(self):
        return {ONE: Fraction(1)}

    def mul(self, x, y):
        return self._truncate(self.algebra.mul(x, y))

    def d(self, x):
        out: Poly = {}
        base_part = {m: c for m, c in x.items() if self.a not in m}
        vec_iadd(out, self.base.d(base_part))
        e = self.trace(base_part)
        if e:
            vec_iadd(out, {(self.a,): Fraction(1)}, e)
        return out

    def square_zero(self, degrees) -> bool:
        for k in degrees:
            for m in self.keys(k):
                if self.d(self.d({m: Fraction(1)})):
                    return False
        return True

    def quotient_matches_base(self, degrees) -> bool:
        """(cone)/(a) equals (ΛW, d) on every basis monomial in the degrees."""
        for k in degrees:
            for m in self.base.keys(k):
                img = {mm: c for mm, c in self.d({m: Fraction(1)}).items() if self.a not in mm}
                if img != self.base.d({m: Fraction(1)}):
                    return False
        return True

    def cohomology_dims(self, degrees) -> List[int]:
        out = []
        for k in degrees:
            cur = self.keys(k)
            imgs = [self.d({m: Fraction(1)}) for m in cur]
            z = len(kernel(imgs))
            b = Echelon()
            for m in self.keys(k - 1):
                b.add(self.d({m: Fraction(1)}))
            out.append(z - b.rank)
        return out


def cone_cdga(W: SullivanAlgebra, trace: AttachTrace) -> ConeCdga:
    return ConeCdga(trace)


# ---------------------------------------------------------------------------
# wedge-like check (criterion (ii))


@dataclass
class WedgeLikeReport:
    holds: Optional[bool]
    h_dims: Dict[object, int]
    linear_rank: Dict[object, int]
    generator_dims: Dict[object, int]
    quadratic_model_dims: Dict[object, int]
    closed_generators: List[Poly] = field(default_factory=list)
    note: str = ""


def _fiber_keys(F: SullivanAlgebra, top: int, caps: Caps):
    if F.weighted:
        return [(k, w) for k in range(1, top + 1) for w in range(1, caps.max_length + 1)]
    return [(k, None) for k in range(1, top + 1)]


def fiber_cohomology(F: SullivanAlgebra, top: int, caps: Caps):
    """H^k(F) per degree (or per (degree, weight)) with representatives."""
    out = {}
    for k, w in _fiber_keys(F, top, caps):
        res = cohomology(F.d, k, None, w)
        if res.dim:
            out[k if w is None else (k, w)] = res
    return out


def wedge_like_check(F: SullivanAlgebra, top: int, caps: Caps) -> WedgeLikeReport:
    """H^{≥1}(ΛZ) = Z ∩ ker d̄ with d̄ quadratic after a change of generators.

    Certified as: every positive class has a nonzero linear part, and the
    generator counts of ΛZ agree with those of the quadratic model of Q ⊕ H⁺.
    """
    coh = fiber_cohomology(F, top, caps)
    lin_rank, h_dims, closed = {}, {}, []
    ok = True
    for key, res in coh.items():
        h_dims[key] = res.dim
        ech = Echelon()
        for rep in res.representatives:
            lin = {m: c for m, c in rep.items() if len(m) == 1}
            if ech.add(lin):
                closed.append(rep)
        lin_rank[key] = ech.rank
        ok = ok and ech.rank == res.dim
    classes = []
    for key, res in coh.items():
        k, w = (key if isinstance(key, tuple) else (key, 1))
        classes += [(f"h{k}_{w}_{j}", k, w) for j in range(res.dim)]
    if not F.weighted and any(c[1] == 1 for c in classes):
        return WedgeLikeReport(None, h_dims, lin_rank, {}, {}, closed, "degree-1 classes in an unweighted fiber")
    qcaps = Caps(top, caps.max_length if F.weighted else None)
    Q = quadratic_model(classes, qcaps, prefix="q")
    gen_dims: Dict[object, int] = {}
    q_dims: Dict[object, int] = {}
    for src, dst in ((F, gen_dims), (Q, q_dims)):
        for g in src.generators:
            if g.degree > top or (F.weighted and g.weight > caps.max_length):
                continue
            key = (g.degree, g.weight) if F.weighted else g.degree
            dst[key] = dst.get(key, 0) + 1
    ok = ok and gen_dims == q_dims
    return WedgeLikeReport(ok, h_dims, lin_rank, dict(sorted(gen_dims.items())), dict(sorted(q_dims.items())), closed)


# ---------------------------------------------------------------------------
# inertness


@dataclass
class FiberRow:
    key: object
    fiber_dim: int
    shifted_dim: int

    @property
    def match(self):
        return self.fiber_dim == self.shifted_dim


@dataclass
class FiberTable:
    rows: List[FiberRow]
    products_vanish: Optional[bool]
    caps: Caps

    @property
    def matches(self) -> bool:
        return all(r.match for r in self.rows)

    def mismatches(self):
        return [r.key for r in self.rows if not r.match]

    def to_dict(self):
        return {
            "rows": [{"degree": r.key, "fiber": r.fiber_dim, "shifted_LambdaU": r.shifted_dim, "match": r.match}
                     for r in self.rows],
            "products_vanish": self.products_vanish,
            "caps": self.caps.as_dict(),
        }


@dataclass
class InertnessVerdict:
    status: str
    n: int
    caps: Caps
    route: str
    criterion_i: Optional[bool] = None
    criterion_ii: Optional[bool] = None
    witness: Optional[FailureWitness] = None
    fiber: Optional[SullivanAlgebra] = None
    relative_fiber: Optional[SullivanAlgebra] = None
    fiber_top: int = 0
    cone_model: Optional[SullivanAlgebra] = None
    lam: Optional[CdgaMorphism] = None
    trace: Optional[AttachTrace] = None
    wedge_like: Optional[WedgeLikeReport] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def inert(self) -> bool:
        return self.status == INERT

    def to_dict(self):
        out = {
            "status": self.status,
            "n": self.n,
            "route": self.route,
            "caps": self.caps.as_dict(),
            "criterion_i": self.criterion_i,
            "criterion_ii": self.criterion_ii,
            "checks": dict(sorted(self.checks.items())),
            "notes": list(self.notes),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.trace is not None:
            out["trace"] = self.trace.to_dict()
        if self.fiber is not None:
            out["fiber_generators"] = _degree_table(self.fiber, self.fiber_top)
        if self.wedge_like is not None:
            out["fiber_cohomology"] = {str(k): v for k, v in self.wedge_like.h_dims.items()}
        for k, v in sorted(self.extra.items()):
            if isinstance(v, (int, str, bool, list, dict)) or v is None:
                out[k] = v
        return out


def _degree_table(F: SullivanAlgebra, top: int):
    out: Dict[str, int] = {}
    for g in F.generators:
        if g.degree <= top:
            key = f"{g.degree}" if not F.weighted else f"{g.degree},{g.weight}"
            out[key] = out.get(key, 0) + 1
    return dict(sorted(out.items(), key=lambda kv: tuple(int(x) for x in kv[0].split(","))))


def inertness_check(W: SullivanAlgebra, n: int, class_spec, caps: Caps = Caps(), word_rank: Optional[int] = None
                    ) -> InertnessVerdict:
    """Decide whether the class is rationally inert, within caps.

    Circle models (degree-1 generators) with ``n = 1`` go through the
    one-relator pipeline.  Everything else must be simply connected: the cone
    is modelled, λ is read off the comparison map, criterion (i) is the
    extension split and criterion (ii) is checked on the relative fiber.
    """
    if any(g.degree == 1 for g in W.generators):
        if n != 1:
            raise UnsupportedSpaceError("non-simply-connected X is supported only for n = 1 on circle wedges")
        from .onerel import circle_inertness

        return circle_inertness(W, class_spec, caps)
    trace = class_spec if isinstance(class_spec, AttachTrace) else attach_trace(W, n, class_spec, caps)
    if not trace.kills_boundaries():
        raise ValueError("ε does not vanish on boundaries")
    top = caps.max_degree - 1
    # H^k of the fiber involves base generators of degree k + 1
    ftop = caps.max_degree - 2
    cone = ConeCdga(trace)
    v = InertnessVerdict(UNDECIDED, n, caps, "cone", trace=trace)
    v.checks["cone_square_zero"] = cone.square_zero(range(caps.max_degree + 1))
    v.checks["cone_quotient_is_base"] = cone.quotient_matches_base(range(caps.max_degree + 1))
    if cone.cohomology_dims([1])[0]:
        raise UnsupportedSpaceError("the cone has H^1 != 0")
    rm = relative_model(cone, caps, prefix="c")
    V = rm.algebra
    v.cone_model = V
    a = cone.a
    lam_vals = {i: {m: c for m, c in rm.rho.values[i].items() if a not in m} for i in range(len(V))}
    lam = CdgaMorphism(V, W, lam_vals)
    v.lam = lam
    v.checks["lambda_chain_map"] = not lam.check_chain_map()
    v.checks["epsilon_lambda_zero"] = all(trace(lam_vals[i]) == 0 for i in range(len(V)))
    split = extension_split(lam, caps, max_degree=top)
    # criterion (ii) on the relative fiber of λ, independent of the split
    rel = relative_model(W, caps, base=V, base_map=lam_vals, prefix="z")
    F = quotient_by_base(rel.algebra, rel.n_base, caps)
    v.relative_fiber = F
    v.fiber_top = ftop
    wl = wedge_like_check(F, ftop, caps)
    v.wedge_like = wl
    v.criterion_ii = wl.holds
    if isinstance(split, FailureWitness):
        v.criterion_i = False
        v.witness = split
        v.fiber = F
    else:
        v.criterion_i = True
        v.fiber = split.fiber
        v.extra["split_fiber_h"] = {str(k): r.dim for k, r in fiber_cohomology(split.fiber, ftop, caps).items()}
        v.checks["split_fiber_matches_relative_fiber"] = (
            v.extra["split_fiber_h"] == {str(k): d for k, d in wl.h_dims.items()}
        )
    if v.criterion_ii is None:
        v.status = UNDECIDED
        v.notes.append(wl.note)
    elif v.criterion_ii and not v.criterion_i:
        # (i) failed decisively; (ii) can only fail on a class inside the fiber range
        v.checks["criteria_agree"] = None
        v.notes.append(f"no wedge-like violation through fiber degree {ftop}; "
                       f"a larger max_degree is needed to refute it")
        v.status = NOT_INERT
    else:
        v.checks["criteria_agree"] = v.criterion_i == v.criterion_ii
        v.status = INERT if v.criterion_i else NOT_INERT
    return v


# ---------------------------------------------------------------------------
# fiber table


def lambda_u_dims(model: SullivanAlgebra, caps: Caps, top: int, weighted: bool = False):
    """dims of ΛU per degree (or (degree, weight)), U the desuspension of V."""
    ext = acyclic_closure(model, caps)
    U = ext.fiber.algebra
    out = {}
    if weighted:
        for k in range(0, top + 1):
            for w in range(0, caps.max_length + 1):
                c = len(U.monomials(k, weight=w))
                if c:
                    out[(k, w)] = c
    else:
        for k in range(0, top + 1):
            out[k] = len(U.monomials(k))
    return out, ext


def fiber_dimension_table(verdict: InertnessVerdict, caps: Optional[Caps] = None) -> FiberTable:
    """H^k(ΛZ) against (Q·a ⊗ ΛU)^{k+1} = (ΛU)^{k-n}, plus product vanishing."""
    caps = caps or verdict.caps
    if verdict.route == "one-relator":
        from .onerel import circle_fiber_table

        return circle_fiber_table(verdict, caps)
    F = verdict.relative_fiber
    top = verdict.fiber_top
    lu, _ = lambda_u_dims(verdict.cone_model, caps, top)
    coh = fiber_cohomology(F, top, caps)
    rows = []
    for k in range(1, top + 1):
        h = coh[k].dim if k in coh else 0
        rows.append(FiberRow(k, h, lu.get(k - verdict.n, 0)))
    return FiberTable(rows, products_vanish(F, coh, top), caps)


def products_vanish(F: SullivanAlgebra, coh, top: int) -> bool:
    reps = [(k, r) for k, res in coh.items() for r in res.representatives]
    for i, (k1, r1) in enumerate(reps):
        for k2, r2 in reps[i:]:
            d1 = k1 if not isinstance(k1, tuple) else k1[0]
            d2 = k2 if not isinstance(k2, tuple) else k2[0]
            if d1 + d2 > top:
                continue
            p = F.algebra.mul(r1, r2)
            if not p:
                continue
            w = None
            if isinstance(k1, tuple):
                w = k1[1] + k2[1]
            res = cohomology(F.d, d1 + d2, None, w)
            b = Echelon()
            for x in res.boundaries_basis:
                b.add(x)
            if not b.contains(p):
                return False
    return True


# ---------------------------------------------------------------------------
# Poincaré duality models


class PdError(ValueError):
    pass


@dataclass
class QuotientModel:
    """A = ΛV/(S ⊕ ΛV^{>n+1}) as a finite cdga (weight-capped if needed)."""

    model: SullivanAlgebra
    top: int
    pivots: Dict[Optional[int], List]     # weight -> pivot monomials in degree top
    rref: Dict[Optional[int], Dict]       # pivot monomial -> cycle vector
    weighted: bool
    max_weight: Optional[int]

    def keys(self, degree, weight=None):
        if degree < 0 or degree > self.top:
            return []
        A = self.model.algebra
        if degree == self.top:
            if self.weighted:
                ws = [weight] if weight is not None else range(1, self.max_weight + 1)
                return [m for w in ws for m in self.pivots.get(w, [])]
            return list(self.pivots.get(None, []))
        if self.weighted:
            if weight is not None:
                return A.monomials(degree, weight=weight)
            return A.monomials(degree, max_weight=self.max_weight)
        return A.monomials(degree)

    def project(self, p: Poly) -> Poly:
        """Reduce an element of ΛV into A (pivot coordinates in the top degree)."""
        A = self.model.algebra
        out: Poly = {}
        for m, c in p.items():
            k = A.mono_degree(m)
            if k > self.top:
                continue
            if self.weighted and A.mono_weight(m) > self.max_weight:
                continue
            if k < self.top:
                vec_iadd(out, {m: c})
            else:
                w = A.mono_weight(m) if self.weighted else None
                if m in self.rref.get(w, {}):
                    vec_iadd(out, {m: c})
        return out

    def unit(self):
        return {ONE: Fraction(1)}

    def mul(self, x, y):
        return self.project(self.model.algebra.mul(x, y))

    def d(self, x):
        return self.project(self.model.d(x))


@dataclass
class PdModel:
    H: CdgaPresentation
    n: int
    model: SullivanAlgebra
    A: QuotientModel
    omega: Poly
    single_generator: bool
    x: Optional[int] = None
    w: Optional[Poly] = None

    @property
    def top(self):
        return self.n + 1


def _pd_check(H: CdgaPresentation):
    top = H.top_degree
    tops = H.keys(top)
    if len(tops) != 1:
        raise PdError("top degree is not one-dimensional")
    t = tops[0]
    for k in range(0, top + 1):
        left, right = H.keys(k), H.keys(top - k)
        if len(left) != len(right):
            raise PdError(f"dimensions in degrees {k} and {top - k} differ")
        rows = [{j: H.basis_product(i, r).get(t, 0) for j, r in enumerate(right)} for i in left]
        rows = [{j: c for j, c in row.items() if c} for row in rows]
        ech = Echelon()
        for row in rows:
            ech.add(row)
        if ech.rank != len(left):
            raise PdError(f"pairing degenerate in degree {k}")
    return top


def pd_complex_model(H: CdgaPresentation, caps: Caps = Caps()) -> PdModel:
    """The model A of Y minus its top cell, for a formal PD algebra H."""
    top = _pd_check(H)
    n = top - 1
    weighted = H.weighted
    mcaps = Caps(max(caps.max_degree, top + 1), caps.max_length if weighted else None)
    M, rho = minimal_model(H, mcaps)
    Aalg = M.algebra
    pivots: Dict[Optional[int], List] = {}
    rref: Dict[Optional[int], Dict] = {}
    weights = range(1, caps.max_length + 1) if weighted else [None]
    omega: Poly = {}
    top_class = H.keys(top)[0]
    for w in weights:
        mons = Aalg.monomials(top, weight=w) if weighted else Aalg.monomials(top)
        if not mons:
            continue
        imgs = [M.d.apply_mono(m) for m in mons]
        cyc = [{mons[t]: c for t, c in kv.items()} for kv in kernel(imgs)]
        basis = _rref(cyc)
        pivots[w] = sorted(basis)
        rref[w] = basis
    A = QuotientModel(M, top, pivots, rref, weighted, caps.max_length if weighted else None)
    # ω: a top cycle mapping to the fundamental class
    for w, basis in rref.items():
        for piv, vec in basis.items():
            if rho(vec).get(top_class):
                omega = {piv: Fraction(1)}
                break
        if omega:
            break
    if not omega:
        raise PdError("no cycle represents the fundamental class")
    x, w = _dual_pair(M, rho, H, top_class, n)
    if x is not None:
        omega = A.project(Aalg.mul(w, {(x,): Fraction(1)}))
    single = len([i for i in range(1, len(H)) if H.degrees[i] > 0 and _is_indecomposable(H, i)]) == 1
    return PdModel(H, n, M, A, omega, single, x, w)


def _dual_pair(M: SullivanAlgebra, rho, H: CdgaPresentation, top_class: int, n: int):
    """A closed degree-1 generator x and an n-cycle w with [w x] the fundamental class."""
    Aalg = M.algebra
    closed = [i for i, g in enumerate(Aalg.generators) if g.degree == 1 and not M.d.values[i]]
    for x in closed:
        if H.weighted:
            wt = H.weights[top_class] - Aalg.wt[x]
            mons = Aalg.monomials(n, weight=wt) if wt >= 0 else []
        else:
            mons = Aalg.monomials(n)
        imgs = [M.d.apply_mono(m) for m in mons]
        for kv in kernel(imgs):
            cyc = {mons[t]: c for t, c in kv.items()}
            val = rho(Aalg.mul(cyc, {(x,): Fraction(1)})).get(top_class, 0)
            if val:
                return x, {m: c / val for m, c in cyc.items()}
    return None, None


def _is_indecomposable(H: CdgaPresentation, i: int) -> bool:
    target = {i: Fraction(1)}
    prods = Echelon()
    for a in range(1, len(H)):
        for b in range(1, len(H)):
            p = H.basis_product(a, b)
            if p and all(H.degrees[k] == H.degrees[i] for k in p):
                prods.add(p)
    return not prods.contains(target)


def _rref(vectors: List[Dict]) -> Dict:
    """Reduced row echelon form keyed by pivot (smallest key)."""
    rows: Dict = {}
    for v in vectors:
        v = dict(v)
        for p, r in rows.items():
            if p in v:
                vec_iadd(v, r, -v[p])
        if not v:
            continue
        p = min(v)
        v = {k: c / v[p] for k, c in v.items()}
        for q in list(rows):
            if p in rows[q]:
                vec_iadd(rows[q], v, -rows[q][p])
        rows[p] = v
    return rows


# ---------------------------------------------------------------------------
# products of primitives on duality algebras


@dataclass
class PrimitiveProductResult:
    holds: bool
    checked: Dict[object, int]
    sample_primitives: List[Tuple[str, str]]
    cycles_products_vanish: Optional[bool]
    cycles_built: int = 0
    note: str = ""

    def to_dict(self):
        return {
            "holds": self.holds,
            "checked": {str(k): v for k, v in self.checked.items()},
            "sample_primitives": [list(p) for p in self.sample_primitives],
            "cycles_built": self.cycles_built,
            "cycles_products_vanish": self.cycles_products_vanish,
            "note": self.note,
        }


class _FiberOfTopCell:
    """(A ⊕ Q·t) ⊗ ΛU, with ΛV ⊗ ΛU the acyclic closure of the model of H.

    Elements are polynomials in the closure's generators plus ``t``; the
    V-part of every term is reduced into A, and ``t`` kills A⁺ and itself.
    """

    def __init__(self, pd: PdModel, caps: Caps):
        self.pd = pd
        self.caps = caps
        L = caps.max_length if pd.A.weighted else None
        self.ext = acyclic_closure(pd.model, Caps(max(caps.max_degree, pd.top + 1), L))
        T = self.ext.total
        self.nv = self.ext.n_base
        self.alg = GradedAlgebra(T.generators)
        wt_t = self.alg.mono_weight(next(iter(pd.omega))) if pd.A.weighted else 1
        self.t = self.alg.add_generator(Generator("t", pd.n, wt_t))
        vals = {i: T.d.values[i] for i in range(len(T))}
        vals[self.t] = dict(pd.omega)
        self.D = Derivation(self.alg, vals)

    def parts(self, m):
        v = tuple(g for g in m if g < self.nv)
        u = tuple(g for g in m if self.nv <= g < self.t)
        return v, u, m.count(self.t)

    def reduce(self, p: Poly) -> Poly:
        out: Poly = {}
        A = self.pd.A
        for m, c in p.items():
            v, u, nt = self.parts(m)
            if nt > 1 or (nt == 1 and v):
                continue
            if nt == 1:
                vec_iadd(out, {m: c})
                continue
            for vm, vc in A.project({v: Fraction(1)}).items():
                vec_iadd(out, {tuple(sorted(vm + u)): Fraction(1)}, c * vc)
        return out

    def d(self, p: Poly) -> Poly:
        return self.reduce(self.D(p))

    def mul(self, x: Poly, y: Poly) -> Poly:
        return self.reduce(self.alg.mul(x, y))

    def basis(self, k, w, v_degree=None, with_t=True):
        out = []
        B = self.alg
        A = self.pd.A
        mons = B.monomials(k, weight=w) if w is not None else B.monomials(k)
        for m in mons:
            v, u, nt = self.parts(m)
            if nt:
                if with_t and nt == 1 and not v and v_degree is None:
                    out.append(m)
                continue
            j = B.mono_degree(v)
            if j > self.pd.top or (v_degree is not None and j != v_degree):
                continue
            if j == self.pd.top:
                wv = B.mono_weight(v) if A.weighted else None
                if v not in A.rref.get(wv, {}):
                    continue
            out.append(m)
        return out

    def is_boundary(self, p: Poly, k, w) -> bool:
        ech = Echelon()
        for m in self.basis(k - 1, w):
            ech.add(self.d({m: Fraction(1)}))
        return ech.contains(p)


def lemma2_check(pd: PdModel, caps: Caps = Caps(), max_cycles: int = 12) -> PrimitiveProductResult:
    """A^{n+1} ⊗ ΛU ⊂ d(A^n ⊗ ΛU) within caps, plus the fiber cycles.

    For each Φ in ΛU the cycle ``(t - (-1)^n w x̄)Φ + Ψ`` is built and the
    pairwise products of these cycles are checked to be boundaries.
    """
    if pd.x is None:
        return PrimitiveProductResult(False, {}, [], None, 0,
                            "A^1 has no nonzero cycle: the V^1 = 0 branch is outside this check")
    F = _FiberOfTopCell(pd, caps)
    B = F.alg
    top, n = pd.top, pd.n
    weights = list(range(1, caps.max_length + 1)) if pd.A.weighted else [None]
    checked: Dict[object, int] = {}
    samples: List[Tuple[str, str]] = []
    solvers = {}
    holds = True
    for w in weights:
        for k in range(top, caps.max_degree + 1):
            tgt = F.basis(k, w, v_degree=top)
            if not tgt:
                continue
            src = F.basis(k - 1, w, v_degree=n)
            ech = Echelon(track=True)
            for m in src:
                ech.add(F.d({m: Fraction(1)}))
            solvers[(k, w)] = (ech, src)
            ok = 0
            for phi in tgt:
                sol = ech.solve({phi: Fraction(1)})
                if sol is None:
                    holds = False
                    continue
                ok += 1
                if len(samples) < 3:
                    psi: Poly = {}
                    for j, c in sol.items():
                        vec_iadd(psi, {src[j]: Fraction(1)}, c)
                    samples.append((B.name_of(phi), B.format(psi)))
            checked[k if w is None else (k, w)] = ok
    # fiber cycles (t - (-1)^n w x̄)Φ + Ψ
    xbar = B.index["u_" + pd.model.generators[pd.x].name]
    sign = -1 if n & 1 else 1
    t_elem = {(F.t,): Fraction(1)}
    corr = B.mul(dict(pd.w), {(xbar,): Fraction(1)})
    vec_iadd(t_elem, corr, -sign)
    wt_t = B.wt[F.t]
    phis = []
    for w in ([None] if weights == [None] else range(0, caps.max_length - wt_t + 1)):
        for j in range(0, caps.max_degree - n + 1):
            mons = B.monomials(j, weight=w) if w is not None else B.monomials(j)
            phis += [m for m in mons if all(F.nv <= g < F.t for g in m)]
    phis = sorted(set(phis), key=lambda m: (B.mono_weight(m), B.mono_degree(m), m))[:max_cycles]
    cycles = []
    for phi in phis:
        c0 = F.mul(t_elem, {phi: Fraction(1)})
        r = F.d(c0)
        k = B.mono_degree(phi) + n + 1
        w = B.mono_weight(phi) + wt_t if pd.A.weighted else None
        if r:
            if (k, w) not in solvers:
                holds = False
                continue
            ech, src = solvers[(k, w)]
            sol = ech.solve({m: -c for m, c in r.items()})
            if sol is None:
                holds = False
                continue
            for jj, c in sol.items():
                vec_iadd(c0, {src[jj]: Fraction(1)}, c)
        if F.d(c0):
            holds = False
            continue
        cycles.append((c0, k - 1, w))
    vanish = True
    for i, (c1, k1, w1) in enumerate(cycles):
        for c2, k2, w2 in cycles[i:]:
            k = k1 + k2
            w = None if w1 is None else w1 + w2
            if k > caps.max_degree or (w is not None and w > caps.max_length):
                continue
            p = F.mul(c1, c2)
            if p and not F.is_boundary(p, k, w):
                vanish = False
    return PrimitiveProductResult(holds, checked, samples, vanish, len(cycles))


# ---------------------------------------------------------------------------
# PD-path inertness


def pd_inertness(H: CdgaPresentation, caps: Caps = Caps()) -> InertnessVerdict:
    """Inertness of the top-cell attachment of a formal PD complex Y.

    Surfaces go through the one-relator pipeline, other complexes with a
    degree-1 dual pair through the primitive-product check, and simply connected ones
    through the cone route on the model of Y minus its top cell.
    """
    pd = pd_complex_model(H, caps)
    n = pd.n
    if n == 1:
        from .onerel import OneRelatorScenario, circle_inertness_scenario

        g = sum(1 for d in H.degrees if d == 1) // 2
        word = "".join(f"[{chr(97 + 2 * i)},{chr(98 + 2 * i)}]" for i in range(g))
        v = circle_inertness_scenario(OneRelatorScenario(2 * g, word, caps))
        v.route = "pd"
        v.extra["surface_word"] = word
        lem = lemma2_check(pd, caps)
        v.checks["primitive_products_vanish"] = lem.holds
        v.extra["primitive_products"] = lem.to_dict()
    elif pd.x is not None:
        lem = lemma2_check(pd, caps)
        v = InertnessVerdict(INERT if lem.holds else UNDECIDED, n, caps, "pd")
        v.checks["primitive_products_vanish"] = lem.holds
        v.extra["primitive_products"] = lem.to_dict()
    elif any(d == 1 for d in H.degrees):
        v = InertnessVerdict(UNDECIDED, n, caps, "pd")
        v.notes.append("A^1 has no nonzero cycle dual to an n-cycle; this branch is not covered")
    else:
        v = inertness_check(*_top_cell_attachment(H, pd, caps), caps)
        v.route = "pd-cone"
    if pd.single_generator:
        v.notes.append("H(Y) is generated by a single class: the at-least-two-generators hypothesis fails")
        v.extra["single_generator"] = True
    return v


def truncate_top(H: CdgaPresentation) -> CdgaPresentation:
    """H with the top class removed: the cohomology of Y minus its top cell."""
    top = H.top_degree
    keep = [i for i in range(len(H)) if H.degrees[i] < top]
    names = [H.names[i] for i in keep]
    prods = {}
    for i in keep[1:]:
        for j in keep[1:]:
            v = {H.names[k]: c for k, c in H.basis_product(i, j).items() if H.degrees[k] < top}
            if v:
                prods[(H.names[i], H.names[j])] = v
    weights = [H.weights[i] for i in keep] if H.weights is not None else None
    return CdgaPresentation(names, [H.degrees[i] for i in keep], prods, {}, weights)


def _top_cell_attachment(H: CdgaPresentation, pd: PdModel, caps: Caps):
    """(W, n, ε) for the top cell of a simply connected formal PD complex.

    W models H minus its top class.  Computing ρ(dv) with the products of H
    instead leaves a multiple c of the fundamental class, and ε(v) = -c makes
    the cone map onto H.
    """
    Hm = truncate_top(H)
    W, rho = minimal_model(Hm, Caps(caps.max_degree, None))
    n = pd.n
    top_class = H.keys(H.top_degree)[0]
    pos = {k: H.index[Hm.names[k]] for k in range(len(Hm))}

    def lift(i):
        return {pos[k]: c for k, c in rho.values[i].items()}

    vals = {}
    for i, g in enumerate(W.generators):
        if g.degree != n:
            continue
        total = Fraction(0)
        for m, c in W.d.values[i].items():
            acc = {0: Fraction(1)}
            for gen in m:
                acc = H.mul(acc, lift(gen))
            total += c * acc.get(top_class, 0)
        if total:
            vals[i] = -total
    return W, n, AttachTrace(W, n, vals, "top cell")


# ---------------------------------------------------------------------------
# wedge fibers


@dataclass
class WedgeFiberResult:
    fiber_dims: Dict[object, int]
    predicted: Dict[object, int]

    @property
    def matches(self):
        keys = set(self.fiber_dims) | set(self.predicted)
        return all(self.fiber_dims.get(k, 0) == self.predicted.get(k, 0) for k in keys)

    def to_dict(self):
        return {
            "fiber": {str(k): v for k, v in sorted(self.fiber_dims.items())},
            "predicted": {str(k): v for k, v in sorted(self.predicted.items())},
            "match": self.matches,
        }


def _tensor_models(MX: SullivanAlgebra, MY: SullivanAlgebra, caps: Caps):
    A = GradedAlgebra()
    for g in MX.generators:
        A.add_generator(Generator("X_" + g.name, g.degree, g.weight))
    for g in MY.generators:
        A.add_generator(Generator("Y_" + g.name, g.degree, g.weight))
    off = len(MX)
    vals = {}
    for i in range(len(MX)):
        vals[i] = dict(MX.d.values[i])
    for i in range(len(MY)):
        vals[off + i] = {tuple(g + off for g in m): c for m, c in MY.d.values[i].items()}
    return SullivanAlgebra(A, vals, caps), off


def wedge_fiber_check(X: CdgaPresentation, Y: CdgaPresentation, caps: Caps = Caps()) -> WedgeFiberResult:
    """Fiber of X ∨ Y → X × Y versus d₁(Λ⁺U_X) ⊗ Λ⁺U_Y, degree by degree."""
    weighted = X.weighted or Y.weighted
    mc = Caps(caps.max_degree, caps.max_length if weighted else None)
    MX, rx = minimal_model(X, mc) if len(X) > 1 else (SullivanAlgebra(GradedAlgebra(), {}, mc), None)
    MY, ry = minimal_model(Y, mc) if len(Y) > 1 else (SullivanAlgebra(GradedAlgebra(), {}, mc), None)
    P = _fiber_product(X, Y)
    base, off = _tensor_models(MX, MY, mc)
    bmap = {}
    nx = len(X)
    for i in range(len(MX)):
        bmap[i] = dict(rx.values[i])
    for i in range(len(MY)):
        bmap[off + i] = {(0 if k == 0 else nx - 1 + k): c for k, c in ry.values[i].items()}
    top = caps.max_degree - 2
    rel = relative_model(P, mc, base=base, base_map=bmap, prefix="r")
    F = quotient_by_base(rel.algebra, rel.n_base, mc)
    coh = fiber_cohomology(F, top, mc)
    fiber = {k: r.dim for k, r in coh.items()}
    ux, _ = lambda_u_dims(MX, mc, top, weighted) if len(MX) else ({}, None)
    uy, _ = lambda_u_dims(MY, mc, top, weighted) if len(MY) else ({}, None)
    pred: Dict[object, int] = {}
    for kx, cx in ux.items():
        for ky, cy in uy.items():
            if weighted:
                (dx, wx), (dy, wy) = kx, ky
                if wx == 0 or wy == 0:
                    continue
                key = (dx + 1 + dy, wx + wy)
                if key[0] > top or key[1] > caps.max_length:
                    continue
            else:
                dx, dy = kx, ky
                if dx == 0 or dy == 0:
                    continue
                key = dx + 1 + dy
                if key > top:
                    continue
            pred[key] = pred.get(key, 0) + cx * cy
    return WedgeFiberResult(fiber, {k: v for k, v in pred.items() if v})


def _fiber_product(X: CdgaPresentation, Y: CdgaPresentation) -> CdgaPresentation:
    def renamed(P, prefix):
        names = ["1"] + [prefix + nm for nm in P.names[1:]]
        prods = {}
        for (i, j), v in P._prod.items():
            if i and j:
                prods[(names[i], names[j])] = {names[k]: c for k, c in v.items()}
        weights = P.weights
        if weights is None and (X.weighted or Y.weighted):
            weights = [0] + [1] * (len(P) - 1)
        return CdgaPresentation(names, P.degrees, prods, {}, weights)

    return renamed(X, "X_").fiber_product(renamed(Y, "Y_"))


# ---------------------------------------------------------------------------
# convenience constructors


def wedge_of_spheres_model(dims: Sequence[int], caps: Caps = Caps()) -> SullivanAlgebra:
    """Quadratic model of a wedge of spheres; classes are named z1, z2, ..."""
    if any(d < 1 for d in dims):
        raise ValueError("sphere dimensions must be positive")
    classes = [(f"z{k + 1}", d) for k, d in enumerate(dims)]
    has_circle = any(d == 1 for d in dims)
    if has_circle and not all(d == 1 for d in dims):
        raise UnsupportedSpaceError("mixed circle and higher-sphere wedges are not supported")
    qc = caps if has_circle else Caps(caps.max_degree, None)
    return quadratic_model(classes, qc)
