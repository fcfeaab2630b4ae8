"""Sullivan algebras and their constructions.

Everything that builds a model goes through :func:`relative_model`: given a
Sullivan algebra ``base``, a cdga ``target`` and a morphism ``base -> target``
it adjoins generators degree by degree (or weight by weight, when the target
is weight-graded) until the extension maps quasi-isomorphically onto the
target within the caps.  An empty base gives the minimal model.

Targets only need ``weighted``, ``keys(degree, weight)``, ``d``, ``mul`` and
``unit``; :class:`CdgaPresentation`, :class:`SullivanAlgebra` and the cone in
:mod:`sullivan_inert.attach` all qualify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .gca import (
    ONE,
    Caps,
    CapMissingError,
    Derivation,
    Generator,
    GradedAlgebra,
    Monomial,
    Poly,
    cohomology,
)
from .linalg import Echelon, Vector, kernel, vec_iadd


class HypothesisError(ValueError):
    """The input is outside the supported class (e.g. H^1 != 0 unweighted)."""


class NonChainMapError(ValueError):
    pass


class CapOverflowError(RuntimeError):
    """A construction needed data beyond the caps."""


# ---------------------------------------------------------------------------
# finite cdgas


class CdgaPresentation:
    """A finite-dimensional cdga given by a basis and structure constants.

    Basis elements are addressed by index; index 0 is the unit.  ``weights``
    are optional: when every positive-degree element has a positive weight and
    products and differential respect weights, the algebra is weight-graded
    and model constructions proceed weight by weight.
    """

    def __init__(self, names, degrees, products=None, differential=None, weights=None):
        self.names = list(names)
        self.degrees = list(degrees)
        if self.degrees[0] != 0:
            raise ValueError("basis element 0 must be the unit (degree 0)")
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate basis names")
        self.weights = list(weights) if weights is not None else None
        self.weighted = self.weights is not None and all(
            w >= 1 for w, d in zip(self.weights[1:], self.degrees[1:])
        )
        self._prod: Dict[Tuple[int, int], Vector] = {}
        for (a, b), val in (products or {}).items():
            i, j = self._idx(a), self._idx(b)
            v = {self._idx(k): Fraction(c) for k, c in val.items() if c}
            sign = -1 if (self.degrees[i] * self.degrees[j]) & 1 else 1
            mirrored = {k: sign * c for k, c in v.items()}
            if self._prod.get((i, j), v) != v or self._prod.get((j, i), mirrored) != mirrored:
                raise ValueError(f"products {self.names[i]}*{self.names[j]} and its mirror are not graded commutative")
            self._prod[(i, j)] = v
            self._prod[(j, i)] = mirrored
        self._diff: Dict[int, Vector] = {}
        for a, val in (differential or {}).items():
            self._diff[self._idx(a)] = {self._idx(k): Fraction(c) for k, c in val.items() if c}

    def _idx(self, a):
        return a if isinstance(a, int) else self.index[a]

    def __len__(self):
        return len(self.names)

    @property
    def top_degree(self):
        return max(self.degrees)

    def basis_product(self, i: int, j: int) -> Vector:
        if i == 0:
            return {j: Fraction(1)}
        if j == 0:
            return {i: Fraction(1)}
        return self._prod.get((i, j), {})

    # target protocol
    def keys(self, degree: int, weight: Optional[int] = None) -> List[int]:
        out = []
        for i, d in enumerate(self.degrees):
            if d != degree:
                continue
            if weight is not None and self.weighted and self.weights[i] != weight:
                continue
            out.append(i)
        return out

    def unit(self) -> Vector:
        return {0: Fraction(1)}

    def mul(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        for i, a in x.items():
            for j, b in y.items():
                vec_iadd(out, self.basis_product(i, j), a * b)
        return out

    def d(self, x: Vector) -> Vector:
        out: Vector = {}
        for i, a in x.items():
            vec_iadd(out, self._diff.get(i, {}), a)
        return out

    def element(self, spec) -> Vector:
        if isinstance(spec, str):
            return {self.index[spec]: Fraction(1)}
        return {self._idx(k): Fraction(c) for k, c in spec.items() if c}

    def format(self, v: Vector) -> str:
        if not v:
            return "0"
        return " + ".join(f"{c}*{self.names[i]}" for i, c in sorted(v.items()))

    def validate(self) -> None:
        """Check associativity, graded commutativity, d^2 = 0, Leibniz, H^0 = Q."""
        n = len(self)
        deg = self.degrees
        e = lambda i: {i: Fraction(1)}  # noqa: E731
        for i in range(n):
            for j in range(n):
                p = self.basis_product(i, j)
                for k in p:
                    if deg[k] != deg[i] + deg[j]:
                        raise ValueError(f"product {self.names[i]}*{self.names[j]} has wrong degree")
                for k in range(n):
                    lhs = self.mul(self.mul(e(i), e(j)), e(k))
                    rhs = self.mul(e(i), self.mul(e(j), e(k)))
                    if lhs != rhs:
                        raise ValueError(f"not associative on {self.names[i]},{self.names[j]},{self.names[k]}")
                lhs = self.d(p)
                rhs = self.mul(self.d(e(i)), e(j))
                vec_iadd(rhs, self.mul(e(i), self.d(e(j))), -1 if deg[i] & 1 else 1)
                if lhs != rhs:
                    raise ValueError(f"d is not a derivation on {self.names[i]}*{self.names[j]}")
        for i in range(n):
            if self.d(self.d(e(i))):
                raise ValueError(f"d^2 != 0 on {self.names[i]}")
            for k in self.d(e(i)):
                if deg[k] != deg[i] + 1:
                    raise ValueError(f"d({self.names[i]}) has wrong degree")
        if self.cohomology_dim(0) != 1:
            raise HypothesisError("H^0 of the presentation is not Q")

    def _cocycles(self, k):
        basis = self.keys(k)
        imgs = [self.d({i: Fraction(1)}) for i in basis]
        return [{basis[j]: c for j, c in kv.items()} for kv in kernel(imgs)]

    def cohomology_dim(self, k: int) -> int:
        z = self._cocycles(k)
        ech = Echelon()
        for i in self.keys(k - 1):
            ech.add(self.d({i: Fraction(1)}))
        return len(z) - ech.rank

    def cohomology_dims(self, upto: int) -> List[int]:
        return [self.cohomology_dim(k) for k in range(upto + 1)]

    # -- constructors -------------------------------------------------------

    @classmethod
    def trivial(cls, classes: Sequence[Tuple[str, int]], weights=None):
        """Q + W with zero products and zero differential."""
        names = ["1"] + [c[0] for c in classes]
        degrees = [0] + [c[1] for c in classes]
        ws = None if weights is None else [0] + list(weights)
        return cls(names, degrees, weights=ws)

    @classmethod
    def sphere(cls, n: int, name: str = "s"):
        return cls(["1", name], [0, n], weights=[0, 1] if n == 1 else None)

    @classmethod
    def truncated_polynomial(cls, degree: int, height: int, name: str = "c"):
        """Q[c]/(c^(height+1)), e.g. H(CP^height) for degree 2."""
        names = ["1"] + [name if k == 1 else f"{name}^{k}" for k in range(1, height + 1)]
        degrees = [k * degree for k in range(height + 1)]
        prods = {}
        for a in range(1, height + 1):
            for b in range(1, height + 1):
                if a + b <= height:
                    prods[(names[a], names[b])] = {names[a + b]: 1}
        return cls(names, degrees, prods)

    @classmethod
    def exterior(cls, names: Sequence[str]):
        """H of a torus: the exterior algebra on degree-1 classes (weighted)."""
        from itertools import combinations

        subsets = [()]
        for k in range(1, len(names) + 1):
            subsets += list(combinations(range(len(names)), k))
        label = lambda s: "1" if not s else "".join(names[i] for i in s)  # noqa: E731
        prods = {}
        for s in subsets[1:]:
            for t in subsets[1:]:
                if set(s) & set(t):
                    continue
                merged = list(s) + list(t)
                sign = 1
                for a in range(len(merged)):
                    for b in range(a + 1, len(merged)):
                        if merged[a] > merged[b]:
                            sign = -sign
                prods[(label(s), label(t))] = {label(tuple(sorted(merged))): sign}
        return cls([label(s) for s in subsets], [len(s) for s in subsets], prods,
                   weights=[len(s) for s in subsets])

    @classmethod
    def surface(cls, genus: int):
        """H of the closed orientable surface of the given genus (weighted)."""
        names = ["1"]
        for i in range(1, genus + 1):
            names += [f"a{i}", f"b{i}"]
        names.append("w")
        degrees = [0] + [1] * (2 * genus) + [2]
        weights = [0] + [1] * (2 * genus) + [2]
        prods = {}
        for i in range(1, genus + 1):
            prods[(f"a{i}", f"b{i}")] = {"w": 1}
        return cls(names, degrees, prods, weights=weights)

    def word_weights(self) -> List[int]:
        """The given weights, or product length (decomposables get the sum)."""
        if self.weights is not None:
            return list(self.weights)
        out = [0] + [1] * (len(self) - 1)
        for k in sorted(range(1, len(self)), key=lambda i: self.degrees[i]):
            for i in range(1, len(self)):
                for j in range(1, len(self)):
                    if k in self.basis_product(i, j) and self.degrees[i] + self.degrees[j] == self.degrees[k]:
                        out[k] = max(out[k], out[i] + out[j])
        return out

    def tensor(self, other: "CdgaPresentation") -> "CdgaPresentation":
        """Tensor product with Koszul signs (zero differentials assumed merged)."""
        n1, n2 = len(self), len(other)
        names, degrees, weights = [], [], []
        for i in range(n1):
            for j in range(n2):
                a, b = self.names[i], other.names[j]
                names.append("1" if (i == 0 and j == 0) else (a if j == 0 else (b if i == 0 else f"{a}{b}")))
                degrees.append(self.degrees[i] + other.degrees[j])
                if self.weights is not None or other.weights is not None:
                    weights.append(self.word_weights()[i] + other.word_weights()[j])
        pos = lambda i, j: i * n2 + j  # noqa: E731
        prods = {}
        for i1 in range(n1):
            for j1 in range(n2):
                for i2 in range(n1):
                    for j2 in range(n2):
                        if pos(i1, j1) == 0 or pos(i2, j2) == 0:
                            continue
                        sign = -1 if (other.degrees[j1] * self.degrees[i2]) & 1 else 1
                        out = {}
                        for a, ca in self.basis_product(i1, i2).items():
                            for b, cb in other.basis_product(j1, j2).items():
                                k = names[pos(a, b)]
                                out[k] = out.get(k, 0) + sign * ca * cb
                        out = {k: v for k, v in out.items() if v}
                        if out:
                            prods[(names[pos(i1, j1)], names[pos(i2, j2)])] = out
        diff = {}
        for i in range(n1):
            for j in range(n2):
                out = {}
                for a, c in self.d({i: Fraction(1)}).items():
                    k = names[pos(a, j)]
                    out[k] = out.get(k, 0) + c
                s = -1 if self.degrees[i] & 1 else 1
                for b, c in other.d({j: Fraction(1)}).items():
                    k = names[pos(i, b)]
                    out[k] = out.get(k, 0) + s * c
                out = {k: v for k, v in out.items() if v}
                if out:
                    diff[names[pos(i, j)]] = out
        return CdgaPresentation(names, degrees, prods, diff, weights=weights or None)

    def fiber_product(self, other: "CdgaPresentation") -> "CdgaPresentation":
        """Q + A^+ + B^+ with A^+ . B^+ = 0 (both inputs must have d = 0 across)."""
        names = ["1"] + list(self.names[1:]) + list(other.names[1:])
        if len(set(names)) != len(names):
            raise ValueError("fiber product needs disjoint basis names")
        degrees = [0] + self.degrees[1:] + other.degrees[1:]
        weights = None
        if self.weights is not None or other.weights is not None:
            weights = [0] + self.word_weights()[1:] + other.word_weights()[1:]
        prods, diff = {}, {}
        for src in (self, other):
            for (i, j), v in src._prod.items():
                if i and j:
                    prods[(src.names[i], src.names[j])] = {src.names[k]: c for k, c in v.items()}
            for i, v in src._diff.items():
                diff[src.names[i]] = {src.names[k]: c for k, c in v.items()}
        return CdgaPresentation(names, degrees, prods, diff, weights=weights)

    def to_dict(self):
        prods = {}
        for (i, j), v in sorted(self._prod.items()):
            if i <= j:
                prods[f"{self.names[i]}*{self.names[j]}"] = {self.names[k]: str(c) for k, c in sorted(v.items())}
        return {
            "basis": [
                {"name": n, "degree": d, **({"weight": self.weights[i]} if self.weights else {})}
                for i, (n, d) in enumerate(zip(self.names, self.degrees))
            ],
            "products": prods,
            "differential": {
                self.names[i]: {self.names[k]: str(c) for k, c in sorted(v.items())}
                for i, v in sorted(self._diff.items())
            },
        }

    @classmethod
    def from_dict(cls, doc):
        basis = doc["basis"]
        names = [b["name"] for b in basis]
        degrees = [int(b["degree"]) for b in basis]
        weights = [int(b["weight"]) for b in basis] if all("weight" in b for b in basis) else None
        prods = {}
        for key, val in (doc.get("products") or {}).items():
            a, b = key.split("*")
            prods[(a.strip(), b.strip())] = {k: Fraction(v) for k, v in val.items()}
        diff = {k: {n: Fraction(c) for n, c in v.items()} for k, v in (doc.get("differential") or {}).items()}
        return cls(names, degrees, prods, diff, weights)


class TrivialTarget:
    """The cdga Q; relative models over it are acyclic-closure-like."""

    weighted = False

    def keys(self, degree, weight=None):
        return [0] if degree == 0 and not weight else []

    def unit(self):
        return {0: Fraction(1)}

    def mul(self, x, y):
        return {0: x.get(0, 0) * y.get(0, 0)} if x.get(0) and y.get(0) else {}

    def d(self, x):
        return {}


# ---------------------------------------------------------------------------
# Sullivan algebras


class SullivanAlgebra:
    """(ΛV, d) with a recorded Sullivan filtration witness."""

    def __init__(self, algebra: GradedAlgebra, dvalues: Dict[int, Poly], caps: Optional[Caps] = None,
                 stages: Optional[List[int]] = None):
        self.algebra = algebra
        self.d = Derivation(algebra, dvalues)
        self.caps = caps or Caps()
        self.stages = stages if stages is not None else compute_stages(algebra, dvalues)

    @classmethod
    def build(cls, gens: Sequence[Tuple[str, int]], diffs: Dict[str, Dict[str, object]] = None,
              caps: Optional[Caps] = None, weights: Optional[Dict[str, int]] = None):
        """Build from names and a differential given as ``{gen: {"a*b": coeff}}``."""
        A = GradedAlgebra([Generator(n, d, (weights or {}).get(n, 1)) for n, d in gens])
        values = {i: {} for i in range(len(A))}
        for name, poly in (diffs or {}).items():
            values[A.index[name]] = parse_poly(A, poly)
        return cls(A, values, caps)

    @property
    def generators(self):
        return self.algebra.generators

    @property
    def weighted(self):
        return any(g.degree <= 1 for g in self.algebra.generators)

    def __len__(self):
        return len(self.algebra)

    def gen_degrees(self) -> List[int]:
        return [g.degree for g in self.algebra.generators]

    def degree_counts(self, upto: Optional[int] = None) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for g in self.algebra.generators:
            if upto is None or g.degree <= upto:
                out[g.degree] = out.get(g.degree, 0) + 1
        return dict(sorted(out.items()))

    def dvalue(self, name: str) -> Poly:
        return self.d.values[self.algebra.index[name]]

    def is_minimal(self) -> bool:
        return all(len(m) >= 2 for v in self.d.values.values() for m in v)

    def is_quadratic(self) -> bool:
        return all(len(m) == 2 for v in self.d.values.values() for m in v)

    def check_sullivan(self) -> bool:
        for i, v in self.d.values.items():
            for m in v:
                for g in m:
                    if self.stages[g] >= self.stages[i]:
                        return False
        return True

    def check_square_zero(self) -> None:
        self.d.check_square_zero()

    def cohomology_dims(self, degrees, weight=None):
        caps = self.caps if weight is None else None
        return [cohomology(self.d, k, caps, weight).dim for k in degrees]

    def describe(self) -> List[dict]:
        A = self.algebra
        return [
            {"name": g.name, "degree": g.degree, "weight": g.weight, "stage": self.stages[i],
             "d": A.format(self.d.values.get(i, {}))}
            for i, g in enumerate(A.generators)
        ]

    # target protocol
    def keys(self, degree, weight=None):
        if weight is not None:
            return self.algebra.monomials(degree, weight=weight)
        return self.algebra.monomials(degree, max_weight=self.caps.max_length if self.weighted else None)

    def unit(self):
        return {ONE: Fraction(1)}

    def mul(self, x, y):
        return self.algebra.mul(x, y)

    def dpoly(self, x):
        return self.d(x)

    def to_dict(self):
        return {"generators": self.describe(), "caps": self.caps.as_dict()}


# SullivanAlgebra.d is the Derivation; the target protocol calls target.d(vec),
# which the Derivation object already satisfies through __call__.


def compute_stages(algebra: GradedAlgebra, dvalues: Dict[int, Poly]) -> List[int]:
    stages = [0] * len(algebra)
    for i in range(len(algebra)):
        s = 0
        for m in dvalues.get(i, {}):
            for g in m:
                if g >= i:
                    raise ValueError("differential is not triangular in generator order")
                s = max(s, stages[g] + 1)
        stages[i] = s
    return stages


def parse_poly(A: GradedAlgebra, spec) -> Poly:
    """``{"a*b": 1, "c": -2}`` or a string like ``"a*b - 2*c"`` into a polynomial."""
    if isinstance(spec, str):
        terms = {}
        s = spec.replace(" ", "").replace("-", "+-")
        for t in filter(None, s.split("+")):
            coeff = Fraction(1)
            if t.startswith("-"):
                coeff, t = -coeff, t[1:]
            parts = t.split("*")
            if parts and _is_number(parts[0]):
                coeff *= Fraction(parts[0])
                parts = parts[1:]
            terms["*".join(parts)] = terms.get("*".join(parts), 0) + coeff
        spec = terms
    out: Poly = {}
    for key, c in spec.items():
        p: Poly = {ONE: Fraction(c)}
        if key not in ("", "1"):
            for f in key.split("*"):
                if "^" in f:
                    base, k = f.split("^")
                    p = A.mul(p, A.power(A.gen(base), int(k)))
                else:
                    p = A.mul(p, A.gen(f))
        vec_iadd(out, p)
    return out


def _is_number(s):
    try:
        Fraction(s)
        return True
    except ValueError:
        return False


@dataclass
class CdgaMorphism:
    """A cdga morphism out of a Sullivan algebra, given on generators."""

    source: SullivanAlgebra
    target: object
    values: Dict[int, Vector]
    _cache: Dict[Monomial, Vector] = field(default_factory=dict, repr=False)

    def on_monomial(self, m: Monomial) -> Vector:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        if not m:
            out = self.target.unit()
        elif len(m) == 1:
            out = self.values.get(m[0], {})
        else:
            out = self.target.mul(self.on_monomial(m[:-1]), self.values.get(m[-1], {}))
        self._cache[m] = out
        return out

    def __call__(self, p: Poly) -> Vector:
        out: Vector = {}
        for m, c in p.items():
            vec_iadd(out, self.on_monomial(m), c)
        return out

    def check_chain_map(self) -> List[str]:
        """Generators on which ``d f != f d`` (empty when a chain map)."""
        bad = []
        for i in range(len(self.source)):
            lhs = self.target.d(self.values.get(i, {}))
            rhs = self(self.source.d.values[i])
            if lhs != rhs:
                bad.append(self.source.generators[i].name)
        return bad


# ---------------------------------------------------------------------------
# relative models


def _target_d(target, vec):
    if isinstance(target, SullivanAlgebra):
        return target.d(vec)
    return target.d(vec)


@dataclass
class RelativeModel:
    algebra: SullivanAlgebra
    rho: CdgaMorphism
    n_base: int
    log: List[str] = field(default_factory=list)

    @property
    def new_indices(self):
        return range(self.n_base, len(self.algebra))


def relative_model(
    target,
    caps: Caps,
    base: Optional[SullivanAlgebra] = None,
    base_map: Optional[Dict[int, Vector]] = None,
    prefix: str = "v",
    max_gen_degree: Optional[int] = None,
) -> RelativeModel:
    """Extend ``base`` to a quasi-isomorphism onto ``target`` within caps.

    New generators have degree ``<= max_gen_degree`` (default ``N - 1``), so
    the comparison map is an isomorphism on H^k for ``k <= max_gen_degree``
    and injective on the next degree.
    """
    weighted = bool(getattr(target, "weighted", False))
    if weighted and caps.max_length is None:
        raise CapMissingError("weight-graded target needs a length cap")
    top = caps.max_degree - 1 if max_gen_degree is None else max_gen_degree
    A = GradedAlgebra()
    dvals: Dict[int, Poly] = {}
    rho_vals: Dict[int, Vector] = {}
    if base is not None:
        for i, g in enumerate(base.generators):
            A.add_generator(g)
            dvals[i] = dict(base.d.values[i])
            rho_vals[i] = dict((base_map or {}).get(i, {}))
    n_base = len(A)
    M = SullivanAlgebra(A, dvals, caps, stages=[0] * len(A))
    rho = CdgaMorphism(M, target, rho_vals)
    counters: Dict[int, int] = {}
    log: List[str] = []

    def fresh(k):
        counters[k] = counters.get(k, 0) + 1
        while True:
            name = f"{prefix}{k}_{counters[k]}"
            if name not in A.index:
                return name
            counters[k] += 1

    def add_gen(k, w, dval, rval):
        i = A.add_generator(Generator(fresh(k), k, w if weighted else 1))
        dvals[i] = dval
        rho_vals[i] = rval
        return i

    def slices(j, w):
        if weighted:
            return A.monomials(j, weight=w)
        return A.monomials(j)

    def compare(j, w):
        """Cycles of E^j modulo boundaries versus the target at (j, w)."""
        E_prev, E_cur = slices(j - 1, w), slices(j, w)
        imgs = [M.d.apply_mono(m) for m in E_cur]
        cycles = [{E_cur[t]: c for t, c in kv.items()} for kv in kernel(imgs)]
        bE = Echelon()
        for m in E_prev:
            bE.add(M.d.apply_mono(m))
        T_prev, T_cur = target.keys(j - 1, w), target.keys(j, w)
        dT = Echelon(track=True)
        dT_imgs = []
        for key in T_prev:
            img = target.d({key: Fraction(1)})
            dT_imgs.append(img)
            dT.add(img)
        timgs = [target.d({key: Fraction(1)}) for key in T_cur]
        zT = [{T_cur[t]: c for t, c in kv.items()} for kv in kernel(timgs)]
        return cycles, bE, dT, T_prev, zT

    weights = range(1, caps.max_length + 1) if weighted else [None]
    for w in weights:
        for k in range(1, top + 1):
            # (A) classes of the target not yet hit in degree k
            cycles, bE, dT, T_prev, zT = compare(k, w)
            reach = Echelon()
            for row in dT.rows.values():
                reach.add({key: Fraction(v) for key, v in row.items()})
            for z in cycles:
                reach.add(rho(z))
            for z in zT:
                if reach.add(z):
                    add_gen(k, w, {}, z)
                    log.append(f"closed generator in degree {k}" + (f", weight {w}" if w else ""))
            # (B) classes in degree k+1 that die in the target
            cycles, bE, dT, T_prev, _ = compare(k + 1, w)
            if not cycles:
                continue
            red = Echelon()
            for row in dT.rows.values():
                red.add({key: Fraction(v) for key, v in row.items()})
            rems = [red.normal_form(rho(z)) for z in cycles]
            for kv in kernel(rems):
                c: Poly = {}
                for t, coef in kv.items():
                    vec_iadd(c, cycles[t], coef)
                if not bE.add(c):
                    continue
                if any(len(m) == 1 and m[0] >= n_base for m in c):
                    raise RuntimeError("killing cycle has a linear term in new generators")
                sol = dT.solve(rho(c))
                if sol is None:
                    raise RuntimeError("target boundary could not be lifted")
                pre: Vector = {}
                for j, coef in sol.items():
                    vec_iadd(pre, {T_prev[j]: Fraction(1)}, coef)
                if k == 0:
                    raise HypothesisError("would need a degree-0 generator")
                add_gen(k, w, c, pre)
                log.append(f"killing generator in degree {k}" + (f", weight {w}" if w else ""))
    M.stages = compute_stages(A, dvals)
    return RelativeModel(M, rho, n_base, log)


def minimal_model(A, caps: Caps = Caps()) -> Tuple[SullivanAlgebra, CdgaMorphism]:
    """Minimal Sullivan model of a finite cdga (simply connected or weight-graded)."""
    if isinstance(A, CdgaPresentation):
        if A.cohomology_dim(0) != 1:
            raise HypothesisError("H^0(A) != Q")
        if not A.weighted and A.cohomology_dim(1) != 0:
            raise HypothesisError(
                "H^1(A) != 0: use quadratic_model for trivial-product algebras "
                "or give the presentation weights"
            )
    rm = relative_model(A, caps)
    M = rm.algebra
    if not M.is_minimal():
        raise RuntimeError("constructed model is not minimal")
    return M, rm.rho


# ---------------------------------------------------------------------------
# quadratic models (trivial-product algebras)


def quadratic_model(classes: Sequence[Tuple], caps: Caps = Caps(), prefix: str = "v") -> SullivanAlgebra:
    """Quadratic Sullivan model of Q + W with zero products and differential.

    ``classes`` holds ``(name, degree)`` or ``(name, degree, weight)``.  Stage
    generators are added weight by weight: those of weight ``w`` map
    isomorphically onto the d-cycles in wedge degree 2 and weight ``w``.
    """
    A = GradedAlgebra()
    for c in classes:
        name, deg = c[0], int(c[1])
        w = int(c[2]) if len(c) > 2 else 1
        if deg < 1:
            raise ValueError("classes must have degree >= 1")
        A.add_generator(Generator(name, deg, w))
    has_low = any(g.degree == 1 for g in A.generators)
    if has_low and caps.max_length is None:
        raise CapMissingError("degree-1 classes need a length cap")
    dvals: Dict[int, Poly] = {i: {} for i in range(len(A))}
    D = Derivation(A, dvals)
    N = caps.max_degree
    wmax = caps.max_length if caps.max_length is not None else N * max(g.weight for g in A.generators) if len(A) else 0
    wmin = min((g.weight for g in A.generators), default=1)
    counter = 0
    for w in range(wmin + 1, wmax + 1):
        new = []
        for deg in range(2, N + 2):
            mons = A.monomials(deg, weight=w, max_length=2)
            mons = [m for m in mons if len(m) == 2]
            if not mons:
                continue
            imgs = [D.apply_mono(m) for m in mons]
            for kv in kernel(imgs):
                cyc = {mons[t]: c for t, c in kv.items()}
                new.append((deg - 1, cyc))
        for k, cyc in new:
            counter += 1
            i = A.add_generator(Generator(f"{prefix}{k}_{w}_{counter}", k, w))
            dvals[i] = cyc
    return SullivanAlgebra(A, dvals, caps)


# ---------------------------------------------------------------------------
# acyclic closures


@dataclass
class LambdaExtension:
    """ΛV ⊗ ΛZ over the base ΛV, with the quotient (ΛZ, d̄)."""

    base: SullivanAlgebra
    total: SullivanAlgebra
    n_base: int
    fiber: SullivanAlgebra

    @property
    def fiber_indices(self):
        return range(self.n_base, len(self.total))


def quotient_by_base(total: SullivanAlgebra, n_base: int, caps: Caps) -> SullivanAlgebra:
    """(ΛZ, d̄) = Q ⊗_{ΛV} (ΛV ⊗ ΛZ) for a split extension with base first."""
    Z = GradedAlgebra(total.generators[n_base:])
    vals: Dict[int, Poly] = {}
    for i in range(n_base, len(total)):
        out: Poly = {}
        for m, c in total.d.values[i].items():
            if all(g >= n_base for g in m):
                out[tuple(g - n_base for g in m)] = c
        vals[i - n_base] = out
    return SullivanAlgebra(Z, vals, caps)


def acyclic_closure(M: SullivanAlgebra, caps: Optional[Caps] = None, prefix: str = "u") -> LambdaExtension:
    """ΛV ⊗ ΛU with du = v - Ψ, Ψ ∈ Λ^{≥1}V ⊗ Λ^{≥1}U, quotient d on ΛU zero."""
    caps = caps or M.caps
    weighted = M.weighted
    if weighted and caps.max_length is None:
        raise CapMissingError("acyclic closure of a model with degree-1 generators needs a length cap")
    A = GradedAlgebra(M.generators)
    n = len(A)
    dvals: Dict[int, Poly] = {i: dict(M.d.values[i]) for i in range(n)}
    D = Derivation(A, dvals)
    order = sorted(range(n), key=lambda i: ((A.wt[i] if weighted else 0), A.deg[i], i))
    # corrections for v only involve u's of strictly smaller weight (or
    # degree), so one solver serves a whole (weight, degree) group
    solvers: Dict[Tuple[int, int], Tuple[Echelon, List[Monomial]]] = {}
    for i in order:
        g = A.generators[i]
        if g.degree > caps.max_degree:
            continue
        dv = M.d.values[i]
        psi: Poly = {}
        if dv:
            key = (g.weight if weighted else 0, g.degree)
            if key not in solvers:
                if weighted:
                    mons = A.monomials(g.degree, weight=g.weight)
                else:
                    mons = A.monomials(g.degree)
                mons = [m for m in mons if len(m) >= 2 and any(x < n for x in m) and any(x >= n for x in m)]
                ech = Echelon(track=True)
                for m in mons:
                    ech.add(D.apply_mono(m))
                solvers[key] = (ech, mons)
            ech, mons = solvers[key]
            sol = ech.solve(dv)
            if sol is None:
                raise CapOverflowError(f"no correction term for {g.name} within caps")
            for t, c in sol.items():
                vec_iadd(psi, {mons[t]: Fraction(1)}, c)
        j = A.add_generator(Generator(f"{prefix}_{g.name}", g.degree - 1, g.weight))
        val = {(i,): Fraction(1)}
        vec_iadd(val, psi, -1)
        dvals[j] = val
    total = SullivanAlgebra(A, dvals, caps, stages=[0] * len(A))
    total.stages = _closure_stages(A, dvals)
    fiber = quotient_by_base(total, n, caps)
    return LambdaExtension(M, total, n, fiber)


def _closure_stages(A, dvals):
    # generators are not in triangular order (u's come after all v's), so
    # stages are computed by fixed-point iteration
    stages = [0] * len(A)
    changed = True
    while changed:
        changed = False
        for i in range(len(A)):
            s = 0
            for m in dvals.get(i, {}):
                for g in m:
                    s = max(s, stages[g] + 1)
            if s != stages[i]:
                stages[i] = s
                changed = True
    return stages


def closure_cohomology_dims(ext: LambdaExtension, degrees, weight=None) -> List[int]:
    return [cohomology(ext.total.d, k, ext.total.caps if weight is None else None, weight).dim for k in degrees]


# ---------------------------------------------------------------------------
# quadratic part, extension split


def quadratic_part(M: SullivanAlgebra) -> SullivanAlgebra:
    vals = {i: {m: c for m, c in v.items() if len(m) == 2} for i, v in M.d.values.items()}
    return SullivanAlgebra(M.algebra, vals, M.caps, stages=compute_stages(M.algebra, vals))


@dataclass
class FailureWitness:
    degree: int
    kernel_vector: Dict[str, Fraction]

    def to_dict(self):
        return {"degree": self.degree, "kernel_vector": {k: str(v) for k, v in self.kernel_vector.items()}}


@dataclass
class ExtensionSplit:
    """ΛW = ΛV ⊗ ΛZ after replacing pivot generators of W by λ(V)."""

    lam: CdgaMorphism
    pivots: Dict[int, int]          # W generator index -> V generator index
    z_indices: List[int]            # W generators kept as Z
    fiber: SullivanAlgebra          # (ΛZ, d̄)
    quotient: Dict[int, Poly]       # q on W generators, values in ΛZ


def extension_split(lam: CdgaMorphism, caps: Optional[Caps] = None, max_degree: Optional[int] = None):
    """Split ΛW as ΛV ⊗ ΛZ if λ is injective on indecomposables.

    Returns :class:`ExtensionSplit` or a :class:`FailureWitness` for the least
    degree where injectivity fails.
    """
    V: SullivanAlgebra = lam.source
    W: SullivanAlgebra = lam.target
    caps = caps or W.caps
    bad = lam.check_chain_map()
    if bad:
        raise NonChainMapError(f"λ does not commute with d on {bad}")
    top = max_degree if max_degree is not None else caps.max_degree
    vdeg = sorted({g.degree for g in V.generators if g.degree <= top})
    pivots: Dict[int, int] = {}
    rows: Dict[int, Tuple[Vector, Dict[int, Fraction]]] = {}
    for k in vdeg:
        idx = [i for i, g in enumerate(V.generators) if g.degree == k]
        lins = []
        for i in idx:
            lins.append({m[0]: c for m, c in lam.values.get(i, {}).items() if len(m) == 1})
        ker = kernel(lins)
        if ker:
            kv = ker[0]
            return FailureWitness(k, {V.generators[idx[t]].name: c for t, c in sorted(kv.items())})
        ech = Echelon(track=True)
        for lin in lins:
            ech.add(lin)
        for p, row in ech.rows.items():
            combo = ech.combos[p]
            pivots[p] = idx[min(combo)]
            rows[p] = ({key: Fraction(v) for key, v in row.items()}, {idx[t]: c for t, c in combo.items()})
    WA = W.algebra
    z_indices = [i for i in range(len(WA)) if i not in pivots]
    Zalg = GradedAlgebra([WA.generators[i] for i in z_indices])
    zpos = {i: t for t, i in enumerate(z_indices)}
    qcache: Dict[int, Poly] = {}

    def q_mono(m: Monomial) -> Poly:
        out: Poly = {ONE: Fraction(1)}
        for g in m:
            out = Zalg.mul(out, q_gen(g))
            if not out:
                break
        return out

    def q_poly(p: Poly) -> Poly:
        out: Poly = {}
        for m, c in p.items():
            vec_iadd(out, q_mono(m), c)
        return out

    def q_gen(g: int) -> Poly:
        if g in qcache:
            return qcache[g]
        if g in zpos:
            val = {(zpos[g],): Fraction(1)}
        else:
            row, combo = rows[g]
            # sum_v c_v λ(v) = row + sum_v c_v dec(v), and q kills every λ(v)
            rest: Poly = {}
            for key, c in row.items():
                if key != g:
                    vec_iadd(rest, q_gen(key), c)
            for vi, c in combo.items():
                dec = {m: x for m, x in lam.values.get(vi, {}).items() if len(m) != 1}
                vec_iadd(rest, q_poly(dec), c)
            val = {m: -c / row[g] for m, c in rest.items()}
        qcache[g] = val
        return val

    dbar = {}
    for t, i in enumerate(z_indices):
        dbar[t] = q_poly(W.d.values[i])
    fiber = SullivanAlgebra(Zalg, dbar, caps)
    quotient = {g: q_gen(g) for g in range(len(WA))}
    return ExtensionSplit(lam, pivots, z_indices, fiber, quotient)


def morphism_from_names(source: SullivanAlgebra, target: SullivanAlgebra, values: Dict[str, object]) -> CdgaMorphism:
    vals = {}
    for name, spec in values.items():
        vals[source.algebra.index[name]] = parse_poly(target.algebra, spec)
    return CdgaMorphism(source, target, vals)
