"""Free graded-commutative algebras over Q.

A monomial is a sorted tuple of generator indices; even generators may repeat,
odd ones may not.  The canonical order is generator creation order.  A
polynomial is a dict ``monomial -> Fraction``.

Every generator carries a positive ``weight`` in addition to its degree.  For
models built from circles the weight is the bracket length, and it is what
keeps each graded piece finite when degree-0 or degree-1 generators occur.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import Echelon, Vector, kernel, vec_iadd

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Fraction]

ONE: Monomial = ()


class CapMissingError(ValueError):
    """A graded piece would be infinite-dimensional without a length cap."""


class NotSquareZeroError(ValueError):
    def __init__(self, generator: str, value):
        super().__init__(f"d(d({generator})) = {value} is not zero")
        self.generator = generator
        self.value = value


class UndefinedGeneratorError(KeyError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: int = 1

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"generator {self.name} has negative degree")
        if self.weight < 1:
            raise ValueError(f"generator {self.name} needs a positive weight")


@dataclass(frozen=True)
class Caps:
    """Truncation caps: total degree ``max_degree`` and weight ``max_length``."""

    max_degree: int = 8
    max_length: Optional[int] = 6

    def as_dict(self):
        return {"max_degree": self.max_degree, "max_length": self.max_length}


@dataclass
class DegreeSlice:
    degree: int
    basis: List[Monomial]
    weight: Optional[int] = None

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self):
        return len(self.basis)


class GradedAlgebra:
    """The free graded-commutative algebra on an ordered generator list."""

    def __init__(self, generators: Sequence[Generator] = ()):
        self.generators: List[Generator] = []
        self.index: Dict[str, int] = {}
        self.deg: List[int] = []
        self.wt: List[int] = []
        self._groups = None
        for g in generators:
            self.add_generator(g)

    def add_generator(self, g: Generator) -> int:
        if g.name in self.index:
            raise ValueError(f"duplicate generator name {g.name!r}")
        i = len(self.generators)
        self.generators.append(g)
        self.index[g.name] = i
        self.deg.append(g.degree)
        self.wt.append(g.weight)
        self._groups = None
        return i

    def __len__(self):
        return len(self.generators)

    def gen(self, name: str) -> Poly:
        try:
            return {(self.index[name],): Fraction(1)}
        except KeyError:
            raise UndefinedGeneratorError(name) from None

    def name_of(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        i = 0
        while i < len(m):
            j = i
            while j < len(m) and m[j] == m[i]:
                j += 1
            name = self.generators[m[i]].name
            parts.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return "*".join(parts)

    def format(self, p: Poly) -> str:
        if not p:
            return "0"
        out = []
        for m in sorted(p):
            c = p[m]
            s = self.name_of(m)
            if c == 1:
                out.append(f"+{s}")
            elif c == -1:
                out.append(f"-{s}")
            else:
                out.append(f"{'+' if c > 0 else '-'}{abs(c)}*{s}" if m else f"{'+' if c > 0 else '-'}{abs(c)}")
        text = "".join(out)
        return text[1:] if text.startswith("+") else text

    def mono_degree(self, m: Monomial) -> int:
        return sum(self.deg[i] for i in m)

    def mono_weight(self, m: Monomial) -> int:
        return sum(self.wt[i] for i in m)

    def degree_of(self, p: Poly) -> Optional[int]:
        degs = {self.mono_degree(m) for m in p}
        if len(degs) > 1:
            raise ValueError("inhomogeneous polynomial")
        return degs.pop() if degs else None

    # -- products -----------------------------------------------------------

    def mul_mono(self, a: Monomial, b: Monomial):
        """Return ``(sign, monomial)`` or None when the product vanishes."""
        if not a:
            return 1, b
        if not b:
            return 1, a
        deg = self.deg
        odd_a = [i for i in a if deg[i] & 1]
        sign = 1
        if odd_a:
            for j in b:
                if deg[j] & 1:
                    if j in odd_a:
                        return None
                    # odd factors of a that sit after j
                    n = 0
                    for i in odd_a:
                        if i > j:
                            n += 1
                    if n & 1:
                        sign = -sign
        return sign, tuple(sorted(a + b))

    def mul(self, p: Poly, q: Poly) -> Poly:
        out: Poly = {}
        for ma, ca in p.items():
            for mb, cb in q.items():
                r = self.mul_mono(ma, mb)
                if r is None:
                    continue
                s, m = r
                v = out.get(m, 0) + s * ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def power(self, p: Poly, k: int) -> Poly:
        out: Poly = {ONE: Fraction(1)}
        for _ in range(k):
            out = self.mul(out, p)
        return out

    # -- bases ----------------------------------------------------------------

    def _bidegree_groups(self):
        if self._groups is None:
            groups: Dict[Tuple[int, int], List[int]] = {}
            for i, g in enumerate(self.generators):
                groups.setdefault((g.degree, g.weight), []).append(i)
            self._groups = sorted(groups.items())
        return self._groups

    def monomials(
        self,
        degree: int,
        weight: Optional[int] = None,
        max_weight: Optional[int] = None,
        max_length: Optional[int] = None,
    ) -> List[Monomial]:
        """All monomials of the given degree (and exact weight / weight cap).

        ``max_length`` bounds the number of factors (wedge degree).
        """
        if degree < 0:
            return []
        wcap = weight if weight is not None else max_weight
        groups = self._bidegree_groups()
        if wcap is None and max_length is None and any(d == 0 for (d, _), _ in groups):
            raise CapMissingError("degree-0 generators need a weight or length cap")
        out: List[Monomial] = []

        def rec(gi, rem_deg, rem_wt, rem_len, acc):
            if gi == len(groups):
                if rem_deg == 0 and (weight is None or rem_wt == 0):
                    out.append(tuple(sorted(acc)))
                return
            (d, w), members = groups[gi]
            odd = d & 1
            c = 0
            while True:
                if c * d > rem_deg:
                    break
                if rem_wt is not None and c * w > rem_wt:
                    break
                if rem_len is not None and c > rem_len:
                    break
                if odd and c > len(members):
                    break
                chooser = combinations(members, c) if odd else combinations_with_replacement(members, c)
                nd = rem_deg - c * d
                nw = None if rem_wt is None else rem_wt - c * w
                nl = None if rem_len is None else rem_len - c
                for pick in chooser:
                    rec(gi + 1, nd, nw, nl, acc + list(pick))
                c += 1

        rec(0, degree, wcap, max_length, [])
        out.sort()
        return out


def monomial_basis(
    algebra: GradedAlgebra,
    degree: int,
    caps: Optional[Caps] = None,
    weight: Optional[int] = None,
    max_length: Optional[int] = None,
) -> DegreeSlice:
    """Monomials of one degree under the caps, in canonical order."""
    if caps is not None and degree > caps.max_degree:
        raise ValueError(f"degree {degree} exceeds max_degree {caps.max_degree}")
    max_weight = caps.max_length if caps is not None else None
    basis = algebra.monomials(degree, weight=weight, max_weight=max_weight, max_length=max_length)
    return DegreeSlice(degree, basis, weight)


def multiply(algebra: GradedAlgebra, p: Poly, q: Poly) -> Poly:
    return algebra.mul(p, q)


def poly_add(p: Poly, q: Poly, c=1) -> Poly:
    out = dict(p)
    vec_iadd(out, q, c)
    return out


def wedge_components(p: Poly) -> Dict[int, Poly]:
    out: Dict[int, Poly] = {}
    for m, c in p.items():
        out.setdefault(len(m), {})[m] = c
    return out


class Derivation:
    """A derivation of ``algebra`` given by its values on generators."""

    def __init__(self, algebra: GradedAlgebra, values: Dict[int, Poly], degree_shift: int = 1):
        self.algebra = algebra
        self.values = values
        self.degree_shift = degree_shift
        self._cache: Dict[Monomial, Poly] = {}

    def on_generator(self, i: int) -> Poly:
        try:
            return self.values[i]
        except KeyError:
            raise UndefinedGeneratorError(self.algebra.generators[i].name) from None

    def apply_mono(self, m: Monomial) -> Poly:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        A = self.algebra
        out: Poly = {}
        prefix_deg = 0
        for pos, g in enumerate(m):
            dg = self.on_generator(g)
            if dg:
                sign = -1 if (self.degree_shift & 1 and prefix_deg & 1) else 1
                prefix = m[:pos]
                suffix = m[pos + 1:]
                for mg, c in dg.items():
                    r = A.mul_mono(prefix, mg)
                    if r is None:
                        continue
                    s1, m1 = r
                    r = A.mul_mono(m1, suffix)
                    if r is None:
                        continue
                    s2, m2 = r
                    v = out.get(m2, 0) + sign * s1 * s2 * c
                    if v:
                        out[m2] = v
                    else:
                        out.pop(m2, None)
            prefix_deg += A.deg[g]
        self._cache[m] = out
        return out

    def __call__(self, p: Poly) -> Poly:
        out: Poly = {}
        for m, c in p.items():
            vec_iadd(out, self.apply_mono(m), c)
        return out

    def check_square_zero(self) -> None:
        for i in self.values:
            dd = self(self.values[i])
            if dd:
                raise NotSquareZeroError(self.algebra.generators[i].name, self.algebra.format(dd))


def apply_derivation(D: Derivation, p: Poly) -> Poly:
    return D(p)


@dataclass
class CohomologyResult:
    degree: int
    dim: int
    representatives: List[Poly]
    boundaries_basis: List[Poly]
    cycles_dim: int
    slice_dim: int
    weight: Optional[int] = None


def _basis_images(d: Derivation, basis: List[Monomial], keep=None) -> List[Vector]:
    imgs = []
    for m in basis:
        img = d.apply_mono(m)
        if keep is not None:
            img = {k: v for k, v in img.items() if keep(k)}
        imgs.append(img)
    return imgs


def cohomology(
    d: Derivation,
    k: int,
    caps: Optional[Caps] = None,
    weight: Optional[int] = None,
    check: bool = False,
) -> CohomologyResult:
    """H^k of ``(algebra, d)`` by exact ranks between adjacent degree slices.

    With ``weight`` given the computation is restricted to that weight, which
    is exact whenever ``d`` preserves weight.  Otherwise a weight cap from
    ``caps`` (if any) truncates every slice.
    """
    A = d.algebra
    if check:
        d.check_square_zero()
    mw = caps.max_length if (caps is not None and weight is None) else None

    def sl(j):
        return A.monomials(j, weight=weight, max_weight=mw)

    cur = sl(k)
    prev = sl(k - 1) if k > 0 else []
    cur_set = set(cur)
    keep = None
    if mw is not None:
        keep = lambda m: A.mono_weight(m) <= mw  # noqa: E731
    imgs = _basis_images(d, cur, keep)
    ker = kernel(imgs)
    cycles = [{cur[j]: c for j, c in kv.items()} for kv in ker]
    bech = Echelon()
    boundaries = []
    for m in prev:
        b = d.apply_mono(m)
        b = {x: c for x, c in b.items() if x in cur_set}
        if bech.add(b):
            boundaries.append(b)
    reps = []
    for z in cycles:
        if bech.add(z):
            reps.append(z)
    return CohomologyResult(k, len(reps), reps, boundaries, len(cycles), len(cur), weight)


def cohomology_dims(d: Derivation, degrees: Iterable[int], caps=None, weight=None) -> List[int]:
    return [cohomology(d, k, caps, weight).dim for k in degrees]
