"""Exact sparse linear algebra over the rationals.

Vectors are plain dicts ``key -> Fraction`` (zero entries absent).  Rows kept
inside an :class:`Echelon` are integer-valued and content-normalized, so the
elimination is fraction-free; rationals only appear in the bookkeeping of
which input combination a row stands for.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

Vector = Dict[Hashable, Fraction]


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def to_integer_row(vec: Vector) -> Tuple[Dict[Hashable, int], Fraction]:
    """Return ``(row, scale)`` with ``row == scale * vec`` and integer entries."""
    den = 1
    for c in vec.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    row = {}
    for k, c in vec.items():
        if c:
            v = c * den
            row[k] = int(v) if not isinstance(v, Fraction) else v.numerator
    return row, Fraction(den)


def _content(row: Dict[Hashable, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def vec_add(a: Vector, b: Vector, c=1) -> Vector:
    """Return ``a + c*b`` as a new vector."""
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + c * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_iadd(a: Vector, b: Vector, c=1) -> None:
    for k, v in b.items():
        s = a.get(k, 0) + c * v
        if s:
            a[k] = s
        else:
            a.pop(k, None)


def vec_scale(a: Vector, c) -> Vector:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


class Echelon:
    """Incremental row echelon form.

    Each stored row has a pivot, its smallest key under the natural ordering
    of keys; callers rely on this to make "pivot on canonical order" choices.
    With ``track=True`` every row also remembers which rational combination
    of the added input vectors it equals, which makes :meth:`solve` possible.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.rows: Dict[Hashable, Dict[Hashable, int]] = {}
        self.combos: Dict[Hashable, Dict[int, Fraction]] = {}
        self.count = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: Vector):
        row, vscale = to_integer_row(vec)
        combo: Dict[int, Fraction] = {}
        rows = self.rows
        while True:
            hits = [k for k in row if k in rows]
            if not hits:
                break
            p = min(hits)
            prow = rows[p]
            pc = prow[p]
            rc = row[p]
            g = gcd(pc, rc)
            a, b = pc // g, rc // g
            # row <- a*row - b*prow
            new = {k: a * v for k, v in row.items()} if a != 1 else row
            for k, v in prow.items():
                s = new.get(k, 0) - b * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            row = new
            if self.track:
                if a != 1:
                    combo = {j: a * c for j, c in combo.items()}
                for j, c in self.combos[p].items():
                    s = combo.get(j, 0) + b * c
                    if s:
                        combo[j] = s
                    else:
                        combo.pop(j, None)
            vscale *= a
            if row:
                cont = _content(row)
                if cont > 1:
                    row = {k: v // cont for k, v in row.items()}
                    vscale /= cont
                    if self.track:
                        combo = {j: c / cont for j, c in combo.items()}
        return row, vscale, combo

    def add(self, vec: Vector) -> bool:
        """Insert ``vec``; return True if it was independent of the rows."""
        idx = self.count
        self.count += 1
        row, vscale, combo = self._reduce(vec)
        if not row:
            return False
        p = min(row)
        if row[p] < 0:
            row = {k: -v for k, v in row.items()}
            vscale = -vscale
            combo = {j: -c for j, c in combo.items()}
        self.rows[p] = row
        if self.track:
            # row == vscale*input_idx - sum(combo)
            c = {j: -x for j, x in combo.items()}
            c[idx] = c.get(idx, 0) + vscale
            self.combos[p] = c
        return True

    def contains(self, vec: Vector) -> bool:
        row, _, _ = self._reduce(vec)
        return not row

    def normal_form(self, vec: Vector) -> Vector:
        """Canonical representative of ``vec`` modulo the row space."""
        row, vscale, _ = self._reduce(vec)
        return {k: Fraction(v) / vscale for k, v in row.items()}

    def solve(self, vec: Vector) -> Optional[Dict[int, Fraction]]:
        """Coefficients ``x`` with ``sum x[j]*input_j == vec``, or None."""
        if not self.track:
            raise ValueError("solve() needs an Echelon built with track=True")
        row, vscale, combo = self._reduce(vec)
        if row:
            return None
        return {j: Fraction(c) / vscale for j, c in combo.items() if c}


def rank(vectors: Iterable[Vector]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def kernel(columns: List[Vector]) -> List[Dict[int, Fraction]]:
    """Basis of ``{x : sum x[i]*columns[i] == 0}`` as sparse coefficient dicts."""
    ech = Echelon(track=True)
    out = []
    for i, col in enumerate(columns):
        row, vscale, combo = ech._reduce(col)
        if row:
            ech.count = i
            ech.add(col)
        else:
            ech.count = i + 1
            k = {j: -Fraction(c) for j, c in combo.items() if c}
            k[i] = k.get(i, 0) + Fraction(vscale)
            out.append(k)
    return out


def independent_subset(vectors: List[Vector], modulo: Optional[Echelon] = None) -> List[int]:
    """Indices of a greedy maximal independent subset (optionally modulo rows)."""
    ech = modulo if modulo is not None else Echelon()
    return [i for i, v in enumerate(vectors) if ech.add(v)]


def combine(coeffs: Dict[int, Fraction], vectors: List[Vector]) -> Vector:
    out: Vector = {}
    for j, c in coeffs.items():
        vec_iadd(out, vectors[j], c)
    return out
