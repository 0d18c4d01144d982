"""Multilinear pseudo-Boolean polynomials over 0/1 variables.

A polynomial is stored as a map from monomial to coefficient, where a
monomial is the set of variables it multiplies, encoded as an integer
bitmask (bit v set means variable v is a factor).  Because variables only
take the values 0 and 1, q*q = q, so products of monomials are bitmask
unions and every polynomial has a unique multilinear normal form.  Terms
whose coefficient becomes exactly 0.0 are dropped.

Evaluation, export and any other coefficient traversal run in a fixed
canonical order (ascending degree, then lexicographic variable tuples) so
that floating-point results are reproducible run to run.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

# Above this many coefficient pairs, products go through the vectorized
# path.  Both paths generate pair products in the same row-major order and
# accumulate per-monomial sums in that same order, so they produce
# bit-identical coefficients.
_VECTOR_MUL_CUTOFF = 4096


def _mask_vars(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


class Poly:
    """Immutable multilinear polynomial with float64 coefficients."""

    __slots__ = ("_terms", "_canon")

    def __init__(self, terms: Mapping[int, float] | None = None) -> None:
        clean: dict[int, float] = {}
        if terms:
            for mask, coeff in terms.items():
                c = float(coeff)
                if c != 0.0:
                    clean[int(mask)] = c
        self._terms: dict[int, float] = clean
        self._canon: tuple[tuple[int, float], ...] | None = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> Poly:
        return cls()

    @classmethod
    def one(cls) -> Poly:
        return cls({0: 1.0})

    @classmethod
    def constant(cls, c: float) -> Poly:
        return cls({0: float(c)})

    @classmethod
    def variable(cls, v: int) -> Poly:
        if v < 0:
            raise ValueError(f"variable index must be >= 0, got {v}")
        return cls({1 << v: 1.0})

    @classmethod
    def from_terms(cls, terms: Mapping[Iterable[int], float]) -> Poly:
        """Build from {variable tuple: coefficient}; duplicate vars collapse."""
        acc: dict[int, float] = {}
        for vs, coeff in terms.items():
            mask = 0
            for v in vs:
                if v < 0:
                    raise ValueError(f"variable index must be >= 0, got {v}")
                mask |= 1 << v
            acc[mask] = acc.get(mask, 0.0) + float(coeff)
        return cls(acc)

    # -- canonical views ----------------------------------------------

    def _canonical(self) -> tuple[tuple[int, float], ...]:
        if self._canon is None:
            order = sorted(self._terms, key=lambda m: (m.bit_count(), _mask_vars(m)))
            self._canon = tuple((m, self._terms[m]) for m in order)
        return self._canon

    def items(self) -> list[tuple[tuple[int, ...], float]]:
        """Canonically ordered (variables, coefficient) pairs."""
        return [(_mask_vars(m), c) for m, c in self._canonical()]

    def coefficient(self, vs: Iterable[int]) -> float:
        mask = 0
        for v in vs:
            mask |= 1 << v
        return self._terms.get(mask, 0.0)

    @property
    def offset(self) -> float:
        """Coefficient of the empty monomial."""
        return self._terms.get(0, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {0: 1.0}

    @property
    def degree(self) -> int:
        """Largest monomial size; 0 for constants and the zero polynomial."""
        if not self._terms:
            return 0
        return max(m.bit_count() for m in self._terms)

    @property
    def max_var(self) -> int:
        """Largest variable index mentioned, or -1 if none."""
        top = 0
        for m in self._terms:
            top |= m
        return top.bit_length() - 1

    def variables(self) -> tuple[int, ...]:
        top = 0
        for m in self._terms:
            top |= m
        return _mask_vars(top)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Poly | float) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0.0) + c
        return Poly(acc)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Poly | float) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other: float) -> Poly:
        return Poly.constant(other) + (-self)

    def __mul__(self, other: Poly | float) -> Poly:
        if not isinstance(other, Poly):
            c = float(other)
            if c == 0.0:
                return Poly.zero()
            return Poly({m: k * c for m, k in self._terms.items()})
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly.zero()
        if len(a) * len(b) >= _VECTOR_MUL_CUTOFF and self.max_var < 63 and other.max_var < 63:
            return self._mul_vector(other)
        acc: dict[int, float] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = m1 | m2
                acc[m] = acc.get(m, 0.0) + c1 * c2
        return Poly(acc)

    __rmul__ = __mul__

    def _mul_vector(self, other: Poly) -> Poly:
        am = np.fromiter(self._terms.keys(), dtype=np.uint64, count=len(self._terms))
        ac = np.fromiter(self._terms.values(), dtype=np.float64, count=len(self._terms))
        bm = np.fromiter(other._terms.keys(), dtype=np.uint64, count=len(other._terms))
        bc = np.fromiter(other._terms.values(), dtype=np.float64, count=len(other._terms))
        masks = np.bitwise_or.outer(am, bm).ravel()
        coeffs = np.multiply.outer(ac, bc).ravel()
        uniq, inv = np.unique(masks, return_inverse=True)
        sums = np.bincount(inv, weights=coeffs, minlength=len(uniq))
        return Poly({int(m): s for m, s in zip(uniq, sums) if s != 0.0})

    def __truediv__(self, scalar: float) -> Poly:
        s = float(scalar)
        return Poly({m: c / s for m, c in self._terms.items()})

    def __pow__(self, n: int) -> Poly:
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {n!r}")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def complement(self) -> Poly:
        """1 - p, the standard negation of a 0/1 quantity."""
        return Poly.constant(1.0) - self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:  # pragma: no cover - not used as dict key
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "Poly(0)"
        parts = []
        for vs, c in self.items()[:8]:
            mono = "*".join(f"q{v}" for v in vs) if vs else "1"
            parts.append(f"{c:g}*{mono}")
        tail = " + ..." if len(self._terms) > 8 else ""
        return f"Poly({' + '.join(parts)}{tail})"

    # -- evaluation and substitution ----------------------------------

    def eval(self, bits: Sequence[int]) -> float:
        """Evaluate at an assignment, bits[v] being the value of variable v.

        Raises ValueError if the polynomial mentions a variable the
        assignment does not cover.
        """
        top = self.max_var
        if top >= len(bits):
            raise ValueError(
                f"assignment covers {len(bits)} variables but the polynomial uses q{top}"
            )
        amask = 0
        for v, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"assignment values must be 0 or 1, got {b!r} at {v}")
            if b:
                amask |= 1 << v
        total = 0.0
        for m, c in self._canonical():
            if m & amask == m:
                total += c
        return total

    def substitute(self, fixes: Mapping[int, int]) -> Poly:
        """Fix a subset of variables to constants; other indices are kept."""
        ones = 0
        zeros = 0
        for v, b in fixes.items():
            if b == 1:
                ones |= 1 << v
            elif b == 0:
                zeros |= 1 << v
            else:
                raise ValueError(f"substituted values must be 0 or 1, got {b!r}")
        acc: dict[int, float] = {}
        for m, c in self._canonical():
            if m & zeros:
                continue
            nm = m & ~ones
            acc[nm] = acc.get(nm, 0.0) + c
        return Poly(acc)


# -- polynomial document format ---------------------------------------
#
# { "offset": <constant term>,
#   "terms": [ {"vars": [0, 3], "coeff": -2.5}, ... ] }
#
# Terms are sorted by (degree, variable tuple); coefficients round-trip
# through repr.


def to_hubo_doc(p: Poly) -> dict:
    terms = [
        {"vars": list(vs), "coeff": c}
        for vs, c in p.items()
        if vs
    ]
    return {"offset": p.offset, "terms": terms}


def from_hubo_doc(doc: Mapping) -> Poly:
    acc: dict[int, float] = {}
    offset = float(doc.get("offset", 0.0))
    if offset != 0.0:
        acc[0] = offset
    for t in doc.get("terms", []):
        mask = 0
        for v in t["vars"]:
            mask |= 1 << int(v)
        acc[mask] = acc.get(mask, 0.0) + float(t["coeff"])
    return Poly(acc)


def hubo_dumps(p: Poly, annotate: Mapping | None = None) -> str:
    doc = dict(annotate) if annotate else {}
    doc.update(to_hubo_doc(p))
    return json.dumps(doc, indent=2) + "\n"


def hubo_loads(text: str) -> Poly:
    return from_hubo_doc(json.loads(text))


# -- assignment helpers ------------------------------------------------


def bits_from_string(s: str) -> tuple[int, ...]:
    if any(ch not in "01" for ch in s):
        raise ValueError(f"bit string may contain only 0 and 1, got {s!r}")
    return tuple(int(ch) for ch in s)


def bits_to_string(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)
