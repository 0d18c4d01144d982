"""Degree reduction of pseudo-Boolean polynomials to quadratic form.

Each round picks the variable pair (a, b) occurring in the most
degree->=3 monomials (ties broken by smallest pair), introduces a fresh
auxiliary variable y standing for the product a*b, rewrites those
monomials, and adds the enforcement gadget

    M * (a*b - 2*a*y - 2*b*y + 3*y)

which is 0 when y == a*b and at least M otherwise.  With the default
M = 2 * sum(|coefficients|) + 1 the minimum over auxiliary variables of
the quadratic model equals the source polynomial at every original
assignment, and the minimum is attained only with consistent auxiliaries.

Auxiliary variables are numbered after the originals, in creation order;
later substitution pairs may reference earlier auxiliaries, so the
definitions form a dependency chain that ``lift_assignment`` resolves in
order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from collections.abc import Mapping, Sequence

from .errors import VariableGuardError
from .poly import Poly, _mask_vars

_EXHAUSTIVE_AUX_GUARD = 20


@dataclass(frozen=True)
class AuxVar:
    """An auxiliary variable and the product of two earlier variables it
    stands for."""

    index: int
    pair: tuple[int, int]


@dataclass(frozen=True)
class QuboModel:
    """Quadratic model: offset + sum linear + sum quadratic, over the
    original variables followed by the auxiliaries."""

    n_vars: int
    offset: float
    linear: Mapping[int, float]
    quadratic: Mapping[tuple[int, int], float]
    aux: tuple[AuxVar, ...]
    reduction_weight: float

    @property
    def n_original(self) -> int:
        return self.n_vars - len(self.aux)

    def value(self, bits: Sequence[int]) -> float:
        if len(bits) < self.n_vars:
            raise ValueError(f"assignment covers {len(bits)} of {self.n_vars} variables")
        total = self.offset
        for v in sorted(self.linear):
            if bits[v]:
                total += self.linear[v]
        for (a, b) in sorted(self.quadratic):
            if bits[a] and bits[b]:
                total += self.quadratic[(a, b)]
        return total


def _abs_coeff_sum(p: Poly) -> float:
    total = 0.0
    for _, c in p.items():
        total += abs(c)
    return total


def default_reduction_weight(p: Poly) -> float:
    return 2.0 * _abs_coeff_sum(p) + 1.0


def quadratize(p: Poly, weight: float | None = None, n_vars: int | None = None) -> QuboModel:
    """Reduce ``p`` to a quadratic model.

    ``n_vars`` is the number of original variables (auxiliaries are
    numbered from there); it defaults to max_var + 1.  ``weight`` is the
    gadget weight M, defaulting to 2 * sum(|coeff|) + 1.
    """
    n_orig = (p.max_var + 1) if n_vars is None else n_vars
    if n_vars is not None and p.max_var >= n_vars:
        raise ValueError(f"polynomial uses q{p.max_var} but n_vars is {n_vars}")
    m_w = default_reduction_weight(p) if weight is None else float(weight)
    if not m_w > 0:
        raise ValueError(f"reduction weight must be > 0, got {m_w}")

    work: dict[int, float] = {mask: c for mask, c in p._terms.items()}
    aux: list[AuxVar] = []
    next_var = n_orig

    while True:
        big = [mask for mask in work if mask.bit_count() >= 3]
        if not big:
            break
        counts: dict[tuple[int, int], int] = {}
        for mask in big:
            vs = _mask_vars(mask)
            for x in range(len(vs)):
                for y in range(x + 1, len(vs)):
                    pair = (vs[x], vs[y])
                    counts[pair] = counts.get(pair, 0) + 1
        # Most frequent pair; ties go to the smallest pair.
        a, b = min(counts, key=lambda pr: (-counts[pr], pr))
        y = next_var
        next_var += 1
        aux.append(AuxVar(index=y, pair=(a, b)))
        ab_mask = (1 << a) | (1 << b)
        y_mask = 1 << y
        for mask in sorted(m for m in big if m & ab_mask == ab_mask):
            c = work.pop(mask)
            nm = (mask & ~ab_mask) | y_mask
            work[nm] = work.get(nm, 0.0) + c
        work[ab_mask] = work.get(ab_mask, 0.0) + m_w
        am = (1 << a) | y_mask
        bm = (1 << b) | y_mask
        work[am] = work.get(am, 0.0) - 2.0 * m_w
        work[bm] = work.get(bm, 0.0) - 2.0 * m_w
        work[y_mask] = work.get(y_mask, 0.0) + 3.0 * m_w

    offset = 0.0
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for mask, c in work.items():
        if c == 0.0:
            continue
        deg = mask.bit_count()
        if deg == 0:
            offset = c
        elif deg == 1:
            linear[mask.bit_length() - 1] = c
        else:
            vs = _mask_vars(mask)
            quadratic[(vs[0], vs[1])] = c
    return QuboModel(
        n_vars=next_var,
        offset=offset,
        linear=linear,
        quadratic=quadratic,
        aux=tuple(aux),
        reduction_weight=m_w,
    )


# -- assignments -------------------------------------------------------


def lift_assignment(model: QuboModel, bits: Sequence[int]) -> tuple[int, ...]:
    """Extend an original-variable assignment with consistent auxiliaries."""
    if len(bits) != model.n_original:
        raise ValueError(f"expected {model.n_original} original bits, got {len(bits)}")
    full = list(bits)
    for a in model.aux:
        x, y = a.pair
        full.append(full[x] * full[y])
    return tuple(full)


def project_assignment(model: QuboModel, bits: Sequence[int]) -> tuple[tuple[int, ...], bool]:
    """Strip auxiliaries; also report whether they matched their products."""
    if len(bits) != model.n_vars:
        raise ValueError(f"expected {model.n_vars} bits, got {len(bits)}")
    orig = tuple(bits[: model.n_original])
    consistent = tuple(bits) == lift_assignment(model, orig)
    return orig, consistent


def min_over_aux(model: QuboModel, bits: Sequence[int], source: Poly) -> float:
    """Exact minimum of the model over auxiliaries at fixed originals.

    When the reduction weight exceeds twice the source coefficient mass,
    any assignment violating a gadget costs more than every consistent
    one, so the minimum is the value at the consistent lift; that bound
    is checked numerically before being used.  Otherwise falls back to
    enumerating the auxiliaries (guarded)."""
    lifted = model.value(lift_assignment(model, bits))
    bound = _abs_coeff_sum(source)
    if model.reduction_weight > 2.0 * bound:
        return lifted
    n_aux = len(model.aux)
    if n_aux > _EXHAUSTIVE_AUX_GUARD:
        raise VariableGuardError(
            f"cannot enumerate {n_aux} auxiliaries (guard {_EXHAUSTIVE_AUX_GUARD}); "
            "use a reduction weight above twice the coefficient mass"
        )
    best = lifted
    head = list(bits[: model.n_original])
    for word in range(1 << n_aux):
        tail = [(word >> k) & 1 for k in range(n_aux)]
        val = model.value(head + tail)
        if val < best:
            best = val
    return best


# -- text format -------------------------------------------------------
#
#   c offset 1.5
#   c vars 2 aux 0
#   p qubo 0 2 1 1
#   0 0 -2
#   0 1 3
#
# Diagonal entries (linear terms) come first, ascending; off-diagonal
# entries follow, ascending by pair.  The sidecar JSON carries the
# auxiliary definitions and reduction weight the text format cannot.


def _fmt_coeff(x: float) -> str:
    """Shortest decimal that parses back to exactly x (integers stay bare)."""
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def export_qubo(model: QuboModel) -> str:
    lines = [
        f"c offset {_fmt_coeff(model.offset)}",
        f"c vars {model.n_original} aux {len(model.aux)}",
        f"p qubo 0 {model.n_vars} {len(model.linear)} {len(model.quadratic)}",
    ]
    for v in sorted(model.linear):
        lines.append(f"{v} {v} {_fmt_coeff(model.linear[v])}")
    for (a, b) in sorted(model.quadratic):
        lines.append(f"{a} {b} {_fmt_coeff(model.quadratic[(a, b)])}")
    return "\n".join(lines) + "\n"


def aux_sidecar(model: QuboModel) -> str:
    doc = {
        "aux": [{"id": a.index, "pair": [a.pair[0], a.pair[1]]} for a in model.aux],
        "reduction_weight": model.reduction_weight,
    }
    return json.dumps(doc, indent=2) + "\n"


_ENTRY_RE = re.compile(r"^(\d+)\s+(\d+)\s+(\S+)$")


def parse_qubo(text: str, sidecar: str | None = None) -> QuboModel:
    """Inverse of export_qubo (+ aux_sidecar): parse(export(m)) == m."""
    offset = 0.0
    n_vars = None
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c offset "):
            offset = float(line[len("c offset "):])
        elif line.startswith("c"):
            continue
        elif line.startswith("p qubo "):
            parts = line.split()
            n_vars = int(parts[3])
        else:
            m = _ENTRY_RE.match(line)
            if not m:
                raise ValueError(f"unrecognized qubo line: {line!r}")
            a, b, w = int(m.group(1)), int(m.group(2)), float(m.group(3))
            if a == b:
                linear[a] = w
            else:
                quadratic[(min(a, b), max(a, b))] = w
    if n_vars is None:
        raise ValueError("missing 'p qubo' header line")
    aux: tuple[AuxVar, ...] = ()
    weight = 0.0
    if sidecar is not None:
        doc = json.loads(sidecar)
        aux = tuple(AuxVar(index=a["id"], pair=(a["pair"][0], a["pair"][1])) for a in doc["aux"])
        weight = float(doc.get("reduction_weight", 0.0))
    return QuboModel(
        n_vars=n_vars,
        offset=offset,
        linear=linear,
        quadratic=quadratic,
        aux=aux,
        reduction_weight=weight,
    )
