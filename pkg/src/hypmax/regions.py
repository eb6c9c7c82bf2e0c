"""The (1/p, Re alpha) boundedness map for the fractional spherical maximal operator.

Three boundaries are tracked:

* necessary: below it the operator is proven unbounded;
* Kohen's sufficient boundary;
* the improved sufficient boundary for 2 < p, with its kink at 1/p = 1/p_n.

Each boundary value carries whether the condition is strict (``>``) or not
(``>=``), since points on a boundary classify differently.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .geometry import Dimension, as_dimension


class Status(enum.Enum):
    PROVEN_BOUNDED = "PROVEN_BOUNDED"
    PROVEN_UNBOUNDED = "PROVEN_UNBOUNDED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Bound:
    value: float
    strict: bool
    name: str


@dataclass(frozen=True)
class RegionQuery:
    n: Dimension
    p: float
    alpha_re: float

    def __post_init__(self):
        object.__setattr__(self, "n", as_dimension(self.n))
        if not self.p > 1:
            raise DomainError("p must exceed 1")

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.p) else 1.0 / self.p


@dataclass(frozen=True)
class Verdict:
    status: Status
    binding_constraint: str
    p_infinite: bool = False

    def to_json(self, q: RegionQuery) -> dict:
        return {"n": q.n.n, "p": q.p, "alpha": q.alpha_re, "status": self.status.value,
                "binding_constraint": self.binding_constraint,
                "p_infinite": self.p_infinite}


def _p_critical_exact(n: int) -> Fraction:
    return Fraction(4) if n == 2 else Fraction(2 * (n + 1), n - 1)


def p_critical(n) -> float:
    return float(_p_critical_exact(as_dimension(n).n))


def _check_inv_p(inv_p, lo_closed=False):
    ok = (0 <= inv_p < 1) if lo_closed else (0 < inv_p < 1)
    if not ok:
        raise DomainError(f"1/p = {inv_p} outside the admissible range")


def necessary_bound(inv_p, n) -> Bound:
    """Largest alpha-threshold below which unboundedness is proven."""
    _check_inv_p(inv_p, lo_closed=True)
    n = as_dimension(n).n
    if inv_p >= 0.5:
        return Bound(1 - n + n * inv_p, True, "alpha > 1-n+n/p (cone family, p <= 2)")
    slab = inv_p - (n - 1) / 2
    shell = -(n - 1) * inv_p
    if slab >= shell:
        return Bound(slab, False, "alpha >= 1/p-(n-1)/2 (slab family)")
    return Bound(shell, False, "alpha >= -(n-1)/p (annulus family)")


def necessary_boundary(inv_p, n) -> float:
    return necessary_bound(inv_p, n).value


def kohen_bound(inv_p, n) -> Bound:
    _check_inv_p(inv_p, lo_closed=True)
    n = as_dimension(n).n
    if inv_p >= 0.5:
        return Bound(1 - n + n * inv_p, True, "Re alpha > 1-n+n/p (Kohen, p <= 2)")
    return Bound((2 - n) * inv_p, True, "Re alpha > (2-n)/p (Kohen, p > 2)")


def kohen_sufficient_boundary(inv_p, n) -> float:
    return kohen_bound(inv_p, n).value


def new_bound(inv_p, n) -> Bound:
    _check_inv_p(inv_p, lo_closed=True)
    if inv_p >= 0.5:
        return kohen_bound(inv_p, n)
    dim = as_dimension(n).n
    # Fraction input keeps the whole evaluation exact
    pn = _p_critical_exact(dim)
    if not isinstance(inv_p, Fraction):
        pn = float(pn)
    first = (2 - dim) * inv_p - inv_p / pn
    second = (2 - dim) * inv_p - (1 - 2 * inv_p) / (pn * (pn - 2))
    if first >= second:
        return Bound(first, True, "Re alpha > (2-n)/p - 1/(p p_n) (p >= p_n)")
    return Bound(second, True, "Re alpha > (2-n)/p - (p-2)/(p p_n (p_n-2)) (2 < p < p_n)")


def new_sufficient_boundary(inv_p, n) -> float:
    return new_bound(inv_p, n).value


def classify(q: RegionQuery) -> Verdict:
    x, a = q.inv_p, q.alpha_re
    inf = math.isinf(q.p)
    suff = new_bound(x, q.n)
    nec = necessary_bound(x, q.n)
    if a > suff.value:
        return Verdict(Status.PROVEN_BOUNDED, suff.name, inf)
    violated = a <= nec.value if nec.strict else a < nec.value
    if violated:
        return Verdict(Status.PROVEN_UNBOUNDED, nec.name, inf)
    return Verdict(Status.UNKNOWN, f"between [{nec.name}] and [{suff.name}]", inf)


def anchors(n) -> dict:
    """Exact anchor points of the (1/p, alpha) diagram as Fractions."""
    n = as_dimension(n).n
    pn = _p_critical_exact(n)
    return {
        "O": (Fraction(0), Fraction(0)),
        "C": (1 / pn, (2 - n) / pn - 1 / pn ** 2),
        "D": (Fraction(n - 1, 2 * n), -Fraction((n - 1) ** 2, 2 * n)),
        "B": (Fraction(1, 2), Fraction(2 - n, 2)),
        "A": (Fraction(1), Fraction(1)),
    }


def region_rows(n, inv_p_grid) -> list[tuple]:
    """Rows (inv_p, necessary, kohen, new_sufficient) on the grid plus the anchors.

    Anchor abscissae are merged into the grid so the piecewise-linear curves
    pass through them exactly; at 1/p = 1 the necessary and Kohen values are
    the limit 1 of 1-n+n/p.
    """
    grid = np.asarray(inv_p_grid, dtype=float)
    if np.any((grid <= 0) | (grid >= 1)):
        raise DomainError("grid must lie in (0, 1)")
    exact = {float(v[0]): v[0] for v in anchors(n).values()}
    xs = sorted(set(grid.tolist()) | set(exact))
    rows = []
    for x in xs:
        if x >= 1.0:
            rows.append((x, 1.0, 1.0, 1.0))
            continue
        xe = exact.get(x, x)
        vals = (necessary_boundary(xe, n), kohen_sufficient_boundary(xe, n),
                new_sufficient_boundary(xe, n))
        # + 0.0 turns -0.0 at the origin into 0.0
        rows.append((x,) + tuple(float(v) + 0.0 for v in vals))
    return rows


def emit_region_csv(n, inv_p_grid, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    labels = {float(v[0]): k for k, v in anchors(n).items()}
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["inv_p", "necessary", "kohen", "new_sufficient", "anchor"])
    for row in region_rows(n, inv_p_grid):
        w.writerow([repr(float(v)) for v in row] + [labels.get(row[0], "")])
    return buf.getvalue()


def read_region_csv(text: str):
    """(numeric rows, anchor labels) from emitted region CSV text."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines))[1:]
    return np.array([[float(v) for v in r[:4]] for r in rows]), [r[4] for r in rows]


def verdict_dict(q: RegionQuery) -> dict:
    v = classify(q)
    out = v.to_json(q)
    out["bounds"] = {"necessary": asdict(necessary_bound(q.inv_p, q.n)),
                     "sufficient": asdict(new_bound(q.inv_p, q.n))}
    return out
