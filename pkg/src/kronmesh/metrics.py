"""Quasi-uniformity metrics: fill distance, separation radius, mesh ratio.

For a prefix x_0..x_{n-1} in [0, 1] sorted ascending,

    h_n = max(left boundary, right boundary, max interior gap / 2)
    q_n = min interior gap / 2          (0 when points repeat)
    rho_n = h_n / q_n                   (+inf marker when q_n = 0)

h_n here is the sup over the whole closed domain of the distance to the
nearest point, so boundary distances enter unhalved.  For Kronecker
prefixes the module also evaluates the closed-form mesh-ratio bounds

    upper:  2 (1 - h alpha_m) / min(alpha_m, 1 - (h+1) alpha_m)
    lower:  1 / alpha_m   at n = n_m, m >= 3

as certified intervals, and can compute rho_n for astronomically large
n = n_m straight from the three-gap structure (provenance
"structure-exact") instead of from points.
"""
from __future__ import annotations

import bisect
import heapq
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .contfrac import (
    CFExpansion,
    DEFAULT_CONTEXT,
    PrecisionContext,
    alpha_tail,
    alpha_tail_best,
    digit_supremum,
)
from .errors import PrecisionUnresolvedError, UnsupportedAlphaError
from .intervals import Interval, fraction_to_decimal, interval_to_decimal
from .sequences import (
    GeneratorSpec,
    GreedyGen,
    KroneckerGen,
    PointSet,
    VdcGen,
    greedy_packing,
    kronecker,
    van_der_corput,
    working_scale_bits,
)
from .threegap import decompose, form_interval, gap_structure

INF = math.inf


@dataclass(frozen=True)
class QUMetrics:
    n: int
    fill: Fraction
    separation: Fraction
    mesh_ratio: Union[Fraction, float]  # math.inf marks duplicate points
    provenance: str                     # oracle-exact | formula-bound | structure-exact
    error_bound: Fraction = Fraction(0)

    @property
    def is_infinite(self) -> bool:
        return self.mesh_ratio == INF

    def rho_interval(self) -> Optional[Interval]:
        """Certified enclosure of the true mesh ratio, None when infinite."""
        if self.is_infinite:
            return None
        e = self.error_bound
        lo_num = max(self.fill - e, Fraction(0))
        den_hi = self.separation + e
        den_lo = self.separation - e
        if den_lo <= 0:
            raise PrecisionUnresolvedError(
                f"separation {self.separation} not resolved beyond error {e}"
            )
        return Interval(lo_num / den_hi, (self.fill + e) / den_lo)


@dataclass(frozen=True)
class BoundReport:
    n: int
    m: int
    h: int
    k: int
    upper: Interval
    lower_at_nm: Optional[Interval]
    lower_digit_form: Optional[Fraction]
    global_upper: Optional[int]


@dataclass(frozen=True)
class SortedGaps:
    points: Tuple[Fraction, ...]
    gaps: Tuple[Fraction, ...]
    left: Fraction
    right: Fraction
    error_bound: Fraction
    source: PointSet


def sorted_gaps(ps: PointSet) -> SortedGaps:
    """Sort the prefix and return interior gaps plus boundary distances.

    For approximate (Kronecker) points the ordering is certified: precision
    escalates until every interior gap exceeds twice the per-point error, so
    the sorted order of the stored values is the true order.
    """
    if ps.n < 1:
        raise ValueError("empty point set")
    cur = ps
    while True:
        pts = sorted(cur.points)
        gaps = tuple(b - a for a, b in zip(pts, pts[1:]))
        e = cur.error_bound
        if e == 0 or all(g > 2 * e for g in gaps):
            return SortedGaps(tuple(pts), gaps, pts[0], 1 - pts[-1], e, cur)
        cfg = cur.config
        if cfg is None:
            raise PrecisionUnresolvedError(
                "point order ambiguous within the stored error bound and the "
                "set carries no generator to regenerate from"
            )
        nxt = cur.regenerate(2 * cfg.scale_bits)
        if nxt.error_bound >= cur.error_bound:
            raise PrecisionUnresolvedError(
                f"point order ambiguous at error {float(cur.error_bound):.3e} "
                "and regeneration cannot reduce it (digit prefix exhausted?)"
            )
        cur = nxt


def fill_distance(ps: PointSet) -> Fraction:
    sg = sorted_gaps(ps)
    return _fill_of(sg)


def _fill_of(sg: SortedGaps) -> Fraction:
    worst = max(sg.left, sg.right)
    if sg.gaps:
        worst = max(worst, max(sg.gaps) / 2)
    return worst


def separation_radius(ps: PointSet) -> Fraction:
    if ps.n < 2:
        raise ValueError("separation radius needs n >= 2")
    sg = sorted_gaps(ps)
    return min(sg.gaps) / 2


def mesh_ratio(ps: PointSet) -> QUMetrics:
    """rho_n = h_n / q_n from the actual points (provenance oracle-exact)."""
    if ps.n < 2:
        raise ValueError("mesh ratio needs n >= 2")
    sg = sorted_gaps(ps)
    fill = _fill_of(sg)
    sep = min(sg.gaps) / 2
    rho = INF if sep == 0 else fill / sep
    return QUMetrics(ps.n, fill, sep, rho, "oracle-exact", sg.error_bound)


# ---------------------------------------------------------------------------
# closed-form bounds for Kronecker prefixes


def _as_expansion(alpha) -> CFExpansion:
    if isinstance(alpha, CFExpansion):
        return alpha
    return CFExpansion(alpha)


def _tail_best(exp, m: int, bits: int, ctx: PrecisionContext):
    """alpha_m at the requested bits, or the widest enclosure the digit
    prefix supports.  Returns (interval, bits actually achieved); achieved
    < requested signals that escalation cannot help."""
    try:
        return alpha_tail(exp, m, PrecisionContext(bits, ctx.max_bits, ctx.guard)), bits
    except PrecisionUnresolvedError:
        iv = alpha_tail_best(exp, m, PrecisionContext(64, ctx.max_bits, ctx.guard))
        if iv.width == 0:
            return iv, bits
        w = iv.width
        achieved = max(1, (w.denominator // w.numerator).bit_length() - 1)
        return iv, min(achieved, bits - 1)


def kronecker_bounds(
    exp, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> BoundReport:
    """Certified mesh-ratio bounds for the first n Kronecker points."""
    exp = _as_expansion(exp)
    if exp.is_rational:
        raise UnsupportedAlphaError("mesh-ratio bounds need irrational alpha")
    d = decompose(exp, n)
    bits = ctx.bits
    while True:
        am, got = _tail_best(exp, d.m, bits, ctx)
        den = am.min_with(am.scale(-(d.h + 1)).shift(1))
        if den.lo > 0:
            break
        if got < bits or bits >= ctx.max_bits:
            raise PrecisionUnresolvedError(
                f"bound denominator sign unresolved at {got} bits (n={n})"
            )
        bits = min(2 * bits, ctx.max_bits)
    num = am.scale(-d.h).shift(1).scale(2)
    upper = num / den

    lower = None
    digit_form = None
    if d.m >= 3 and d.h == 0 and d.k == 0:
        lower = am.reciprocal()
        digit_form = Fraction(exp.digit(d.m + 1)) + Fraction(1, exp.digit(d.m + 2))

    sup, certainty = digit_supremum(exp)
    global_upper = 2 + 2 * sup if certainty == "exact" else None
    return BoundReport(n, d.m, d.h, d.k, upper, lower, digit_form, global_upper)


# ---------------------------------------------------------------------------
# structure-exact metrics (no points materialized)


def mesh_ratio_structural(
    exp, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> QUMetrics:
    """Mesh ratio of a Kronecker prefix straight from the gap structure.

    The gap multiset determines everything except which gap is the one
    touching 1 (it enters the fill distance unhalved while interior gaps are
    halved).  That gap follows from the parity of m: for odd m the last gap
    is eta_m; for even m it is eta_{m-1} - j*eta_m with j = h when k = 0 and
    j = h + 1 otherwise.  The rule is cross-checked against point-based
    metrics in the test suite over every feasible n.
    """
    if n < 2:
        raise ValueError("mesh ratio needs n >= 2")
    exp = _as_expansion(exp)
    gs = gap_structure(exp, n)
    d = gs.decomposition
    entries = list(gs.entries)
    if d.m % 2 == 1:
        last_idx = 0
    else:
        last_idx = 1 if d.k == 0 else 2
    last_form, last_count = entries[last_idx]
    assert last_count > 0, (n, d)
    interior = [
        (form, count - (i == last_idx))
        for i, (form, count) in enumerate(entries)
    ]
    present = [form for form, count in interior if count > 0]
    assert present, (n, d)

    order = _order_forms(exp, present, ctx)
    maxint = _pick_extreme(present, order, largest=True)
    minint = _pick_extreme(present, order, largest=False)

    # fill = max(max interior gap, 2 * last gap) / 2; left boundary is a point
    fill_iv = form_interval(exp, maxint, ctx, require_positive=True).max_with(
        form_interval(exp, last_form.scale(2), ctx, require_positive=True)
    ).scale(Fraction(1, 2))
    sep_iv = form_interval(exp, minint, ctx, require_positive=True).scale(Fraction(1, 2))
    rho_iv = fill_iv / sep_iv
    err = max(fill_iv.width, sep_iv.width, rho_iv.width) / 2
    return QUMetrics(
        n, fill_iv.mid, sep_iv.mid, rho_iv.mid, "structure-exact", err
    )


def _order_forms(exp, forms, ctx) -> dict:
    """Map each distinct (u, v) to its rank among the forms' true values,
    escalating precision until distinct forms separate."""
    uniq = {}
    for f in forms:
        uniq[(f.u, f.v)] = f
    keys = list(uniq)
    bits = ctx.bits
    while True:
        ivs = {key: uniq[key].enclosure(exp, bits) for key in keys}
        ordered = sorted(keys, key=lambda key: ivs[key].lo)
        ok = all(
            ivs[a].hi < ivs[b].lo
            for a, b in zip(ordered, ordered[1:])
        )
        if ok:
            return {key: rank for rank, key in enumerate(ordered)}
        if bits >= ctx.max_bits:
            raise PrecisionUnresolvedError("gap-length ordering unresolved")
        bits = min(2 * bits, ctx.max_bits)


def _pick_extreme(forms, order, largest: bool):
    ranked = sorted(forms, key=lambda f: order[(f.u, f.v)])
    return ranked[-1] if largest else ranked[0]


# ---------------------------------------------------------------------------
# incremental sweeps


@dataclass(frozen=True)
class SweepRow:
    metrics: QUMetrics
    bounds: Optional[BoundReport]


class _IncrementalMesh:
    """Sorted point list plus a gap multiset with lazy min/max heaps.

    Works over any exactly ordered value type (ints at a fixed scale,
    Fractions); insertion keeps both neighbors' gap bookkeeping exact, so
    the sweep is equivalent to recomputing from scratch at every n.
    """

    def __init__(self, total):
        self.total = total
        self.pts: list = []
        self.gapcount: Counter = Counter()
        self._maxheap: list = []
        self._minheap: list = []

    def insert(self, x) -> None:
        i = bisect.bisect_left(self.pts, x)
        left = self.pts[i - 1] if i > 0 else None
        right = self.pts[i] if i < len(self.pts) else None
        if left is not None and right is not None:
            g = right - left
            c = self.gapcount[g] - 1
            if c:
                self.gapcount[g] = c
            else:
                del self.gapcount[g]
        if left is not None:
            self._add_gap(x - left)
        if right is not None:
            self._add_gap(right - x)
        self.pts.insert(i, x)

    def _add_gap(self, g) -> None:
        self.gapcount[g] += 1
        heapq.heappush(self._maxheap, -g)
        heapq.heappush(self._minheap, g)

    def max_gap(self):
        h = self._maxheap
        while h and not self.gapcount.get(-h[0]):
            heapq.heappop(h)
        return -h[0] if h else None

    def min_gap(self):
        h = self._minheap
        while h and not self.gapcount.get(h[0]):
            heapq.heappop(h)
        return h[0] if h else None

    def boundaries(self):
        return self.pts[0], self.total - self.pts[-1]


def _metrics_from_mesh(mesh: _IncrementalMesh, n: int, scale, err: Fraction,
                       provenance: str) -> QUMetrics:
    left, right = mesh.boundaries()
    maxg = mesh.max_gap()
    ming = mesh.min_gap()
    fill_num = max(2 * left, 2 * right, maxg)
    fill = Fraction(fill_num, 2 * scale)
    sep = Fraction(ming, 2 * scale)
    rho = INF if ming == 0 else Fraction(fill_num, ming)
    return QUMetrics(n, fill, sep, rho, provenance, err)


def sweep(
    gen: GeneratorSpec,
    n_lo: int,
    n_hi: int,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    with_bounds: bool = True,
) -> List[SweepRow]:
    """Metrics for every n in [n_lo, n_hi], maintained incrementally.

    Kronecker sweeps over an irrational alpha also carry the closed-form
    bound report per n when with_bounds is set.
    """
    if n_lo < 2:
        raise ValueError("sweep needs n_lo >= 2 (mesh ratio undefined at n = 1)")
    if n_hi < n_lo:
        raise ValueError("empty sweep range")
    if isinstance(gen, KroneckerGen):
        exp = _as_expansion(gen.alpha)
        if not exp.is_rational:
            return _sweep_kronecker(exp, n_lo, n_hi, ctx, with_bounds)
        # rational rotation: exact points, no closed-form bounds
        pts = iter(kronecker(gen.alpha, n_hi, ctx).points)
    elif isinstance(gen, VdcGen):
        pts = iter(van_der_corput(gen.base, n_hi).points)
    elif isinstance(gen, GreedyGen):
        pts = iter(greedy_packing(n_hi, gen.tie_break).points)
    else:
        raise ValueError(f"unknown generator spec {gen!r}")
    mesh = _IncrementalMesh(Fraction(1))
    rows = []
    for i, x in enumerate(pts):
        mesh.insert(x)
        n = i + 1
        if n >= n_lo:
            rows.append(
                SweepRow(_metrics_from_mesh(mesh, n, 1, Fraction(0), "oracle-exact"), None)
            )
    return rows


def _sweep_kronecker(exp, n_lo, n_hi, ctx, with_bounds) -> List[SweepRow]:
    bits = working_scale_bits(ctx, n_hi)
    while True:
        try:
            return _sweep_kronecker_at(exp, n_lo, n_hi, ctx, bits, with_bounds)
        except PrecisionUnresolvedError:
            if bits >= ctx.max_bits:
                raise
            bits = min(2 * bits, ctx.max_bits)


def _sweep_kronecker_at(exp, n_lo, n_hi, ctx, scale_bits, with_bounds):
    A, U = exp.alpha0_scaled(scale_bits)
    M = 1 << scale_bits
    mesh = _IncrementalMesh(M)
    mesh.insert(0)
    rows = []
    x = 0
    for i in range(1, n_hi):
        x += A
        if x >= M:
            x -= M
        if x + i * U >= M:
            raise PrecisionUnresolvedError(
                f"point {i} straddles an integer at scale 2**{scale_bits}"
            )
        mesh.insert(x)
        n = i + 1
        if n < n_lo:
            continue
        drift = i * U
        ming = mesh.min_gap()
        if ming <= 2 * drift:
            raise PrecisionUnresolvedError(
                f"gap of {ming} at scale 2**{scale_bits} is inside the drift "
                f"margin {2 * drift} at n={n}"
            )
        qm = _metrics_from_mesh(mesh, n, M, Fraction(drift, M), "oracle-exact")
        br = kronecker_bounds(exp, n, ctx) if with_bounds else None
        rows.append(SweepRow(qm, br))
    return rows


# ---------------------------------------------------------------------------
# serialization


SWEEP_COLUMNS = (
    "n,h_n,q_n,rho_n,upper_bound_lo,upper_bound_hi,"
    "lower_bound_lo,lower_bound_hi,global_upper"
)


def _rho_str(qm: QUMetrics, digits: int) -> str:
    if qm.is_infinite:
        return "inf"
    return fraction_to_decimal(qm.mesh_ratio, digits)


def sweep_to_csv(rows: List[SweepRow], digits: int = 40) -> str:
    lines = [SWEEP_COLUMNS]
    for row in rows:
        qm = row.metrics
        cells = [
            str(qm.n),
            fraction_to_decimal(qm.fill, digits),
            fraction_to_decimal(qm.separation, digits),
            _rho_str(qm, digits),
        ]
        br = row.bounds
        if br is not None:
            up_lo, up_hi = interval_to_decimal(br.upper, digits)
            cells += [up_lo, up_hi]
            if br.lower_at_nm is not None:
                lo_lo, lo_hi = interval_to_decimal(br.lower_at_nm, digits)
                cells += [lo_lo, lo_hi]
            else:
                cells += ["", ""]
            cells.append("" if br.global_upper is None else str(br.global_upper))
        else:
            cells += ["", "", "", "", ""]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def metrics_to_json(qm: QUMetrics, br: Optional[BoundReport], digits: int = 40) -> dict:
    out = {
        "n": qm.n,
        "fill": fraction_to_decimal(qm.fill, digits),
        "separation": fraction_to_decimal(qm.separation, digits),
        "mesh_ratio": _rho_str(qm, digits),
        "provenance": qm.provenance,
    }
    if br is not None:
        out["bounds"] = bound_report_to_json(br, digits)
    return out


def bound_report_to_json(br: BoundReport, digits: int = 40) -> dict:
    up = interval_to_decimal(br.upper, digits)
    out = {
        "n": br.n,
        "m": br.m,
        "h": br.h,
        "k": br.k,
        "upper": [up[0], up[1]],
    }
    if br.lower_at_nm is not None:
        lo = interval_to_decimal(br.lower_at_nm, digits)
        out["lower_at_nm"] = [lo[0], lo[1]]
        out["lower_digit_form"] = fraction_to_decimal(br.lower_digit_form, digits)
    else:
        out["lower_at_nm"] = None
        out["lower_digit_form"] = None
    out["global_upper"] = br.global_upper
    return out
