"""Point-prefix generators: Kronecker, van der Corput, greedy packing.

Points are exact Fractions.  Kronecker points of an irrational alpha are
dyadic approximations carrying a certificate: each stored value differs
from the true point by less than 2**-precision_bits, and the resolution is
escalated until no i*alpha straddles an integer at the working scale.  Van
der Corput and greedy points are exact rationals (precision_bits = None).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .contfrac import (
    AlphaSpec,
    CFExpansion,
    DEFAULT_CONTEXT,
    PrecisionContext,
    Rational,
    alpha_to_string,
)
from .errors import PrecisionUnresolvedError
from .intervals import fraction_to_decimal


@dataclass(frozen=True)
class KroneckerGen:
    alpha: AlphaSpec

    def describe(self) -> str:
        return f"kronecker alpha={alpha_to_string(self.alpha)}"


@dataclass(frozen=True)
class VdcGen:
    base: int

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 2:
            raise ValueError(f"van der Corput base must be an integer >= 2, got {self.base!r}")

    def describe(self) -> str:
        return f"vdc base={self.base}"


@dataclass(frozen=True)
class GreedyGen:
    tie_break: str = "leftmost"

    def __post_init__(self):
        if self.tie_break not in ("leftmost", "rightmost"):
            raise ValueError(f"tie_break must be leftmost or rightmost, got {self.tie_break!r}")

    def describe(self) -> str:
        return f"greedy tie_break={self.tie_break}"


GeneratorSpec = object  # KroneckerGen | VdcGen | GreedyGen


@dataclass(frozen=True)
class PointSet:
    """An index-ordered prefix of a sequence in [0, 1].

    error_bound is a certified per-point absolute error (0 for exact
    rationals); precision_bits is None when points are exact.
    """

    points: Tuple[Fraction, ...]
    n: int
    precision_bits: Optional[int]
    generator_tag: str
    error_bound: Fraction = Fraction(0)
    config: Optional[object] = field(default=None, compare=False)

    def prefix(self, k: int) -> "PointSet":
        if not 1 <= k <= self.n:
            raise ValueError(f"prefix length {k} outside [1, {self.n}]")
        return PointSet(
            self.points[:k], k, self.precision_bits, self.generator_tag,
            self.error_bound, self.config,
        )

    def regenerate(self, bits: int) -> "PointSet":
        """Same prefix at a higher working precision (Kronecker only)."""
        if not isinstance(self.config, _KroneckerRun):
            return self
        cfg = self.config
        return _kronecker_at_scale(cfg.exp, self.n, cfg.ctx, bits)


@dataclass(frozen=True)
class _KroneckerRun:
    exp: CFExpansion
    ctx: PrecisionContext
    scale_bits: int


def working_scale_bits(ctx: PrecisionContext, n: int) -> int:
    """Scale exponent B used for i*alpha mod 1 at prefix length n: leaves
    room for the per-point drift i*U and a wrap-detection margin."""
    return ctx.bits + max(n - 1, 1).bit_length() + 16


def kronecker_scaled(
    exp: CFExpansion, n: int, scale_bits: int
) -> Tuple[list, int, int]:
    """(X, M, U) with X[i] = i*A mod M, M = 2**scale_bits, such that the true
    i*alpha mod 1 lies in [X[i]/M, (X[i] + i*U)/M] with no integer straddle.

    Raises PrecisionUnresolvedError when some multiple straddles an integer
    at this scale (caller escalates), or when a digit prefix cannot support
    the scale at all.
    """
    A, U = exp.alpha0_scaled(scale_bits)
    M = 1 << scale_bits
    xs = [0] * n
    x = 0
    for i in range(1, n):
        x += A
        if x >= M:
            x -= M
        if x + i * U >= M:
            raise PrecisionUnresolvedError(
                f"point {i} straddles an integer at scale 2**{scale_bits}"
            )
        xs[i] = x
    return xs, M, U


def kronecker(
    alpha: AlphaSpec, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT,
    scale_bits: Optional[int] = None,
) -> PointSet:
    """x_i = i*alpha mod 1 for i = 0..n-1; x_0 = 0 exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    spec = alpha.spec if isinstance(alpha, CFExpansion) else alpha
    if isinstance(spec, Rational):
        fr = spec.as_fraction()
        p, q = fr.numerator, fr.denominator
        pts = tuple(Fraction((i * p) % q, q) for i in range(n))
        return PointSet(pts, n, None, "kronecker", Fraction(0), None)
    exp = alpha if isinstance(alpha, CFExpansion) else CFExpansion(alpha)
    bits = scale_bits if scale_bits is not None else working_scale_bits(ctx, n)
    return _kronecker_at_scale(exp, n, ctx, bits)


def _kronecker_at_scale(
    exp: CFExpansion, n: int, ctx: PrecisionContext, scale_bits: int
) -> PointSet:
    bits = scale_bits
    while True:
        try:
            xs, M, U = kronecker_scaled(exp, n, bits)
            break
        except PrecisionUnresolvedError:
            if bits >= ctx.max_bits:
                raise
            bits = min(2 * bits, ctx.max_bits)
    pts = tuple(Fraction(x, M) for x in xs)
    err = Fraction(max(n - 1, 1) * U, M)
    if err <= Fraction(1, 1 << ctx.bits):
        prec = ctx.bits
    else:
        # widest honest tag: 2**-prec still bounds err from above
        prec = max(1, (err.denominator // err.numerator).bit_length() - 1)
    return PointSet(
        pts, n, prec, "kronecker", err, _KroneckerRun(exp, ctx, bits)
    )


def _radical_inverse(i: int, base: int) -> Fraction:
    num, den = 0, 1
    while i:
        i, d = divmod(i, base)
        num = num * base + d
        den *= base
    return Fraction(num, den)


def van_der_corput(base: int, n: int) -> PointSet:
    """Digit-reversal radical inverse of 0..n-1 in the given base."""
    VdcGen(base)  # validates
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = tuple(_radical_inverse(i, base) for i in range(n))
    return PointSet(pts, n, None, "vdc", Fraction(0), None)


def greedy_packing(n: int, tie_break: str = "leftmost") -> PointSet:
    """Farthest-point packing of [0, 1] starting from 1/2.

    Each new point maximizes the distance to the nearest placed point over
    the whole closed interval; candidates are the endpoints 0 and 1 (at
    their full distance to the nearest point) and midpoints of empty
    intervals (at half the interval length).  Ties go to the leftmost or
    rightmost candidate position.
    """
    GreedyGen(tie_break)  # validates
    if n < 1:
        raise ValueError("n must be >= 1")
    chosen = [Fraction(1, 2)]
    placed = [Fraction(1, 2)]  # kept sorted
    leftmost = tie_break == "leftmost"
    for _ in range(1, n):
        best_dist = None
        best_pos = None
        cands = [(placed[0], Fraction(0)), (1 - placed[-1], Fraction(1))]
        for a, b in zip(placed, placed[1:]):
            cands.append(((b - a) / 2, (a + b) / 2))
        for dist, pos in cands:
            if (
                best_dist is None
                or dist > best_dist
                or (dist == best_dist and (pos < best_pos if leftmost else pos > best_pos))
            ):
                best_dist, best_pos = dist, pos
        chosen.append(best_pos)
        bisect.insort(placed, best_pos)
    return PointSet(tuple(chosen), n, None, "greedy", Fraction(0), None)


def generate(gen: GeneratorSpec, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> PointSet:
    if isinstance(gen, KroneckerGen):
        return kronecker(gen.alpha, n, ctx)
    if isinstance(gen, VdcGen):
        return van_der_corput(gen.base, n)
    if isinstance(gen, GreedyGen):
        return greedy_packing(n, gen.tie_break)
    raise ValueError(f"unknown generator spec {gen!r}")


def points_to_csv(ps: PointSet, digits: int = 40) -> str:
    lines = ["index,value"]
    for i, x in enumerate(ps.points):
        lines.append(f"{i},{fraction_to_decimal(x, digits)}")
    return "\n".join(lines) + "\n"


def points_to_json(ps: PointSet, digits: int = 40) -> dict:
    return {
        "generator": ps.generator_tag,
        "n": ps.n,
        "precision_bits": ps.precision_bits,
        "points": [fraction_to_decimal(x, digits) for x in ps.points],
    }
