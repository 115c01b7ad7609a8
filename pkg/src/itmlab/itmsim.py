"""Direct simulation of the three-branch interval translation map.

The map acts on [0,1] with branch translations +alpha, +beta, beta-1 on the
cells [0, 1-a), [1-a, 1-b), [1-b, 1].  Parameters come in two kinds: exact
rationals (all orbit arithmetic stays exact, denominators stay bounded under
translation) and high-precision floats.  Float-kind comparisons near a branch
boundary are refused inside a guard band; when the parameters carry a refiner
the failed computation restarts at doubled precision, up to a cap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath
from mpmath import mp

from .errors import DomainError, PrecisionExhausted
from .numkernel import DEFAULT_PRECISION, as_fraction, to_mpf

RATIONAL = "rational"
FLOAT = "float"

MAX_ADAPTIVE_PRECISION = 1024


@dataclass(frozen=True)
class Params:
    """Parameter pair (alpha, beta), exact or high-precision.

    ``refiner``, when present, recomputes (alpha, beta) at a requested bit
    precision; it is what makes automatic precision doubling possible for
    algebraic parameters.
    """

    alpha: object
    beta: object
    kind: str
    precision: int = DEFAULT_PRECISION
    refiner: Optional[Callable[[int], tuple]] = field(default=None, compare=False)

    @classmethod
    def from_rationals(cls, alpha, beta) -> "Params":
        return cls(as_fraction(alpha), as_fraction(beta), RATIONAL)

    @classmethod
    def from_floats(cls, alpha, beta, precision: int = DEFAULT_PRECISION,
                    refiner: Optional[Callable[[int], tuple]] = None) -> "Params":
        return cls(to_mpf(alpha, precision), to_mpf(beta, precision), FLOAT,
                   precision, refiner)

    @property
    def in_U(self) -> bool:
        return 0 < self.beta <= self.alpha <= 1

    @property
    def in_U_interior(self) -> bool:
        return 0 < self.beta < self.alpha < 1

    def at_precision(self, precision: int) -> "Params":
        if self.kind == RATIONAL:
            return self
        if self.refiner is None:
            raise PrecisionExhausted(
                "parameters carry no refiner; cannot increase precision")
        a, b = self.refiner(precision)
        return Params(to_mpf(a, precision), to_mpf(b, precision), FLOAT,
                      precision, self.refiner)

    def guard(self):
        """Half-width of the ambiguous band around comparisons (0 if exact)."""
        if self.kind == RATIONAL:
            return 0
        return mpmath.ldexp(1, -(self.precision // 3))

    def describe(self) -> dict:
        if self.kind == RATIONAL:
            return {"alpha": str(self.alpha), "beta": str(self.beta), "kind": RATIONAL}
        return {
            "alpha": mpmath.nstr(self.alpha, int(self.precision * 0.3) + 1),
            "beta": mpmath.nstr(self.beta, int(self.precision * 0.3) + 1),
            "kind": FLOAT,
            "precision": self.precision,
        }


def _adaptive(p: Params, fn, max_precision: int = MAX_ADAPTIVE_PRECISION):
    """Run ``fn(params)``, doubling precision on guard-band hits."""
    current = p
    while True:
        try:
            return fn(current)
        except PrecisionExhausted as exc:
            nxt = current.precision * 2
            if p.kind == RATIONAL or p.refiner is None or nxt > max_precision:
                raise
            current = current.at_precision(nxt)


def _cell_of(p: Params, x, guard) -> int:
    """Partition cell index 1/2/3 of x; refuses inside the guard band."""
    one_a = 1 - p.alpha
    one_b = 1 - p.beta
    if guard:
        if abs(x - one_a) < guard or abs(x - one_b) < guard:
            raise PrecisionExhausted("orbit point inside the branch guard band")
    if x < one_a:
        return 1
    if x < one_b:
        return 2
    return 3


def itm_eval(p: Params, x):
    """One application of the map; exact branch selection.

    Branch cells are half-open as displayed, with 1 in the third cell.
    """
    if not p.in_U:
        raise DomainError("parameters outside U")
    if p.kind == FLOAT and not isinstance(x, mpmath.mpf):
        x = to_mpf(x, p.precision)
    if x < 0 or x > 1:
        raise DomainError(f"x={x} outside [0,1]")
    if p.kind == FLOAT:
        with mp.workprec(p.precision):
            cell = _cell_of(p, x, p.guard())
            if cell == 1:
                return x + p.alpha
            if cell == 2:
                return x + p.beta
            return x - 1 + p.beta
    cell = _cell_of(p, x, 0)
    if cell == 1:
        return x + p.alpha
    if cell == 2:
        return x + p.beta
    return x - 1 + p.beta


def itinerary(p: Params, x, n: int, max_precision: int = MAX_ADAPTIVE_PRECISION) -> str:
    """Length-n symbolic itinerary of x; the symbol is read before the step.

    Float-kind orbits that graze a branch boundary restart at doubled
    precision when the parameters provide a refiner.
    """
    if n < 1:
        raise DomainError("itinerary length must be >= 1")
    xf = as_fraction(x)
    if xf < 0 or xf > 1:
        raise DomainError("x outside [0,1]")
    x_exact = xf  # exact dyadic/rational value survives precision restarts

    def run(params: Params) -> str:
        if params.kind == FLOAT:
            with mp.workprec(params.precision):
                pt = to_mpf(x_exact, params.precision)
                guard = params.guard()
                out = []
                for _ in range(n):
                    cell = _cell_of(params, pt, guard)
                    out.append(str(cell))
                    if cell == 1:
                        pt = pt + params.alpha
                    elif cell == 2:
                        pt = pt + params.beta
                    else:
                        pt = pt - 1 + params.beta
                return "".join(out)
        pt = x_exact
        out = []
        for _ in range(n):
            cell = _cell_of(params, pt, 0)
            out.append(str(cell))
            pt = itm_eval(params, pt)
        return "".join(out)

    return _adaptive(p, run, max_precision)


# ---------------------------------------------------------------------------
# interval sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals [l, r) inside [0,1].

    The canonical representation is half-open everywhere; an interval ending
    at 1 is understood (and displayed) as closed there.
    """

    intervals: tuple  # of (l, r) pairs

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalSet":
        cleaned = sorted((l, r) for l, r in pairs if r > l)
        merged = []
        for l, r in cleaned:
            if merged and l <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], r)
            else:
                merged.append([l, r])
        return cls(tuple((l, r) for l, r in merged))

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls(((Fraction(0), Fraction(1)),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def measure(self):
        if not self.intervals:
            return Fraction(0)
        total = self.intervals[0][1] - self.intervals[0][0]
        for l, r in self.intervals[1:]:
            total += r - l
        return total

    def __len__(self) -> int:
        return len(self.intervals)

    def describe(self) -> list:
        out = []
        for l, r in self.intervals:
            closing = "]" if r == 1 else ")"
            out.append(f"[{l}, {r}{closing}")
        return out


def _clip(l, r, a, b):
    lo = max(l, a)
    hi = min(r, b)
    return (lo, hi) if hi > lo else None


def push_forward(p: Params, s: IntervalSet) -> IntervalSet:
    """Image of an interval union under the three branch translations."""
    if not p.in_U:
        raise DomainError("parameters outside U")
    one_a = 1 - p.alpha
    one_b = 1 - p.beta
    pieces = []
    for l, r in s.intervals:
        c = _clip(l, r, 0, one_a)
        if c:
            pieces.append((c[0] + p.alpha, c[1] + p.alpha))
        c = _clip(l, r, one_a, one_b)
        if c:
            pieces.append((c[0] + p.beta, c[1] + p.beta))
        c = _clip(l, r, one_b, 1)
        if c:
            pieces.append((c[0] - 1 + p.beta, c[1] - 1 + p.beta))
    return IntervalSet.from_pairs(pieces)


def attractor_cover(p: Params, depth: int, component_cap: int = 10 ** 6) -> IntervalSet:
    """The depth-fold pushforward of [0,1]; total measure never increases."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if p.kind == FLOAT:
        cover = IntervalSet(((mpmath.mpf(0), mpmath.mpf(1)),))
    else:
        cover = IntervalSet.unit()
    for _ in range(depth):
        cover = push_forward(p, cover)
        if len(cover) > component_cap:
            raise DomainError(
                f"attractor cover exceeded {component_cap} components")
    return cover


def first_return(p: Params, x, max_steps: int = 10 ** 6) -> tuple:
    """Smallest t >= 1 with T^t(x) back in [1-alpha, 1]; returns (y, t)."""
    if not p.in_U:
        raise DomainError("parameters outside U")
    window_lo = 1 - p.alpha
    if x < window_lo or x > 1:
        raise DomainError("x outside the return window [1-alpha, 1]")
    y = x
    for t in range(1, max_steps + 1):
        y = itm_eval(p, y)
        if y >= window_lo:
            return y, t
    raise DomainError(f"no return within {max_steps} steps")


def renorm_conjugacy_residual(p: Params, samples: int, seed: int = 0) -> object:
    """Oracle for the renormalization claim: the first-return map on
    [1-alpha, 1], rescaled by h(x) = (x - (1-alpha))/alpha, agrees with the
    map at the renormalized parameters.  Returns the max residual over
    ``samples`` seeded points (0 by convention for samples=0).
    """
    from .renorm import g_step  # deferred: renorm depends on this module

    if samples < 0:
        raise DomainError("samples must be >= 0")
    if samples == 0:
        return Fraction(0) if p.kind == RATIONAL else mpmath.mpf(0)

    def run(params: Params):
        p2, _k = g_step(params)
        if not p2.in_U:
            raise DomainError("renormalized parameters left U; map not defined")
        rng = random.Random(seed)
        worst = Fraction(0) if params.kind == RATIONAL else mpmath.mpf(0)
        with mp.workprec(params.precision if params.kind == FLOAT else 64):
            for _ in range(samples):
                u = Fraction(rng.getrandbits(80), 2 ** 80)
                if params.kind == RATIONAL:
                    x = (1 - params.alpha) + params.alpha * u
                else:
                    x = (1 - params.alpha) + params.alpha * to_mpf(u, params.precision)
                y, _t = first_return(params, x)
                h_of_rx = (y - (1 - params.alpha)) / params.alpha
                h_of_x = (x - (1 - params.alpha)) / params.alpha
                image = itm_eval(p2, h_of_x)
                worst = max(worst, abs(h_of_rx - image))
        return worst

    return _adaptive(p, run)
