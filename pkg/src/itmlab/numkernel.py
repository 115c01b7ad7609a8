"""Exact and high-precision numeric tower.

Big rationals are ``fractions.Fraction`` (arbitrary precision, always reduced,
positive denominator -- exactly the invariants we need).  High-precision binary
floats are mpmath ``mpf`` values computed under an explicit working precision;
``HighFloat`` pairs such a value with the precision it was computed at so that
downstream consumers never have to guess how many bits to trust.

The 3x3 integer matrices hold the renormalization cocycle.  The convention,
fixed globally, is that row vectors act on the left: ``x |-> x @ M``.  All
integer arithmetic is exact; entries of long products grow without bound and
Python integers absorb that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

from .errors import DomainError, MultipleRootsInInterval, NoRootInInterval

DEFAULT_PRECISION = 192
MIN_PRECISION = 64


# ---------------------------------------------------------------------------
# high-precision floats
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HighFloat:
    """A binary float together with the mantissa precision it was computed at."""

    value: mpmath.mpf
    precision: int

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise DomainError(f"precision {self.precision} < {MIN_PRECISION}")

    def __float__(self) -> float:
        return float(self.value)

    def digits(self) -> int:
        return int(self.precision * 0.3013) + 1

    def tagged(self) -> dict:
        """Value rendered with an explicit precision tag for reports."""
        return {
            "value": mpmath.nstr(self.value, self.digits(), strip_zeros=False),
            "precision": self.precision,
        }

    def __repr__(self) -> str:
        return f"HighFloat({mpmath.nstr(self.value, 12)}, p={self.precision})"


def to_mpf(x, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Convert int/Fraction/float/mpf to an mpf rounded at ``precision`` bits."""
    with mp.workprec(precision):
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) or isinstance(x, mpmath.mpf):
        return Fraction(*mpmath.mpf(x).as_integer_ratio())
    raise DomainError(f"cannot interpret {x!r} as an exact rational")


def frac_dist(x):
    """Distance of a scalar to the nearest integer; exact on Fractions."""
    if isinstance(x, (int,)):
        return Fraction(0)
    if isinstance(x, Fraction):
        f = x - math.floor(x)
        return min(f, 1 - f)
    f = x - mpmath.floor(x)
    return min(f, 1 - f)


def lattice_dist_sup(vec) -> object:
    """Sup-norm distance of a vector to the nearest integer lattice point."""
    return max(frac_dist(c) for c in vec)


# ---------------------------------------------------------------------------
# 3x3 integer matrices
# ---------------------------------------------------------------------------

Row = tuple  # length-3 tuple of ints


@dataclass(frozen=True)
class Mat3:
    """Immutable 3x3 matrix with arbitrary-precision integer entries."""

    rows: tuple

    def __post_init__(self):
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise DomainError("Mat3 requires a 3x3 entry grid")
        object.__setattr__(
            self, "rows", tuple(tuple(int(e) for e in r) for r in self.rows)
        )

    @classmethod
    def identity(cls) -> "Mat3":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def __getitem__(self, i: int) -> Row:
        return self.rows[i]

    def __matmul__(self, other: "Mat3") -> "Mat3":
        a, b = self.rows, other.rows
        return Mat3(
            tuple(
                tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                for i in range(3)
            )
        )

    def __pow__(self, n: int) -> "Mat3":
        if n < 0:
            raise DomainError("negative matrix powers are not supported")
        result = Mat3.identity()
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def transpose(self) -> "Mat3":
        r = self.rows
        return Mat3(tuple(tuple(r[j][i] for j in range(3)) for i in range(3)))

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def trace(self) -> int:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def charpoly(self) -> "Cubic":
        """Characteristic polynomial ``det(lambda*I - M)`` (monic)."""
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        minors = (e * i - f * h) + (a * i - c * g) + (a * e - b * d)
        return Cubic(1, -self.trace(), minors, -self.det())

    def entries(self) -> Iterable[int]:
        for r in self.rows:
            yield from r

    def min_entry(self) -> int:
        return min(self.entries())

    def max_entry(self) -> int:
        return max(self.entries())

    def is_positive(self) -> bool:
        return all(e >= 1 for e in self.entries())

    def apply_row(self, vec: Sequence) -> tuple:
        """Row-vector action ``vec @ M``; exact on int/Fraction inputs."""
        r = self.rows
        return tuple(
            vec[0] * r[0][j] + vec[1] * r[1][j] + vec[2] * r[2][j] for j in range(3)
        )

    def column(self, j: int) -> tuple:
        return tuple(self.rows[i][j] for i in range(3))

    def as_lists(self) -> list:
        return [list(r) for r in self.rows]


def mat_product(ms: Sequence[Mat3]) -> Mat3:
    """Exact left-to-right product of a non-empty list of matrices."""
    if not ms:
        raise DomainError("mat_product requires a non-empty list")
    acc = ms[0]
    for m in ms[1:]:
        acc = acc @ m
    return acc


def make_matrix(kind: str, k: int | None = None, r: int | None = None) -> Mat3:
    """Build a named cocycle matrix.

    kind ``A``      -- substitution abelianization for index ``k >= 1``
    kind ``A_inv``  -- its exact inverse
    kind ``B``      -- the positive-cone conjugate ``U A_k^{-1} U^{-1}``
    kind ``U``      -- the conjugating involution
    kind ``A1_pow`` -- the closed form for ``A_1**r`` (``r >= 1``)
    """
    if kind == "U":
        return Mat3(((0, 1, 0), (1, 0, 0), (0, 0, -1)))
    if kind == "A1_pow":
        if r is None or r < 1:
            raise DomainError("A1_pow requires a power r >= 1")
        if r % 2:  # r = 2l - 1
            l = (r + 1) // 2
            return Mat3(((0, 1, 0), (1, 0, 0), (l - 1, l, 1)))
        l = r // 2
        return Mat3(((1, 0, 0), (0, 1, 0), (l, l, 1)))
    if k is None or k < 1:
        raise DomainError(f"matrix kind {kind!r} requires k >= 1 (no substitution at k=0)")
    if kind == "A":
        return Mat3(((0, k, k - 1), (1, 0, 0), (0, 1, 1)))
    if kind == "A_inv":
        return Mat3(((0, 1, 0), (1, 0, 1 - k), (-1, 0, k)))
    if kind == "B":
        return Mat3(((0, 1, k - 1), (1, 0, 0), (0, 1, k)))
    raise DomainError(f"unknown matrix kind {kind!r}")


# ---------------------------------------------------------------------------
# cubic polynomials: exact evaluation, Sturm isolation, root refinement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cubic:
    """Integer cubic ``c3 x^3 + c2 x^2 + c1 x + c0`` with ``c3 != 0``."""

    c3: int
    c2: int
    c1: int
    c0: int

    def __post_init__(self):
        if self.c3 == 0:
            raise DomainError("leading coefficient of a Cubic must be nonzero")

    def coeffs(self) -> tuple:
        return (self.c3, self.c2, self.c1, self.c0)

    def __call__(self, x):
        return ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0

    def derivative_coeffs(self) -> tuple:
        return (3 * self.c3, 2 * self.c2, self.c1)


def _poly_eval(coeffs: Sequence, x):
    acc = coeffs[0]
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def _poly_is_zero(p: Sequence[Fraction]) -> bool:
    return all(c == 0 for c in p)


def _poly_rem(num: Sequence[Fraction], den: Sequence[Fraction]) -> list:
    """Remainder of num/den (coefficients high -> low, Fractions)."""
    num = list(num)
    dd = len(den) - 1
    while len(num) - 1 >= dd:
        if num[0] == 0:
            num.pop(0)
            continue
        factor = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= factor * den[i]
        num.pop(0)
    while len(num) > 1 and num[0] == 0:
        num.pop(0)
    return num or [Fraction(0)]


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a = list(a)
    b = list(b)
    while not _poly_is_zero(b):
        a, b = b, _poly_rem(a, b)
    return a


def _poly_div_exact(num: Sequence[Fraction], den: Sequence[Fraction]) -> list:
    """Exact quotient num/den; raises if the division is not exact."""
    num = list(num)
    quot = []
    dd = len(den) - 1
    while len(num) - 1 >= dd:
        factor = num[0] / den[0]
        quot.append(factor)
        for i in range(len(den)):
            num[i] -= factor * den[i]
        num.pop(0)
    if any(c != 0 for c in num):
        raise DomainError("inexact polynomial division")
    return quot


def _square_free(coeffs: Sequence[int]) -> list:
    """Square-free part of an integer polynomial, as Fractions (high -> low)."""
    p = [Fraction(c) for c in coeffs]
    deg = len(p) - 1
    dp = [Fraction((deg - i) * p[i]) for i in range(deg)]
    g = _poly_gcd(p, dp)
    if len(g) == 1:  # constant gcd: already square-free
        return p
    return _poly_div_exact(p, g)


def _sturm_chain(p: Sequence[Fraction]) -> list:
    chain = [list(p)]
    deg = len(p) - 1
    if deg >= 1:
        chain.append([Fraction((deg - i) * p[i]) for i in range(deg)])
    while len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        if _poly_is_zero(r):
            break
        chain.append([-c for c in r])
    return chain


def _variations(chain: Sequence[Sequence[Fraction]], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_open(c_coeffs: Sequence[int], a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots in the open interval (a, b)."""
    p = _square_free(c_coeffs)
    chain = _sturm_chain(p)
    count = _variations(chain, a) - _variations(chain, b)
    if _poly_eval(p, b) == 0:
        count -= 1  # Sturm counts (a, b]; drop a root sitting exactly at b
    return count


def _bisect_root(coeffs: Sequence[int], lo: Fraction, hi: Fraction, bits: int) -> Fraction:
    """Dyadic bisection with exact integer signs; needs a sign change on [lo,hi]."""
    flo = _poly_eval(coeffs, lo)
    fhi = _poly_eval(coeffs, hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoRootInInterval("no sign change on the bracket")
    slo = flo > 0
    width = hi - lo
    target = Fraction(1, 2 ** bits)
    while width > target:
        mid = (lo + hi) / 2
        fm = _poly_eval(coeffs, mid)
        if fm == 0:
            return mid
        if (fm > 0) == slo:
            lo = mid
        else:
            hi = mid
        width = hi - lo
    return (lo + hi) / 2


def real_root_in_unit(c: Cubic, precision: int = DEFAULT_PRECISION) -> HighFloat:
    """The unique real root of ``c`` in the open interval (0, 1).

    Verifies uniqueness by an exact Sturm count before refining; refinement is
    a bisection/Newton hybrid carried out to ``2**(1-precision)`` relative
    error.
    """
    if precision < MIN_PRECISION:
        raise DomainError(f"precision {precision} < {MIN_PRECISION}")
    zero, one = Fraction(0), Fraction(1)
    n = count_roots_open(c.coeffs(), zero, one)
    if n == 0:
        raise NoRootInInterval("cubic has no root in (0, 1)")
    if n > 1:
        raise MultipleRootsInInterval(f"cubic has {n} roots in (0, 1)")
    sf = _square_free(c.coeffs())
    # clear denominators so sign evaluations stay integer-exact
    den = math.lcm(*(f.denominator for f in sf))
    icoeffs = [int(f * den) for f in sf]
    lo, hi = zero, one
    # nudge off endpoint roots of the original cubic (the inner root is simple)
    eps = Fraction(1, 2 ** 20)
    while _poly_eval(icoeffs, lo) == 0:
        lo += eps
    while _poly_eval(icoeffs, hi) == 0:
        hi -= eps
    while count_roots_open(c.coeffs(), lo, hi) != 1:  # pragma: no cover - safety
        eps /= 2
        lo, hi = zero + eps, one - eps
    seed = _bisect_root(icoeffs, lo, hi, 64)
    with mp.workprec(precision + 24):
        x = to_mpf(seed, precision + 24)
        dcoeffs = [(len(icoeffs) - 1 - i) * c for i, c in enumerate(icoeffs[:-1])]
        converged = False
        for _ in range(int(math.log2(precision)) + 6):
            fx = _poly_eval(icoeffs, x)
            dfx = _poly_eval(dcoeffs, x)
            if dfx == 0:
                break
            step = fx / dfx
            x = x - step
            if abs(step) < mpmath.ldexp(1, -(precision + 16)):
                converged = True
                break
        if not converged or not 0 < x < 1:
            # Newton escaped or stalled: fall back to certified bisection
            x = to_mpf(_bisect_root(icoeffs, lo, hi, precision + 8), precision + 24)
        x = +x
    return HighFloat(x, precision)


def cubic_real_roots(c: Cubic, precision: int = DEFAULT_PRECISION) -> list:
    """All real roots of ``c`` with multiplicities, sorted descending.

    Returns a list of ``(HighFloat, multiplicity)``.  Exact Sturm isolation on
    dyadic intervals, then bisection to the requested precision; safe for the
    huge-coefficient characteristic polynomials of long cocycle products.
    """
    coeffs = c.coeffs()
    sf = _square_free(coeffs)
    den = math.lcm(*(f.denominator for f in sf))
    icoeffs = [int(f * den) for f in sf]
    bound = Fraction(1) + max(abs(Fraction(k, coeffs[0])) for k in coeffs)
    chain = _sturm_chain([Fraction(k) for k in icoeffs])

    def count(a: Fraction, b: Fraction) -> int:
        n = _variations(chain, a) - _variations(chain, b)
        if _poly_eval(icoeffs, b) == 0:
            n -= 1
        return n

    bits = precision + 8 + max(v.bit_length() for v in map(abs, icoeffs))
    min_width = Fraction(1, 2 ** (bits + 64))
    intervals = [(-bound, bound)]
    isolated = []  # (bracket_lo, bracket_hi) with exactly one simple root inside
    while intervals:
        a, b = intervals.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1 and _poly_eval(icoeffs, a) != 0 and _poly_eval(icoeffs, b) != 0:
            isolated.append((a, b))
            continue
        if b - a < min_width:  # pragma: no cover - safety against pathologies
            raise MultipleRootsInInterval("could not separate nearly equal roots")
        mid = (a + b) / 2
        if _poly_eval(icoeffs, mid) == 0:
            isolated.append((mid, mid))
            intervals.append((a, mid - min_width))
            intervals.append((mid + min_width, b))
        else:
            intervals.append((a, mid))
            intervals.append((mid, b))

    isolated.sort(reverse=True)
    roots = []
    for a, b in isolated:
        root = a if a == b else _bisect_root(icoeffs, a, b, bits)
        roots.append((root, (a, b)))

    # multiplicities: a repeated root of a cubic is a (rational) root of the
    # cofactor of the square-free part; match it to its isolating bracket
    mults = [1] * len(roots)
    deg_sf = len(icoeffs) - 1
    if deg_sf == 1:
        mults = [3]
    elif deg_sf == 2:
        cof = _poly_div_exact([Fraction(k) for k in coeffs], sf)
        repeated = -cof[1] / cof[0]
        for i, (_, (a, b)) in enumerate(roots):
            if a <= repeated <= b:
                roots[i] = (repeated, (a, b))
                mults[i] = 2
                break

    out = []
    with mp.workprec(precision + 16):
        for (r, _), m in zip(roots, mults):
            out.append((HighFloat(to_mpf(r, precision + 16), precision), m))
    return out


@dataclass(frozen=True)
class MatrixInvariants:
    det: int
    charpoly: Cubic
    rational_roots: tuple
    irreducible_over_Q: bool


def _divisors(n: int, cap: int = 10 ** 6) -> list:
    n = abs(n)
    if n == 0:
        return []
    if n.bit_length() > 80:
        raise DomainError("rational-root test infeasible: constant term too large to factor")
    out = set()
    d = 1
    while d * d <= n:
        if d > cap:
            raise DomainError("rational-root test infeasible: constant term too large to factor")
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def cubic_rational_roots(c: Cubic) -> tuple:
    """All rational roots (distinct, sorted) via the rational-root test."""
    roots = set()
    c3, c2, c1, c0 = c.coeffs()
    if c0 == 0:
        roots.add(Fraction(0))
        # remaining quadratic c3 x^2 + c2 x + c1
        disc = c2 * c2 - 4 * c3 * c1
        if disc >= 0:
            s = math.isqrt(disc)
            if s * s == disc:
                for sign in (1, -1):
                    roots.add(Fraction(-c2 + sign * s, 2 * c3))
        return tuple(sorted(roots))
    for p in _divisors(c0):
        for q in _divisors(c3):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if c(cand) == 0:
                    roots.add(cand)
    return tuple(sorted(roots))


def matrix_invariants(m: Mat3) -> MatrixInvariants:
    """Exact determinant, characteristic polynomial, and rational-root data.

    For a cubic, reducibility over Q is equivalent to having a rational root,
    so the rational-root test decides ``irreducible_over_Q``.
    """
    p = m.charpoly()
    roots = cubic_rational_roots(p)
    return MatrixInvariants(
        det=m.det(),
        charpoly=p,
        rational_roots=roots,
        irreducible_over_Q=(len(roots) == 0),
    )


# ---------------------------------------------------------------------------
# Hilbert projective metric on the positive cone (row-vector convention)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HilbertRho:
    rho: HighFloat
    contraction: HighFloat
    rho_sq: Fraction  # exact value of rho**2


def hilbert_rho(m: Mat3, precision: int = DEFAULT_PRECISION) -> HilbertRho:
    """Oscillation ratio ``rho`` of a strictly positive matrix and the induced
    Hilbert-metric contraction factor ``tanh(log(rho)/2)``.

    Row-vector convention: the image cone is spanned by the rows, so ``rho``
    maximizes ``sqrt(max_k ratio / min_k ratio)`` over ordered row pairs.
    """
    if not m.is_positive():
        raise DomainError("hilbert_rho requires strictly positive entries")
    rho_sq = Fraction(1)
    for j in range(3):
        for jp in range(3):
            if j == jp:
                continue
            ratios = [Fraction(m.rows[j][k], m.rows[jp][k]) for k in range(3)]
            rho_sq = max(rho_sq, max(ratios) / min(ratios))
    with mp.workprec(precision + 16):
        rho = mpmath.sqrt(to_mpf(rho_sq, precision + 16))
        contraction = mpmath.tanh(mpmath.log(rho) / 2)
        rho = +rho
        contraction = +contraction
    return HilbertRho(
        rho=HighFloat(rho, precision),
        contraction=HighFloat(contraction, precision),
        rho_sq=rho_sq,
    )
