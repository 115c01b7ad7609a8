"""The renormalization dynamics on parameter space and the survivor raster.

One step sends (alpha, beta) to (beta/alpha, (beta-1)/alpha + k) with
k = floor(1/alpha).  For rational parameters the step has a pleasant exact
form: writing alpha = a/c, beta = b/c over a common denominator,

    (a, b, c)  |->  (b, b - c + k*a, a),      k = c // a,

so denominators never grow and deep classifications stay cheap.  Float-kind
parameters carry explicit error bounds through each step; any comparison that
the bound cannot decide restarts the classification at doubled precision via
the parameter refiner, or surfaces as a precision-exhausted verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from .errors import DomainError, PrecisionExhausted
from .itmsim import FLOAT, MAX_ADAPTIVE_PRECISION, Params, RATIONAL, _adaptive
from .kseq import KSeqSpec
from .numkernel import Cubic, DEFAULT_PRECISION, real_root_in_unit, to_mpf

INFINITE = "InfiniteToDepth"
FINITE = "FiniteAtStep"
EXHAUSTED = "PrecisionExhausted"


@dataclass(frozen=True)
class TypeVerdict:
    status: str
    n: int  # depth reached (InfiniteToDepth) or failing step (others)
    k_prefix: tuple

    def to_dict(self) -> dict:
        return {"status": self.status, "n": self.n, "k_prefix": list(self.k_prefix)}


def g_step(p: Params) -> tuple:
    """One renormalization step; returns (params', k).  Exact on rationals."""
    if not (0 < p.alpha <= 1):
        raise DomainError("g_step requires 0 < alpha <= 1")
    if p.kind == RATIONAL:
        inv = 1 / p.alpha
        k = math.floor(inv)
        alpha2 = p.beta / p.alpha
        beta2 = (p.beta - 1) / p.alpha + k
        return Params(alpha2, beta2, RATIONAL), k
    with mp.workprec(p.precision):
        inv = 1 / p.alpha
        k = int(mpmath.floor(inv))
        guard = p.guard()
        if abs(inv - mpmath.nint(inv)) < guard:
            raise PrecisionExhausted("1/alpha too close to an integer", step=1)
        alpha2 = p.beta / p.alpha
        beta2 = (p.beta - 1) / p.alpha + k
        return Params(alpha2, beta2, FLOAT, p.precision), k


def g_inverse_branch(k: int, p2: Params) -> Params:
    """The k-labelled inverse branch: alpha = 1/(k + alpha' - beta'),
    beta = alpha' * alpha.  Round-trips exactly with g_step on rationals."""
    if k < 1:
        raise DomainError("inverse branch needs k >= 1")
    den = k + p2.alpha - p2.beta
    if den <= 0:
        raise DomainError("degenerate inverse-branch denominator")
    if p2.kind == RATIONAL:
        alpha = 1 / den
        return Params(alpha, p2.alpha * alpha, RATIONAL)
    with mp.workprec(p2.precision):
        alpha = 1 / den
        return Params(alpha, p2.alpha * alpha, FLOAT, p2.precision)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _k_sequence_rational(alpha: Fraction, beta: Fraction, depth: int) -> TypeVerdict:
    c = math.lcm(alpha.denominator, beta.denominator)
    a = alpha.numerator * (c // alpha.denominator)
    b = beta.numerator * (c // beta.denominator)
    prefix = []
    if not (0 < b < a < c):
        return TypeVerdict(FINITE, 0, ())
    for m in range(1, depth + 1):
        k = c // a
        a, b, c = b, b - c + k * a, a
        prefix.append(k)
        if not (0 < b < a < c):
            return TypeVerdict(FINITE, m, tuple(prefix))
    return TypeVerdict(INFINITE, depth, tuple(prefix))


def _k_sequence_float(p: Params, depth: int) -> TypeVerdict:
    with mp.workprec(p.precision):
        a, b = p.alpha, p.beta
        ulp = mpmath.ldexp(1, -(p.precision - 4))
        ea = eb = ulp

        def certain_positive(v, e):
            if v > e:
                return True
            if v < -e:
                return False
            raise PrecisionExhausted("sign ambiguous inside error bound")

        prefix = []
        try:
            if not (certain_positive(b, eb)
                    and certain_positive(a - b, ea + eb)
                    and certain_positive(1 - a, ea)):
                return TypeVerdict(FINITE, 0, ())
            for m in range(1, depth + 1):
                inv = 1 / a
                e_inv = ea * inv * inv + ulp * inv
                k = int(mpmath.floor(inv))
                frac = inv - k
                if frac < e_inv or 1 - frac < e_inv:
                    raise PrecisionExhausted("floor(1/alpha) ambiguous", step=m)
                a2 = b / a
                b2 = (b - 1) / a + k
                ea2 = (eb + a2 * ea) / a + ulp * (1 + a2)
                eb2 = (eb + abs(b - 1) / a * ea) / a + ulp * (1 + abs(b2) + k)
                a, b, ea, eb = a2, b2, ea2, eb2
                prefix.append(k)
                interior = (certain_positive(b, eb)
                            and certain_positive(a - b, ea + eb)
                            and certain_positive(1 - a, ea))
                if not interior:
                    return TypeVerdict(FINITE, m, tuple(prefix))
        except PrecisionExhausted as exc:
            exc.step = len(prefix) + 1
            raise
        return TypeVerdict(INFINITE, depth, tuple(prefix))


def k_sequence(p: Params, depth: int,
               max_precision: int = MAX_ADAPTIVE_PRECISION) -> TypeVerdict:
    """Iterate the renormalization up to ``depth`` times, recording the k-
    prefix; FiniteAtStep(m) at the first iterate outside the open triangle
    (exact boundary ties count as exits)."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if not p.in_U:
        raise DomainError("parameters outside U")
    if p.kind == RATIONAL:
        return _k_sequence_rational(p.alpha, p.beta, depth)
    try:
        return _adaptive(p, lambda q: _k_sequence_float(q, depth), max_precision)
    except PrecisionExhausted as exc:
        return TypeVerdict(EXHAUSTED, exc.step or 0, ())


def fixed_params(k: int, precision: int = DEFAULT_PRECISION) -> Params:
    """The renormalization fixed point with constant index k: alpha is the
    root in (0,1) of the index-k characteristic cubic and beta = alpha**2."""
    if k < 2:
        # k=1 has no admissible root in (0,1); consistent with the fact that
        # an all-ones index sequence never occurs for infinite-type maps
        raise DomainError("fixed parameters need k >= 2")
    poly = Cubic(1, -1, -k, 1)

    def refiner(prec: int) -> tuple:
        alpha = real_root_in_unit(poly, prec).value
        with mp.workprec(prec):
            return alpha, alpha * alpha

    alpha, beta = refiner(precision)
    p = Params(alpha, beta, FLOAT, precision, refiner)
    p2, k_got = g_step(p)
    tol = mpmath.ldexp(1, -(precision - 16))
    if k_got != k or abs(p2.alpha - p.alpha) > tol or abs(p2.beta - p.beta) > tol:
        raise DomainError("fixed-point residual check failed")  # pragma: no cover
    return p


def params_from_kseq(spec: KSeqSpec, depth: int,
                     precision: int = DEFAULT_PRECISION) -> Params:
    """Parameters realizing an eventually periodic index sequence.

    Applies the labelled inverse branches to three spread seeds until the
    cylinder shrinks below 2**(-precision/2), then re-extracts the sequence to
    ``depth`` as a self check.
    """
    if spec.kind != "periodic":
        raise DomainError("params_from_kseq needs an eventually periodic spec")
    if spec.satisfies_k2() is not True:
        raise DomainError("spec period fails the two-parity condition")

    def refiner(prec: int) -> tuple:
        target = mpmath.ldexp(1, -(prec // 2))
        with mp.workprec(prec + 32):
            seeds = [(mp.mpf("0.41"), mp.mpf("0.13")),
                     (mp.mpf("0.63"), mp.mpf("0.37")),
                     (mp.mpf("0.87"), mp.mpf("0.52"))]
            n_periods = 1
            best_spread = None
            while n_periods < 8 * prec:
                d = len(spec.prefix) + n_periods * len(spec.period)
                ks = spec.terms(d)
                images = []
                for sa, sb in seeds:
                    a, b = sa, sb
                    for k in reversed(ks):
                        a_new = 1 / (k + a - b)
                        b = a * a_new  # beta = alpha' * alpha
                        a = a_new
                    images.append((a, b))
                spread = max(
                    max(abs(x[0] - y[0]), abs(x[1] - y[1]))
                    for x in images for y in images
                )
                if best_spread is None or spread < best_spread:
                    best_spread = spread
                if spread < target:
                    return images[0]
                n_periods *= 2
            raise DomainError(
                f"inverse branches did not contract below {mpmath.nstr(target, 5)}; "
                f"achieved diameter {mpmath.nstr(best_spread, 5)}")

    alpha, beta = refiner(precision)
    p = Params(to_mpf(alpha, precision), to_mpf(beta, precision), FLOAT,
               precision, refiner)
    verdict = k_sequence(p, depth)
    if verdict.status != INFINITE or verdict.k_prefix != spec.terms(depth):
        raise DomainError("re-extracted k-sequence does not match the spec")
    return p


# ---------------------------------------------------------------------------
# the survivor raster
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RasterConfig:
    width: int
    height: int
    depth: int
    precision: int = DEFAULT_PRECISION
    out_path: str = "omega.pgm"
    workers: int = 1
    # exact rational viewport; defaults to the whole parameter square
    alpha_lo: Fraction = Fraction(0)
    alpha_hi: Fraction = Fraction(1)
    beta_lo: Fraction = Fraction(0)
    beta_hi: Fraction = Fraction(1)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError("raster needs width, height >= 1")
        if self.depth < 1:
            raise DomainError("raster needs depth >= 1")
        for name in ("alpha_lo", "alpha_hi", "beta_lo", "beta_hi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 <= self.alpha_lo < self.alpha_hi <= 1
                and 0 <= self.beta_lo < self.beta_hi <= 1):
            raise DomainError("viewport must be a rational sub-rectangle of the unit square")


def _death_step(a: int, b: int, c: int, depth: int) -> Optional[int]:
    """Exact classification of a rational point a/c, b/c; None = survivor."""
    if not (0 < b < a < c):
        return 0
    for m in range(1, depth + 1):
        k = c // a
        a, b, c = b, b - c + k * a, a
        if not (0 < b < a < c):
            return m
    return None


def death_step_exact(alpha: Fraction, beta: Fraction, depth: int) -> Optional[int]:
    """Death step of an exact rational parameter pair (None = survivor)."""
    c = math.lcm(alpha.denominator, beta.denominator)
    return _death_step(alpha.numerator * (c // alpha.denominator),
                       beta.numerator * (c // beta.denominator), c, depth)


def _pixel_value(m: Optional[int], depth: int) -> int:
    if m is None:
        return 255
    return (255 * m) // depth


def _raster_rows(args) -> bytes:
    width, height, depth, row_lo, row_hi, a_lo, a_hi, b_lo, b_hi = args
    da, db = a_hi - a_lo, b_hi - b_lo
    out = bytearray()
    for r in range(row_lo, row_hi):
        beta = b_lo + Fraction(2 * (height - r) - 1, 2 * height) * db
        for col in range(width):
            alpha = a_lo + Fraction(2 * col + 1, 2 * width) * da
            if beta > alpha:
                out.append(0)  # outside U
            else:
                out.append(_pixel_value(death_step_exact(alpha, beta, depth), depth))
    return bytes(out)


def raster_omega(cfg: RasterConfig) -> dict:
    """Render the survivor set at pixel centers and write a binary PGM.

    Pixel centers are exact rationals (centers of the viewport cells; the
    top row carries the largest beta), so the classification is exact and
    the image deterministic.  Value 255 marks survivors to the configured
    depth, dead pixels fade with their death step, and the region above the
    diagonal is 0 by convention.
    """
    chunks = []
    rows_per = max(1, cfg.height // max(1, cfg.workers * 4))
    tasks = [
        (cfg.width, cfg.height, cfg.depth, lo, min(lo + rows_per, cfg.height),
         cfg.alpha_lo, cfg.alpha_hi, cfg.beta_lo, cfg.beta_hi)
        for lo in range(0, cfg.height, rows_per)
    ]
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_raster_rows, tasks))
    else:
        chunks = [_raster_rows(t) for t in tasks]
    payload = b"".join(chunks)
    survivors = payload.count(255)
    header = (
        f"P5\n# itm-lab omega raster depth={cfg.depth} "
        f"rows=beta-descending cols=alpha-ascending\n"
        f"{cfg.width} {cfg.height}\n255\n"
    ).encode("ascii")
    with open(cfg.out_path, "wb") as fh:
        fh.write(header + payload)
    return {
        "width": cfg.width,
        "height": cfg.height,
        "depth": cfg.depth,
        "survivors": survivors,
        "dead": cfg.width * cfg.height - survivors,
        "precision_exhausted": 0,
    }
