"""Index-sequence specifications (k_i) and their little grammar.

A spec is one of
  * Explicit  -- a finite known prefix, nothing declared about the tail;
  * EventuallyPeriodic -- prefix + repeating period, fully decidable;
  * Generator -- a named rule ``i -> k_i`` with an optional declared bound.

Grammar (used by the CLI): ``const:<k>`` | ``k1,k2,...`` |
``<prefix>+(<period>)``; entries are positive integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DomainError, ParseError

EXPLICIT = "explicit"
PERIODIC = "periodic"
GENERATOR = "generator"

_GENERATOR_RULES: dict = {
    # k_i = i: the standard unbounded stress rule
    "linear": lambda i: i,
}


@dataclass(frozen=True)
class KSeqSpec:
    kind: str
    prefix: tuple = ()
    period: tuple = ()
    rule_name: str = ""
    rule: Optional[Callable[[int], int]] = field(default=None, compare=False)
    bound: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (EXPLICIT, PERIODIC, GENERATOR):
            raise DomainError(f"unknown spec kind {self.kind!r}")
        for k in (*self.prefix, *self.period):
            if k < 1:
                raise DomainError("all k-sequence entries must be >= 1")
        if self.kind == PERIODIC and not self.period:
            raise DomainError("eventually periodic spec needs a non-empty period")
        if self.kind == GENERATOR and self.rule is None:
            raise DomainError("generator spec needs a rule")

    # -- constructors --------------------------------------------------

    @classmethod
    def explicit(cls, ks) -> "KSeqSpec":
        return cls(EXPLICIT, prefix=tuple(int(k) for k in ks))

    @classmethod
    def eventually_periodic(cls, prefix, period) -> "KSeqSpec":
        return cls(
            PERIODIC,
            prefix=tuple(int(k) for k in prefix),
            period=tuple(int(k) for k in period),
        )

    @classmethod
    def const(cls, k: int) -> "KSeqSpec":
        return cls.eventually_periodic((), (k,))

    @classmethod
    def generator(cls, name: str, bound: Optional[int] = None) -> "KSeqSpec":
        if name not in _GENERATOR_RULES:
            raise DomainError(f"unknown generator rule {name!r}")
        return cls(GENERATOR, rule_name=name, rule=_GENERATOR_RULES[name], bound=bound)

    # -- access ----------------------------------------------------------

    @property
    def horizon(self) -> Optional[int]:
        """Largest index with a defined entry; None means unbounded."""
        return len(self.prefix) if self.kind == EXPLICIT else None

    def k(self, i: int) -> int:
        """1-based entry k_i."""
        if i < 1:
            raise DomainError("k-sequence indices are 1-based")
        if self.kind == EXPLICIT:
            if i > len(self.prefix):
                raise DomainError(f"index {i} beyond explicit prefix of length {len(self.prefix)}")
            return self.prefix[i - 1]
        if self.kind == PERIODIC:
            if i <= len(self.prefix):
                return self.prefix[i - 1]
            return self.period[(i - len(self.prefix) - 1) % len(self.period)]
        return self.rule(i)

    def terms(self, n: int) -> tuple:
        return tuple(self.k(i) for i in range(1, n + 1))

    # -- decidable structure ----------------------------------------------

    def satisfies_k2(self) -> Optional[bool]:
        """Whether k>1 occurs infinitely often at both even and odd indices.

        Decidable for periodic specs (per-parity analysis of the period) and
        for the registered generator rules; None when undecidable.
        """
        if self.kind == PERIODIC:
            q = len(self.period)
            if all(k == 1 for k in self.period):
                return False
            if q % 2 == 1:
                return True  # parities of each slot alternate across repeats
            offset = len(self.prefix)
            parities = {0: False, 1: False}
            for j, k in enumerate(self.period, start=1):
                if k > 1:
                    parities[(offset + j) % 2] = True
            return parities[0] and parities[1]
        if self.kind == GENERATOR and self.rule_name == "linear":
            return True
        return None

    def is_bounded(self) -> Optional[bool]:
        if self.kind == PERIODIC:
            return True
        if self.kind == GENERATOR:
            if self.bound is not None:
                return True
            if self.rule_name == "linear":
                return False
        return None

    def liminf_finite(self) -> Optional[bool]:
        """Whether liminf k_i < infinity is known."""
        if self.kind == PERIODIC:
            return True
        if self.kind == GENERATOR:
            if self.bound is not None:
                return True
            if self.rule_name == "linear":
                return False
        return None

    def describe(self) -> str:
        if self.kind == EXPLICIT:
            return ",".join(map(str, self.prefix))
        if self.kind == PERIODIC:
            head = ",".join(map(str, self.prefix))
            return f"{head}+({','.join(map(str, self.period))})"
        return f"generator:{self.rule_name}" + (f"<= {self.bound}" if self.bound else "")


def parse_kseq(text: str) -> KSeqSpec:
    """Parse ``const:<k>`` | ``<k1>,<k2>,...`` | ``<prefix>+(<period>)``."""
    text = text.strip()
    if not text:
        raise ParseError("empty k-sequence spec")
    if text.startswith("const:"):
        try:
            k = int(text[len("const:"):])
        except ValueError as exc:
            raise ParseError(f"bad const spec {text!r}") from exc
        if k < 1:
            raise ParseError("const spec requires k >= 1")
        return KSeqSpec.const(k)
    if "+(" in text:
        head, _, tail = text.partition("+(")
        if not tail.endswith(")"):
            raise ParseError(f"unterminated period in {text!r}")
        try:
            prefix = tuple(int(t) for t in head.split(",") if t.strip()) if head else ()
            period = tuple(int(t) for t in tail[:-1].split(",") if t.strip())
        except ValueError as exc:
            raise ParseError(f"bad periodic spec {text!r}") from exc
        if not period:
            raise ParseError("period must be non-empty")
        if any(k < 1 for k in (*prefix, *period)):
            raise ParseError("k-sequence entries must be positive")
        return KSeqSpec.eventually_periodic(prefix, period)
    try:
        ks = tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad explicit spec {text!r}") from exc
    if any(k < 1 for k in ks):
        raise ParseError("k-sequence entries must be positive")
    return KSeqSpec.explicit(ks)
