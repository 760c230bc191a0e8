"""Exact exponent calculus for fractional integrals between modulation spaces.

Exponents are carried as reciprocals (``1/p`` rather than ``p``) in
:class:`fractions.Fraction` so that membership in the critical lines is an
exact equality. Nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

_ZERO, _ONE = Fraction(0), Fraction(1)


def as_fraction(value, name: str = "value") -> Fraction:
    """Exact rational from an int, Fraction or ``"a/b"`` string.

    Floats and decimal strings are refused: rounding could move a point on
    or off a critical line.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name}: booleans are not exponents")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if any(c in s for c in ".eE"):
            raise ValueError(f"{name}: decimal {value!r} is not exact; write it as a/b")
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: malformed rational {value!r}") from exc
    raise TypeError(f"{name}: expected an exact rational, got {type(value).__name__}")


def reciprocal(value, name: str = "exponent") -> Fraction:
    """``1/p`` for an exponent given exactly."""
    p = as_fraction(value, name)
    if p <= 0:
        raise ValueError(f"{name} must be positive, got {p}")
    return 1 / p


def _in_unit(v: Fraction, name: str) -> None:
    if not _ZERO < v < _ONE:
        raise ValueError(f"{name} = {v} must lie strictly between 0 and 1")


@dataclass(frozen=True)
class RegionQuery:
    """``(n, alpha, beta, 1/p1, 1/q1, 1/p2, 1/q2)`` with exact entries."""

    n: int
    alpha: Fraction
    beta: Fraction
    ip1: Fraction
    iq1: Fraction
    ip2: Fraction
    iq2: Fraction

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        for name in ("alpha", "beta", "ip1", "iq1", "ip2", "iq2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name), name))
        if not _ZERO < self.beta <= self.alpha < self.n:
            raise ValueError(
                f"need 0 < beta <= alpha < n, got alpha={self.alpha}, beta={self.beta}, n={self.n}"
            )
        for name, label in (("ip1", "1/p1"), ("iq1", "1/q1"), ("ip2", "1/p2"), ("iq2", "1/q2")):
            _in_unit(getattr(self, name), label)

    @classmethod
    def from_exponents(cls, n, alpha, beta, p1, q1, p2, q2) -> "RegionQuery":
        """Build from ``p`` and ``q`` values instead of reciprocals."""
        return cls(n, as_fraction(alpha, "alpha"), as_fraction(beta, "beta"),
                   reciprocal(p1, "p1"), reciprocal(q1, "q1"),
                   reciprocal(p2, "p2"), reciprocal(q2, "q2"))

    @property
    def p_line(self) -> Fraction:
        """Largest admissible ``1/p2``."""
        return self.ip1 - self.alpha / self.n

    @property
    def q_line(self) -> Fraction:
        """``1/q2`` must stay strictly below this."""
        return self.iq1 + self.beta / self.n


@dataclass(frozen=True)
class RegionVerdict:
    bounded: bool
    constraints: tuple = field(default_factory=tuple)
    p_critical: bool = False
    q_critical: bool = False

    def as_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "p_critical": self.p_critical,
            "q_critical": self.q_critical,
            "constraints": [dict(c) for c in self.constraints],
        }


def theorem12_verdict(q: RegionQuery) -> RegionVerdict:
    """Boundedness of ``I_{alpha,beta}: M^{p1,q1} -> M^{p2,q2}``.

    Bounded iff ``1/p2 <= 1/p1 - alpha/n`` and ``1/q2 < 1/q1 + beta/n``.
    The first line is included, the second excluded.
    """
    p_ok = q.ip2 <= q.p_line
    q_ok = q.iq2 < q.q_line
    constraints = (
        (("name", "p"), ("relation", "1/p2 <= 1/p1 - alpha/n"), ("lhs", str(q.ip2)),
         ("rhs", str(q.p_line)), ("holds", p_ok)),
        (("name", "q"), ("relation", "1/q2 < 1/q1 + beta/n"), ("lhs", str(q.iq2)),
         ("rhs", str(q.q_line)), ("holds", q_ok)),
    )
    return RegionVerdict(p_ok and q_ok, constraints, q.ip2 == q.p_line, q.iq2 == q.q_line)


def theorem11_verdict(q: RegionQuery) -> RegionVerdict:
    """Equal-order case ``alpha == beta``, where ``I_{alpha,alpha} = 2 I_alpha``."""
    if q.alpha != q.beta:
        raise ValueError(f"equal orders required, got alpha={q.alpha}, beta={q.beta}")
    return theorem12_verdict(q)


def embedding_verdict(ip1, iq1, ip2, iq2) -> bool:
    """``M^{p1,q1}`` embeds in ``M^{p2,q2}`` iff ``p1 <= p2`` and ``q1 <= q2``."""
    ip1, iq1, ip2, iq2 = (as_fraction(v) for v in (ip1, iq1, ip2, iq2))
    return ip1 >= ip2 and iq1 >= iq2


def amalgam_sufficient(q: RegionQuery) -> bool:
    """Known sufficient condition for ``(L^{p1}, l^{q1}) -> (L^{p2}, l^{q2})``.

    ``1/p2 >= 1/p1 - beta/n`` and ``1/q2 <= 1/q1 - alpha/n``. Sufficient
    only; a ``False`` here says nothing about unboundedness.
    """
    return q.ip2 >= q.ip1 - q.beta / q.n and q.iq2 <= q.iq1 - q.alpha / q.n


def hls_admissible(ip, iq, alpha, n: int) -> bool:
    """``1 < p < q < inf`` and ``1/q = 1/p - alpha/n``."""
    ip, iq, alpha = as_fraction(ip, "1/p"), as_fraction(iq, "1/q"), as_fraction(alpha, "alpha")
    if not (_ZERO < alpha < n):
        return False
    return _ZERO < iq < ip < _ONE and iq == ip - alpha / n


def _axis(steps: int, critical: Fraction) -> list[Fraction]:
    """Cell midpoints of ``(0, 1)``; the one nearest ``critical`` is replaced by it."""
    pts = [Fraction(2 * j + 1, 2 * steps) for j in range(steps)]
    if _ZERO < critical < _ONE:
        j = min(range(steps), key=lambda i: (abs(pts[i] - critical), i))
        pts[j] = critical
    return pts


def region_grid_scan(n: int, alpha, beta, ip1, iq1, steps: int = 32) -> list[dict]:
    """Tabulate the verdict over the ``(1/p2, 1/q2)`` unit square.

    The grid uses ``steps`` cell midpoints per axis, with the point nearest
    each critical value moved onto it so both boundary lines are sampled.
    Rows are ordered by ``1/p2`` then ``1/q2``.
    """
    if steps < 8:
        raise ValueError(f"need at least 8 steps, got {steps}")
    base = RegionQuery(n, alpha, beta, ip1, iq1, Fraction(1, 2), Fraction(1, 2))
    rows = []
    for ip2 in _axis(steps, base.p_line):
        for iq2 in _axis(steps, base.q_line):
            q = RegionQuery(n, base.alpha, base.beta, base.ip1, base.iq1, ip2, iq2)
            v = theorem12_verdict(q)
            rows.append(dict(ip2=ip2, iq2=iq2, bounded=v.bounded, p_critical=v.p_critical,
                             q_critical=v.q_critical, amalgam=amalgam_sufficient(q)))
    return rows
