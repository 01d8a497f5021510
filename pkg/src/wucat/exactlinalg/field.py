"""Exact coefficient fields: arbitrary-precision rationals and GF(p).

Every computation in the package is exact; a field object bundles the
arithmetic so matrices and complexes can run over either field without
caring which one it is.  Elements are plain ``Fraction``s (rational mode)
or ints in ``[0, p)`` (prime mode).
"""

from __future__ import annotations

from fractions import Fraction

try:  # gmpy2 rationals are a large constant factor faster than Fraction
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is normally available
    _mpq = Fraction


class RationalField:
    name = "QQ"

    zero = _mpq(0)
    one = _mpq(1)

    def from_int(self, n):
        return _mpq(n)

    def from_fraction(self, q):
        if isinstance(q, Fraction):
            return _mpq(q.numerator, q.denominator)
        return _mpq(q)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.one / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def to_str(self, a):
        return f"{a.numerator}/{a.denominator}"

    def parse(self, s):
        if "/" in s:
            num, den = s.split("/")
            return _mpq(int(num), int(den))
        return _mpq(int(s))

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    """Integers mod p for a prime p; residues normalized to [0, p)."""

    def __init__(self, p=32003):
        if p < 2:
            raise ValueError("p must be a prime >= 2")
        self.p = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def from_int(self, n):
        return n % self.p

    def from_fraction(self, q):
        q = Fraction(q)
        den = q.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator {q.denominator} vanishes mod {self.p}")
        return q.numerator * pow(den, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def to_str(self, a):
        return f"{a % self.p}/1"

    def parse(self, s):
        if "/" in s:
            num, den = s.split("/")
            return self.div(int(num) % self.p, int(den) % self.p)
        return int(s) % self.p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()
GF32003 = PrimeField(32003)


def field_by_name(name):
    """Resolve 'rational' / 'prime' / 'prime:65537' to a field object."""
    if name in ("rational", "QQ", "qq"):
        return QQ
    if name in ("prime", "gf"):
        return GF32003
    if name.startswith("prime:") or name.startswith("gf:"):
        return PrimeField(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown field {name!r}")
