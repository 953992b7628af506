"""Cyclic-group functional registers.

The computational register of the halting program stores the values of a
periodic function on a cyclic group of order m.  Two kinds are supported:

* multiplicative: f(x) = (g**M) ** x mod p, the order-m subgroup of the
  multiplicative group mod a prime p, with g a primitive root and
  M = (p - 1) / m.  All values are >= 1, so the integer 0 is free to act
  as the register's "blank" marker.
* additive: f(x) = x mod m.  Here 0 is a group member, so the blank marker
  is the extra symbol m instead.

The single register operation is the cyclic shift f(x) -> f(x + 1); any
symbol outside the subspace (the blank in particular) is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize_order(n: int) -> list[tuple[int, int, int, int]]:
    """Decompose n into prime-power factors.

    Returns a list of quadruples ``(p_k, a_k, m_k, M_k)`` with
    ``m_k = p_k**a_k`` and ``M_k = n // m_k``, sorted by ascending m_k.
    ``n = 1`` yields the empty list.
    """
    if n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")
    out = []
    rest = n
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            m = p**a
            out.append((p, a, m, n // m))
        p += 1 if p == 2 else 2
    if rest > 1:
        out.append((rest, 1, rest, n // rest))
    out.sort(key=lambda q: q[2])
    return out


def multiplicative_order(a: int, p: int) -> int:
    """Order of a in the multiplicative group mod p (a not divisible by p)."""
    k, v = 1, a % p
    while v != 1:
        v = (v * a) % p
        k += 1
    return k


def find_primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod a prime p.

    For p = 2 the group is trivial and 1 is returned.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    # g is a generator iff g**((p-1)/q) != 1 for every prime q | p-1.
    prime_divisors = [q for q, _, _, _ in factorize_order(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in prime_divisors):
            return g
    raise AssertionError("no primitive root found; p is not prime")


@dataclass(frozen=True)
class GroupFactorization:
    """A prime p, a primitive root g, and the factor data of p - 1."""

    p: int
    g: int
    factors: list[tuple[int, int, int, int]] = field(default_factory=list)

    @classmethod
    def of_prime(cls, p: int) -> "GroupFactorization":
        g = find_primitive_root(p)
        return cls(p=p, g=g, factors=factorize_order(p - 1))

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p > 10**6:
            raise ValueError("modulus capped at 10**6 for exhaustive checks")
        prod = 1
        for _, _, m, M in self.factors:
            prod *= m
            if m * M != self.p - 1:
                raise ValueError("inconsistent factor quadruple")
        if prod != self.p - 1:
            raise ValueError("factor product does not reconstruct p - 1")
        ms = [m for _, _, m, _ in self.factors]
        if ms != sorted(ms):
            raise ValueError("factors must be sorted by ascending m_k")
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                if gcd(ms[i], ms[j]) != 1:
                    raise ValueError("factor sizes must be pairwise coprime")
        if self.p > 2 and multiplicative_order(self.g, self.p) != self.p - 1:
            raise ValueError(f"{self.g} does not generate the group mod {self.p}")

    @property
    def r(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class FunctionalSubspace:
    """Ordered value list f(0), ..., f(m-1) of one cyclic factor."""

    kind: str  # "multiplicative" | "additive"
    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("multiplicative", "additive"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if len(self.values) != self.m:
            raise ValueError("value list length differs from m")
        if len(set(self.values)) != self.m:
            raise ValueError("values must be distinct")
        if self.kind == "multiplicative" and any(v < 1 for v in self.values):
            raise ValueError("multiplicative values must be >= 1")

    @property
    def blank(self) -> int:
        """Register symbol that is not a subspace member.

        0 for the multiplicative kind; the extra symbol m for the additive
        kind, where 0 is itself a member.
        """
        return 0 if self.kind == "multiplicative" else self.m

    @property
    def desired(self) -> int:
        """The target value f(x_f): 1 (multiplicative) or 0 (additive)."""
        return 1 if self.kind == "multiplicative" else 0

    def index_of(self, value: int) -> int:
        return self.values.index(value)


def build_subspace(fact: GroupFactorization, k: int, kind: str) -> FunctionalSubspace:
    """Value list of the k-th factor subspace (k is 1-based)."""
    if not 1 <= k <= fact.r:
        raise IndexError(f"factor index {k} out of range 1..{fact.r}")
    _, _, m, M = fact.factors[k - 1]
    if kind == "multiplicative":
        base = pow(fact.g, M, fact.p)
        values = tuple(pow(base, x, fact.p) for x in range(m))
    elif kind == "additive":
        values = tuple(range(m))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return FunctionalSubspace(kind=kind, m=m, values=values)


def apply_shift(sub: FunctionalSubspace, value: int) -> int:
    """Cyclic shift f(x) -> f(x+1); symbols outside the subspace pass through."""
    try:
        x = sub.values.index(value)
    except ValueError:
        return value
    return sub.values[(x + 1) % sub.m]
