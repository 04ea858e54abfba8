"""Ordinal notations below Gamma_0 in binary Veblen normal form.

A code is a finite (possibly empty) sum of Veblen terms phi(a, b) with
non-increasing terms and each b below phi(a, b) (no fixed-point redundancy).
The empty sum is zero. `phi` is the normalizing constructor; building `Ord`
directly skips normalization and is only appropriate when decoding, followed
by an `is_normal` check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class Ord:
    terms: Tuple[Tuple["Ord", "Ord"], ...]

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(_term_str(a, b) for a, b in self.terms)


def _term_str(a: Ord, b: Ord) -> str:
    n = nat_of(Ord(((a, b),)))
    if n is not None:
        return str(n)
    if a.is_zero():
        return f"w^({b})" if b.terms else "w^(0)"
    return f"phi({a}, {b})"


ZERO = Ord(())


def phi(a: Ord, b: Ord) -> Ord:
    """Normalizing Veblen constructor: collapses phi(a, phi(a2, b2)) = phi(a2, b2)
    when a2 > a (b already names a fixed point of the a-th function)."""
    if len(b.terms) == 1:
        a2, _ = b.terms[0]
        if compare(a2, a) == GREATER:
            return b
    return Ord(((a, b),))


def compare_term(t1: Tuple[Ord, Ord], t2: Tuple[Ord, Ord]) -> int:
    a1, b1 = t1
    a2, b2 = t2
    c = compare(a1, a2)
    if c == EQUAL:
        return compare(b1, b2)
    if c == LESS:
        # phi(a1,b1) < phi(a2,b2) iff b1 < phi(a2,b2)
        return LESS if compare(b1, Ord((t2,))) == LESS else GREATER
    # a1 > a2: phi(a1,b1) < phi(a2,b2) iff phi(a1,b1) <= b2
    return LESS if compare(Ord((t1,)), b2) in (LESS, EQUAL) else GREATER


def compare(x: Ord, y: Ord) -> int:
    for t1, t2 in zip(x.terms, y.terms):
        c = compare_term(t1, t2)
        if c != EQUAL:
            return c
    if len(x.terms) == len(y.terms):
        return EQUAL
    return LESS if len(x.terms) < len(y.terms) else GREATER


ONE = phi(ZERO, ZERO)
OMEGA = phi(ZERO, ONE)


def is_normal(x: Ord) -> bool:
    for i, (a, b) in enumerate(x.terms):
        if not (is_normal(a) and is_normal(b)):
            return False
        if len(b.terms) == 1 and compare(b.terms[0][0], a) == GREATER:
            return False  # phi(a, b) with b a higher-level fixed point
        if i + 1 < len(x.terms) and compare_term(x.terms[i], x.terms[i + 1]) == LESS:
            return False
    return True


def add(x: Ord, y: Ord) -> Ord:
    if y.is_zero():
        return x
    lead = y.terms[0]
    kept = []
    for t in x.terms:
        if compare_term(t, lead) in (GREATER, EQUAL):
            kept.append(t)
        else:
            break
    return Ord(tuple(kept) + y.terms)


def mul_nat(x: Ord, k: int) -> Ord:
    if k < 0:
        raise ValueError("natural multiplier required")
    out = ZERO
    for _ in range(k):
        out = add(out, x)
    return out


def omega_pow(a: Ord) -> Ord:
    return phi(ZERO, a)


def fin(n: int) -> Ord:
    return mul_nat(ONE, n)


def nat_of(x: Ord) -> Optional[int]:
    if all(a.is_zero() and b.is_zero() for a, b in x.terms):
        return len(x.terms)
    return None


def tower(n: int) -> Ord:
    """tower(0) = 1 and tower(n+1) = w^tower(n)."""
    out = ONE
    for _ in range(n):
        out = omega_pow(out)
    return out


def log_lead(x: Ord) -> Ord:
    """Exponent e with w^e the leading additive component (x nonzero)."""
    a, b = x.terms[0]
    return b if a.is_zero() else Ord((x.terms[0],))


def mul_omega(x: Ord) -> Ord:
    """x * w; zero stays zero."""
    if x.is_zero():
        return ZERO
    return omega_pow(add(log_lead(x), ONE))


def subtract(x: Ord, y: Ord) -> Optional[Ord]:
    """The unique r with y + r = x when y <= x, else None."""
    if compare(x, y) == LESS:
        return None
    i = 0
    while i < len(x.terms) and i < len(y.terms) and x.terms[i] == y.terms[i]:
        i += 1
    if i == len(y.terms):
        return Ord(x.terms[i:])
    # y's remaining leading term differs; since y <= x the difference starts at x's term i
    return Ord(x.terms[i:])


def _lead_run(x: Ord) -> Tuple[Tuple[Ord, Ord], int, Ord]:
    t = x.terms[0]
    c = 1
    while c < len(x.terms) and x.terms[c] == t:
        c += 1
    return t, c, Ord(x.terms[c:])


def least_mul_bound(z: Ord, y: Ord, g: Ord) -> int:
    """Least j with z < y + g*j, or 0 if there is none (elementary witness
    for the limit split z < y + g*w)."""
    if compare(z, y) == LESS:
        return 0
    if g.is_zero():
        return 0
    rho = subtract(z, y)
    if rho is None:
        return 0
    if rho.is_zero():
        return 1
    t1, c1, tail = _lead_run(g)
    s1, c, rest = _lead_run(rho)
    cmp = compare_term(s1, t1)
    if cmp == LESS:
        return 1
    if cmp == GREATER:
        return 0
    j1, rem = divmod(c, c1)
    if rem == 0 and j1 >= 1 and compare(rest, tail) == LESS:
        return j1
    return j1 + 1


def limit_exp_witness(z: Ord, y: Ord, n: int) -> int:
    """k with z < y + w^(w*n + k) whenever z < y + w^(w*(n+1)), else 0."""
    if compare(z, y) == LESS:
        return 1
    rho = subtract(z, y)
    if rho is None or rho.is_zero():
        return 1
    e = log_lead(rho)  # need e < w*(n+1), i.e. e = w*n' + k with n' <= n
    base = mul_nat(OMEGA, n)
    if compare(e, base) == LESS:
        return 1  # already below w^(w*n)
    tail = subtract(e, base)
    if tail is None:
        return 0
    k = nat_of(tail)
    return k + 1 if k is not None else 0


def size(x: Ord) -> int:
    return 1 + sum(size(a) + size(b) for a, b in x.terms)


def enumerate_upto(max_size: int, below: Ord) -> Iterator[Ord]:
    """All normal forms of structural size <= max_size strictly below `below`."""
    seen = set()
    for o in _enum(max_size):
        if o not in seen and compare(o, below) == LESS:
            seen.add(o)
            yield o


def _enum(max_size: int) -> Iterator[Ord]:
    if max_size < 1:
        return
    yield ZERO
    # sums of terms with total size <= max_size - 1
    for terms in _enum_terms(max_size - 1):
        o = Ord(terms)
        if is_normal(o):
            yield o


def _enum_terms(budget: int) -> Iterator[Tuple[Tuple[Ord, Ord], ...]]:
    if budget <= 0:
        return
    for a_size in range(1, budget + 1):
        for a in _enum(a_size):
            if size(a) > a_size:
                continue
            for b_size in range(1, budget - size(a) + 1):
                for b in _enum(b_size):
                    head = (a, b)
                    used = size(a) + size(b)
                    yield (head,)
                    for rest in _enum_terms(budget - used):
                        if compare_term(head, rest[0]) in (GREATER, EQUAL):
                            yield (head,) + rest
