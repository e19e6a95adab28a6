"""Small finite fields GF(q) with elements encoded as integers 0..q-1.

Prime fields use the residue itself.  GF(4) uses the reduction x^2 + x + 1
with 0, 1, 2 = x, 3 = x + 1; addition is XOR of the bit encodings.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

MAX_PRIME = 65521
TABLE_LIMIT = 256


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_up_to(limit: int):
    return [p for p in range(2, limit + 1) if is_prime(p)]


# multiplication in GF(4) under x^2 + x + 1
_GF4_MUL = (
    (0, 0, 0, 0),
    (0, 1, 2, 3),
    (0, 2, 3, 1),
    (0, 3, 1, 2),
)


@dataclass(frozen=True)
class FieldSpec:
    q: int
    p: int
    k: int
    reduction: tuple | None = None  # coefficients (c0, c1, c2) for k == 2
    _tables: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)

    def __repr__(self):
        return f"GF({self.q})"

    @property
    def elements(self):
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return a ^ b

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        return a

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        return _GF4_MUL[a][b]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self!r}")
        if self.q <= TABLE_LIMIT:
            return int(self.tables()["inv"][a])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(q)."""
        if self.k == 1:
            return n % self.p
        return n % 2

    def tables(self) -> dict:
        """add/mul/neg/inv lookup tables (numpy int32), built on first use."""
        if self.q > TABLE_LIMIT:
            raise FieldError(f"no tables for q={self.q} > {TABLE_LIMIT}")
        if not self._tables:
            q = self.q
            idx = np.arange(q)
            if self.k == 1:
                add = (idx[:, None] + idx[None, :]) % q
                mul = (idx[:, None] * idx[None, :]) % q
                neg = (-idx) % q
            else:
                add = idx[:, None] ^ idx[None, :]
                mul = np.array(_GF4_MUL)
                neg = idx.copy()
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                # exponentiation keeps the table independent of the mul table
                inv[a] = self.pow(a, q - 2)
            self._tables.update(
                add=add.astype(np.int32),
                mul=mul.astype(np.int32),
                neg=neg.astype(np.int32),
                inv=inv.astype(np.int32),
            )
        return self._tables

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        x, k = a, 1
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    if not isinstance(q, int) or q < 2:
        raise FieldError(f"unsupported field order {q!r}")
    if q == 4:
        return FieldSpec(q=4, p=2, k=2, reduction=(1, 1, 1))
    if q == 2 or (q % 2 == 1 and is_prime(q) and q <= MAX_PRIME):
        return FieldSpec(q=q, p=q, k=1)
    raise FieldError(f"unsupported field order {q}: need an odd prime <= {MAX_PRIME}, 2 or 4")


def arith(fld: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    for x in (a, b):
        if x is not None and not 0 <= x < fld.q:
            raise FieldError(f"{x} is not an element of {fld!r}")
    if op == "add":
        return fld.add(a, b)
    if op == "mul":
        return fld.mul(a, b)
    if op == "neg":
        return fld.neg(a)
    if op == "inv":
        return fld.inv(a)
    if op == "div":
        return fld.div(a, b)
    raise FieldError(f"unknown operation {op!r}")
