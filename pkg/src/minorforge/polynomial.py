"""Sparse multivariate polynomials over the integers.

Only what the partial-field code needs: ring operations, evaluation and
exact division (quotient or None).
"""

from __future__ import annotations

import re


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def is_zero(self):
        return not self.terms

    def is_const(self, c=None):
        if not self.terms:
            return c in (None, 0)
        if len(self.terms) != 1:
            return False
        (e, v), = self.terms.items()
        return not any(e) and (c is None or v == c)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def evaluate(self, point, mod=None):
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= pow(x, k, mod) if mod else x**k
            total += v
        return total % mod if mod else total

    def divexact(self, g: "Poly"):
        """Return f / g when g divides f exactly, else None (lex-order division)."""
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        f = dict(self.terms)
        ge, gc = g.leading()
        quot = {}
        while f:
            fe = max(f)
            fc = f[fe]
            if fc % gc:
                return None
            qe = tuple(a - b for a, b in zip(fe, ge))
            if min(qe) < 0:
                return None
            qc = fc // gc
            quot[qe] = qc
            for e, c in g.terms.items():
                te = tuple(a + b for a, b in zip(qe, e))
                v = f.get(te, 0) - qc * c
                if v:
                    f[te] = v
                else:
                    f.pop(te, None)
        return Poly(self.nvars, quot)

    def to_string(self, names):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                s = str(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+") + s)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

    def __repr__(self):
        return f"Poly({self.terms})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def parse_poly(text: str, names) -> Poly:
    """Parse an integer polynomial such as ``1-alpha`` or ``alpha^2+3*beta``."""
    names = list(names)
    nv = len(names)
    tokens = []
    for num, ident, op in _TOKEN.findall(text):
        if num:
            tokens.append(("num", int(num)))
        elif ident:
            if ident not in names:
                raise ValueError(f"unknown symbol {ident!r} in {text!r}")
            tokens.append(("var", names.index(ident)))
        elif op.strip():
            tokens.append(("op", op))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() == ("op", "*"):
            take()
            acc = acc * power()
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, k = take()
            if kind != "num":
                raise ValueError(f"bad exponent in {text!r}")
            base = base**k
        return base

    def atom():
        kind, val = take() if pos < len(tokens) else (None, None)
        if kind == "num":
            return Poly.const(nv, val)
        if kind == "var":
            return Poly.var(nv, val)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return inner
        raise ValueError(f"cannot parse {text!r}")

    result = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result
