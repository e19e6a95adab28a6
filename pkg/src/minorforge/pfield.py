"""Partial fields given by presentations, their fundamentals, and finite-field proxies."""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .field import FieldSpec, make_field, is_prime
from .polynomial import Poly, parse_poly

log = logging.getLogger(__name__)

KINDS = ("rationalConstants", "quotientRing", "freeRational")
DEFAULT_BOUND = 3


class PartialFieldError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GroupElement:
    """sign * prod(groupGenerators[i] ** exponents[i]); sign 0 encodes the zero element."""

    sign: int
    exponents: tuple

    def is_zero(self):
        return self.sign == 0


@dataclass
class PartialFieldPresentation:
    name: str
    kind: str
    generators: list
    group_generators: list  # strings, parsed according to kind
    minus_one_distinct: bool = True
    modulus: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PartialFieldError(f"unknown kind {self.kind!r}")
        nv = len(self.generators)
        if self.kind == "rationalConstants":
            self._consts = [Fraction(g) for g in self.group_generators]
            for c in self._consts:
                if c.denominator != 1 or c.numerator < 2:
                    raise PartialFieldError("constant generators must be integers >= 2")
        elif self.kind == "freeRational":
            self._polys = [parse_poly(g, self.generators) for g in self.group_generators]
        else:
            if nv != 1 or self.modulus is None:
                raise PartialFieldError("quotientRing needs one generator and a modulus")
            mod = parse_poly(self.modulus, self.generators)
            self._mod = _univariate(mod)
            if self._mod[-1] != 1:
                raise PartialFieldError("modulus must be monic")
            self._unit_gens = [_univariate(parse_poly(g, self.generators)) for g in self.group_generators]
            self._build_unit_group()

    # ---- element construction -------------------------------------------------

    @property
    def zero(self):
        return GroupElement(0, ())

    @property
    def one(self):
        if self.kind == "quotientRing":
            return GroupElement(1, (0,))
        return GroupElement(1, (0,) * len(self.group_generators))

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        if a.is_zero() or b.is_zero():
            return self.zero
        if self.kind == "quotientRing":
            return GroupElement(1, ((a.exponents[0] + b.exponents[0]) % self._order,))
        return GroupElement(a.sign * b.sign, tuple(x + y for x, y in zip(a.exponents, b.exponents)))

    def inv(self, a: GroupElement) -> GroupElement:
        if a.is_zero():
            raise ZeroDivisionError("zero is not invertible")
        if self.kind == "quotientRing":
            return GroupElement(1, ((-a.exponents[0]) % self._order,))
        return GroupElement(a.sign, tuple(-x for x in a.exponents))

    def neg(self, a: GroupElement) -> GroupElement:
        if a.is_zero():
            return a
        if self.kind == "quotientRing":
            return self.mul(a, self._minus_one)
        return GroupElement(-a.sign, a.exponents)

    def one_minus(self, a: GroupElement):
        """Exact 1 - a: the zero element, a group element, or None when 1 - a is outside the partial field."""
        if a.is_zero():
            return self.one
        if a == self.one:
            return self.zero
        if self.kind == "rationalConstants":
            return self._rational_element(1 - self.rational_value(a))
        if self.kind == "quotientRing":
            x = self._ring_value[a.exponents[0]]
            diff = tuple((1 if i == 0 else 0) - c for i, c in enumerate(x))
            j = self._unit_index.get(diff)
            return None if j is None else GroupElement(1, (j,))
        return self._free_one_minus(a)

    # ---- rationalConstants ----------------------------------------------------

    def rational_value(self, a: GroupElement) -> Fraction:
        v = Fraction(a.sign)
        for c, e in zip(self._consts, a.exponents):
            v *= c**e
        return v

    def _rational_element(self, x: Fraction):
        if x == 0:
            return self.zero
        sign = 1 if x > 0 else -1
        num, den = abs(x.numerator), x.denominator
        exps = []
        for c in self._consts:
            c = c.numerator
            e = 0
            while num % c == 0:
                num //= c
                e += 1
            while den % c == 0:
                den //= c
                e -= 1
            exps.append(e)
        if num != 1 or den != 1:
            return None
        return GroupElement(sign, tuple(exps))

    # ---- quotientRing ---------------------------------------------------------

    def _ring_mul(self, x, y):
        d = len(self._mod) - 1
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(x):
            for j, b in enumerate(y):
                prod[i + j] += a * b
        for k in range(len(prod) - 1, d - 1, -1):
            c = prod[k]
            if c:
                for i in range(d + 1):
                    prod[k - d + i] -= c * self._mod[i]
        return tuple(prod[:d])

    def _build_unit_group(self):
        d = len(self._mod) - 1
        if len(self._unit_gens) != 1:
            raise PartialFieldError("quotientRing supports a single cyclic group generator")
        g = tuple((list(self._unit_gens[0]) + [0] * d)[:d])
        one = tuple(1 if i == 0 else 0 for i in range(d))
        values = [one]
        x = g
        while x != one:
            values.append(x)
            x = self._ring_mul(x, g)
            if len(values) > 1000:
                raise PartialFieldError("group generator has infinite order")
        self._order = len(values)
        self._ring_value = values
        self._unit_index = {v: j for j, v in enumerate(values)}
        minus = tuple(-c for c in one)
        if minus not in self._unit_index:
            raise PartialFieldError("-1 is not in the generated group")
        self._minus_one = GroupElement(1, (self._unit_index[minus],))

    # ---- freeRational ---------------------------------------------------------

    @cached_property
    def _filter_points(self):
        # integer points where every group generator is a nonzero small number
        pts = []
        nv = len(self.generators)
        for cand in itertools.product(range(-7, 8), repeat=nv):
            vals = [p.evaluate(cand) for p in self._polys]
            if all(v != 0 for v in vals):
                primes = set()
                for v in vals:
                    primes |= _prime_factors(abs(v))
                pts.append((cand, vals, sorted(primes)))
        pts.sort(key=lambda t: (len(t[2]), max(t[2], default=1)))
        return pts[:3]

    def _free_one_minus(self, a: GroupElement):
        exps = a.exponents
        # f = D - sign*N must be a signed monomial in the generators
        for pt, vals, primes in self._filter_points:
            num = den = 1
            for v, e in zip(vals, exps):
                if e > 0:
                    num *= v**e
                elif e < 0:
                    den *= v ** (-e)
            f = den - a.sign * num
            if f != 0:
                f = abs(f)
                for p in primes:
                    while f % p == 0:
                        f //= p
                if f != 1:
                    return None
        nv = len(self.generators)
        num = Poly.const(nv, 1)
        den = Poly.const(nv, 1)
        for g, e in zip(self._polys, exps):
            if e > 0:
                num = num * g**e
            elif e < 0:
                den = den * g ** (-e)
        f = den - num * a.sign
        if f.is_zero():
            return self.zero
        counts = [0] * len(self._polys)
        changed = True
        while changed and not f.is_const():
            changed = False
            for i, g in enumerate(self._polys):
                q = f.divexact(g)
                if q is not None:
                    f = q
                    counts[i] += 1
                    changed = True
        if not (f.is_const(1) or f.is_const(-1)):
            return None
        sign = f.terms[(0,) * nv]
        # 1 - a = f / den, den = prod of generators with negative exponent
        return GroupElement(sign, tuple(c + min(e, 0) for c, e in zip(counts, exps)))

    # ---- evaluation -----------------------------------------------------------

    def fixed_images(self, fld: FieldSpec):
        """Forced generator images (rationalConstants), or None when images are free."""
        if self.kind == "rationalConstants":
            return {g: fld.from_int(int(c)) for g, c in zip(self.generators, self._consts)}
        return None

    def generator_values(self, fld: FieldSpec, images: dict):
        """Field values of the group generators, or None if some generator maps to 0."""
        if self.kind == "rationalConstants":
            vals = [fld.from_int(int(c)) for c in self._consts]
        elif self.kind == "quotientRing":
            x = images[self.generators[0]]
            if _eval_univariate(self._mod, x, fld) != 0:
                return None
            vals = [_eval_univariate(u, x, fld) for u in self._unit_gens]
        else:
            pt = [images[g] for g in self.generators]
            vals = [p.evaluate(pt, fld.p) for p in self._polys]
        if any(v == 0 for v in vals):
            return None
        return vals

    def evaluate(self, a: GroupElement, fld: FieldSpec, gen_values) -> int:
        if a.is_zero():
            return 0
        if self.kind == "quotientRing":
            return fld.pow(gen_values[0], a.exponents[0])
        v = 1 if a.sign > 0 else fld.neg(1)
        for g, e in zip(gen_values, a.exponents):
            if e:
                v = fld.mul(v, fld.pow(g, e))
        return v

    # ---- enumeration / display ------------------------------------------------

    def candidates(self, bound: int):
        if self.kind == "quotientRing":
            for j in range(self._order):
                yield GroupElement(1, (j,))
            return
        k = len(self.group_generators)
        for exps in itertools.product(range(-bound, bound + 1), repeat=k):
            for s in (1, -1):
                yield GroupElement(s, exps)

    def format(self, a: GroupElement) -> str:
        if a.is_zero():
            return "0"
        if self.kind == "quotientRing":
            j = a.exponents[0]
            g = self.generators[0]
            return "1" if j == 0 else (g if j == 1 else f"{g}^{j}")
        if self.kind == "rationalConstants":
            v = self.rational_value(a)
            return str(v)
        parts = []
        for g, e in zip(self.group_generators, a.exponents):
            if e:
                base = g if _is_atom(g) else f"({g})"
                parts.append(base if e == 1 else f"{base}^{e}")
        body = "*".join(parts) or "1"
        return body if a.sign > 0 else ("-" + body if parts else "-1")

    def sort_key(self, a: GroupElement):
        if a.is_zero():
            return (0,)
        if a == self.one:
            return (1,)
        return (2, sum(abs(e) for e in a.exponents), a.sign < 0, tuple(-e for e in a.exponents))

    def to_dict(self):
        d = {
            "name": self.name,
            "kind": self.kind,
            "generators": list(self.generators),
            "groupGenerators": list(self.group_generators),
            "minusOneDistinct": self.minus_one_distinct,
        }
        if self.modulus:
            d["modulus"] = self.modulus
        return d


def _is_atom(s):
    return s.isidentifier() or s.isdigit()


def _univariate(p: Poly):
    if p.is_zero():
        return (0,)
    d = max(e[0] for e in p.terms)
    return tuple(p.terms.get((i,), 0) for i in range(d + 1))


def _eval_univariate(coeffs, x, fld: FieldSpec):
    v = 0
    for c in reversed(coeffs):
        v = fld.add(fld.mul(v, x), fld.from_int(c))
    return v


def _prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


# --------------------------------------------------------------------------------
# built-in presentations

_BUILTINS = {
    "D": dict(kind="rationalConstants", generators=["2"], group_generators=["2"]),
    "S": dict(kind="quotientRing", generators=["zeta"], group_generators=["zeta"], modulus="zeta^2-zeta+1"),
    "U1": dict(kind="freeRational", generators=["alpha"], group_generators=["alpha", "1-alpha"]),
    "U2": dict(
        kind="freeRational",
        generators=["alpha", "beta"],
        group_generators=["alpha", "beta", "1-alpha", "1-beta", "alpha-beta"],
    ),
    "K2": dict(kind="freeRational", generators=["alpha"], group_generators=["alpha-1", "alpha", "alpha+1"]),
}


def builtin_partial_field(name: str) -> PartialFieldPresentation:
    try:
        spec = _BUILTINS[name]
    except KeyError:
        raise PartialFieldError(f"unknown partial field {name!r}; built-ins are {sorted(_BUILTINS)}") from None
    return PartialFieldPresentation(name=name, **spec)


def load_presentation(path) -> PartialFieldPresentation:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return PartialFieldPresentation(
        name=d["name"],
        kind=d["kind"],
        generators=d["generators"],
        group_generators=d["groupGenerators"],
        minus_one_distinct=d.get("minusOneDistinct", True),
        modulus=d.get("modulus"),
    )


def resolve_partial_field(name_or_path: str) -> PartialFieldPresentation:
    if name_or_path in _BUILTINS:
        return builtin_partial_field(name_or_path)
    return load_presentation(name_or_path)


# --------------------------------------------------------------------------------
# fundamentals and associates

_FUND_CACHE: dict = {}


def fundamentals(pf: PartialFieldPresentation, bound: int = DEFAULT_BOUND) -> frozenset:
    """All fundamentals with exponents in [-bound, bound], plus 0 and 1."""
    if bound < 1:
        raise PartialFieldError("bound must be >= 1")
    key = (pf.name, pf.kind, tuple(pf.group_generators), bound)
    if key in _FUND_CACHE:
        return _FUND_CACHE[key]
    found = {pf.zero, pf.one}
    for a in pf.candidates(bound):
        if a == pf.one:
            continue
        if pf.one_minus(a) is not None:
            found.add(a)
    result = frozenset(found)
    _FUND_CACHE[key] = result
    return result


def group_associates(pf: PartialFieldPresentation, a: GroupElement) -> frozenset:
    if a.is_zero() or a == pf.one:
        return frozenset({pf.zero, pf.one})
    b = pf.one_minus(a)
    if b is None or b.is_zero():
        raise PartialFieldError(f"{pf.format(a)} is not a fundamental of {pf.name}")
    ia, ib = pf.inv(a), pf.inv(b)
    return frozenset({a, b, ia, ib, pf.neg(pf.mul(a, ib)), pf.neg(pf.mul(b, ia))})


def field_associates(fld: FieldSpec, a: int) -> frozenset:
    if a in (0, 1):
        return frozenset({0, 1})
    b = fld.sub(1, a)
    ia, ib = fld.inv(a), fld.inv(b)
    return frozenset({a, b, ia, ib, fld.neg(fld.mul(a, ib)), fld.neg(fld.mul(b, ia))})


def rational_associates(x) -> frozenset:
    x = Fraction(x)
    if x in (0, 1):
        return frozenset({Fraction(0), Fraction(1)})
    return frozenset({x, 1 - x, 1 / x, 1 / (1 - x), x / (x - 1), (x - 1) / x})


def associates(ctx, p):
    """Asc(p) in a finite field, a partial-field presentation, or the rationals (ctx == "Q")."""
    if isinstance(ctx, FieldSpec):
        return field_associates(ctx, p)
    if isinstance(ctx, PartialFieldPresentation):
        return group_associates(ctx, p)
    if ctx in ("Q", None):
        return rational_associates(p)
    raise PartialFieldError(f"cannot take associates in {ctx!r}")


# --------------------------------------------------------------------------------
# proxies


@dataclass(frozen=True)
class Proxy:
    pf_name: str
    field: FieldSpec
    images: tuple  # ((generator, image), ...)
    F: frozenset

    def stanza(self) -> str:
        imgs = ",".join(f"{g}={v}" for g, v in self.images)
        return f"pf={self.pf_name} q={self.field.q} images={imgs} F={','.join(str(x) for x in sorted(self.F))}"

    @classmethod
    def parse(cls, text: str) -> "Proxy":
        parts = dict(tok.split("=", 1) for tok in text.split())
        images = tuple(
            (g, int(v)) for g, v in (item.rsplit("=", 1) for item in parts["images"].split(",") if item)
        )
        F = frozenset(int(x) for x in parts["F"].split(",") if x)
        return cls(parts["pf"], make_field(int(parts["q"])), images, F)

    def confinement_table(self):
        """Boolean lookup over field elements: membership in F."""
        table = [False] * self.field.q
        for x in self.F:
            table[x] = True
        return table


@dataclass
class Violation:
    condition: str
    witnesses: list = dc_field(default_factory=list)
    message: str = ""

    def __str__(self):
        return self.message


def verify_proxy(pf: PartialFieldPresentation, fld: FieldSpec, images: dict, bound: int = DEFAULT_BOUND,
                 fund=None):
    """Check the lifting conditions for ``images``; returns a Proxy or the first Violation."""
    fund = fundamentals(pf, bound) if fund is None else fund
    fixed = pf.fixed_images(fld)
    if fixed is not None:
        images = fixed
    gen_values = pf.generator_values(fld, images)
    if gen_values is None:
        return Violation("homomorphism", [], "a group generator maps to 0 (or the modulus does not vanish)")
    elems = sorted(fund, key=pf.sort_key)
    phi = {a: pf.evaluate(a, fld, gen_values) for a in elems}
    fmt = pf.format

    # (a) injectivity on the fundamentals
    seen = {}
    for a in elems:
        v = phi[a]
        if v in seen:
            b = seen[v]
            return Violation("injective", [(b, a)], f"phi({fmt(b)}) = phi({fmt(a)}) = {v}")
        seen[v] = a
    by_value = seen

    # (b) phi(p) + phi(q) = 1 implies p + q = 1
    for a in elems:
        target = fld.sub(1, phi[a])
        b = by_value.get(target)
        if b is not None and pf.one_minus(a) != b:
            return Violation("sum", [(a, b)], f"phi({fmt(a)}) + phi({fmt(b)}) = 1 but {fmt(a)} + {fmt(b)} != 1")

    # (c) phi(p)phi(q)phi(r) = 1 implies pqr = 1
    nonzero = [a for a in elems if not a.is_zero()]
    bad = []
    for i, a in enumerate(nonzero):
        for b in nonzero[i:]:
            prod = fld.mul(phi[a], phi[b])
            c = by_value.get(fld.inv(prod))
            if c is None or pf.sort_key(c) < pf.sort_key(b):
                continue
            if pf.mul(pf.mul(a, b), c) != pf.one:
                bad.append((a, b, c))
    if bad:
        a, b, c = bad[0]
        return Violation(
            "product",
            bad,
            f"phi({fmt(a)})phi({fmt(b)})phi({fmt(c)}) = 1 but {fmt(a)}*{fmt(b)}*{fmt(c)} != 1",
        )

    # (d) characteristic two
    if fld.add(1, 1) == 0 and pf.minus_one_distinct:
        return Violation("minus_one", [], "1 = -1 in the field but not in the partial field")

    F = frozenset(phi[a] for a in elems) - {0, 1}
    imgs = tuple((g, images[g]) for g in pf.generators)
    return Proxy(pf.name, fld, imgs, F)


def _powmod(x, e, p):
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _screen(pf: PartialFieldPresentation, fld: FieldSpec, fund):
    """Image tuples (lexicographic) that pass the injectivity, sum and product tests.

    A vectorised prefilter over every tuple for one prime; survivors are
    re-checked by verify_proxy, which stays the reference.
    """
    p = fld.p
    k = len(pf.generators)
    grid = np.array(list(itertools.product(range(1, p), repeat=k)), dtype=np.int64).reshape(-1, k)
    if pf.kind == "quotientRing":
        x = grid[:, 0]
        modv = np.zeros_like(x)
        for c in reversed(pf._mod):
            modv = (modv * x + c) % p
        keep = modv == 0
        gvals = []
        for u in pf._unit_gens:
            v = np.zeros_like(x)
            for c in reversed(u):
                v = (v * x + c) % p
            gvals.append(v)
    else:
        keep = np.ones(len(grid), dtype=bool)
        gvals = []
        for poly in pf._polys:
            v = np.zeros(len(grid), dtype=np.int64)
            for e, c in poly.terms.items():
                t = np.full(len(grid), c % p, dtype=np.int64)
                for i, ei in enumerate(e):
                    if ei:
                        t = t * _powmod(grid[:, i], ei, p) % p
                v = (v + t) % p
            gvals.append(v)
    for v in gvals:
        keep &= v != 0
    grid = grid[keep]
    gvals = [v[keep] for v in gvals]
    if not len(grid):
        return
    elems = [a for a in sorted(fund, key=pf.sort_key)]
    m = len(elems)
    V = np.zeros((len(grid), m), dtype=np.int64)
    invs = [_powmod(v, p - 2, p) for v in gvals]
    for j, a in enumerate(elems):
        if a.is_zero():
            continue
        if pf.kind == "quotientRing":
            col = _powmod(gvals[0], a.exponents[0], p)
        else:
            col = np.full(len(grid), 1 if a.sign > 0 else p - 1, dtype=np.int64)
            for g, gi, e in zip(gvals, invs, a.exponents):
                if e:
                    col = col * _powmod(g if e > 0 else gi, abs(e), p) % p
        V[:, j] = col
    # injectivity
    S = np.sort(V, axis=1)
    ok = np.all(S[:, 1:] != S[:, :-1], axis=1)
    # sums equal to one must come from genuine partners
    index = {a: j for j, a in enumerate(elems)}
    partner = [index.get(pf.one_minus(a), -1) for a in elems]
    for j in range(m):
        for l in range(j, m):
            if partner[j] == l:
                continue
            ok &= (V[:, j] + V[:, l]) % p != 1
    # products equal to one (j <= l <= t) must be genuine
    nz = [j for j, a in enumerate(elems) if not a.is_zero()]
    genuine = set()
    for ii, j in enumerate(nz):
        for l in nz[ii:]:
            ab = pf.mul(elems[j], elems[l])
            c = index.get(pf.inv(ab))
            if c is not None and c >= l:
                genuine.add((j, l, c))
    for ii, j in enumerate(nz):
        if not ok.any():
            break
        for jj, l in enumerate(nz[ii:]):
            prod = V[:, j] * V[:, l] % p
            for t in nz[ii + jj:]:
                if (j, l, t) in genuine:
                    continue
                ok &= prod * V[:, t] % p != 1
    for row in grid[ok]:
        yield dict(zip(pf.generators, (int(x) for x in row)))


def _image_tuples(pf: PartialFieldPresentation, fld: FieldSpec, fund=None):
    if pf.kind == "rationalConstants":
        yield pf.fixed_images(fld)
        return
    if fund is not None:
        yield from _screen(pf, fld, fund)
        return
    for combo in itertools.product(range(1, fld.q), repeat=len(pf.generators)):
        yield dict(zip(pf.generators, combo))


class ProxyNotFound(LookupError):
    pass


def find_proxy(pf: PartialFieldPresentation, prime_ceiling: int = 1000, bound: int = DEFAULT_BOUND,
               start: int = 2) -> Proxy:
    """Smallest prime p <= prime_ceiling admitting a proxy; image tuples tried in lexicographic order."""
    fund = fundamentals(pf, bound)
    nfund = len(fund)
    for p in range(start, prime_ceiling + 1):
        if not is_prime(p) or p < nfund:
            continue
        if p == 2:
            continue  # only odd primes and GF(4) are supported fields; GF(2) has too few elements anyway
        fld = make_field(p)
        for images in _image_tuples(pf, fld, fund):
            res = verify_proxy(pf, fld, images, bound, fund=fund)
            if isinstance(res, Proxy):
                log.info("proxy for %s: %s", pf.name, res.stanza())
                return res
    raise ProxyNotFound(f"no proxy for {pf.name} over primes <= {prime_ceiling}")
