"""Exact sparse multivariate polynomials over the Gaussian rationals.

Terms are kept sorted under the homogeneous lexicographic order: total degree
first, then the first differing exponent decides (smaller exponent = smaller
monomial).  The *initial* term of a germ is the minimal one, which is what a
local ring cares about.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

Exponent = tuple  # tuple[int, ...]


class ZeroGermError(ValueError):
    """Raised when initial data of the zero polynomial is requested."""


class DimensionError(ValueError):
    pass


# --------------------------------------------------------------------------
# coefficients


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        if isinstance(x, complex):
            raise TypeError("complex floats are not exact; pass Fractions")
        if isinstance(x, str):
            return cls(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("zero has no inverse in Q(i)")
        if not self.im:
            return GaussianRational(1 / self.re)
        norm = self.re * self.re + self.im * self.im
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_coefficient(self)


def format_coefficient(c: GaussianRational) -> str:
    """Canonical text ``p/q+r/s*i``; zero parts are suppressed."""
    if not c.im:
        return str(c.re)
    if c.im == 1:
        imag = "i"
    elif c.im == -1:
        imag = "-i"
    else:
        imag = f"{c.im}*i"
    if not c.re:
        return imag
    if imag.startswith("-"):
        return f"{c.re}{imag}"
    return f"{c.re}+{imag}"


ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


# --------------------------------------------------------------------------
# exponents and the monomial order


def degree(alpha: Sequence[int]) -> int:
    return sum(alpha)


def monomial_key(alpha: Sequence[int]) -> tuple:
    """Sort key realising the homogeneous lexicographic order."""
    return (sum(alpha), *alpha)


def check_exponent(alpha: Iterable[int], n: int | None = None) -> Exponent:
    alpha = tuple(alpha)
    if any((not isinstance(a, int)) or a < 0 for a in alpha):
        raise ValueError(f"exponent entries must be non-negative integers: {alpha}")
    if n is not None and len(alpha) != n:
        raise DimensionError(f"exponent {alpha} does not have dimension {n}")
    return alpha


def cmp_monomials(alpha: Sequence[int], beta: Sequence[int]) -> int:
    """Compare ``z^alpha`` with ``z^beta``; returns -1, 0 or 1."""
    if len(alpha) != len(beta):
        raise DimensionError(f"dimension mismatch: {len(alpha)} vs {len(beta)}")
    ka, kb = monomial_key(alpha), monomial_key(beta)
    return (ka > kb) - (ka < kb)


def divides(alpha: Sequence[int], beta: Sequence[int]) -> bool:
    """True iff ``z^alpha`` divides ``z^beta``."""
    return all(a <= b for a, b in zip(alpha, beta))


def add_exp(alpha, beta) -> Exponent:
    return tuple(a + b for a, b in zip(alpha, beta))


def sub_exp(alpha, beta) -> Exponent:
    out = tuple(a - b for a, b in zip(alpha, beta))
    if any(e < 0 for e in out):
        raise ValueError(f"{beta} does not divide {alpha}")
    return out


def lcm_exp(alpha, beta) -> Exponent:
    return tuple(max(a, b) for a, b in zip(alpha, beta))


def exponents_up_to(n: int, D: int) -> Iterator[Exponent]:
    """All exponents of dimension n and total degree <= D, in monomial order."""
    out = [a for a in product(range(D + 1), repeat=n) if sum(a) <= D]
    out.sort(key=monomial_key)
    return iter(out)


# --------------------------------------------------------------------------
# monomial ideals


class MonomialIdeal:
    """Monomial ideal stored by its minimal generators (an antichain)."""

    __slots__ = ("gens", "dim")

    def __init__(self, gens: Iterable[Sequence[int]], dim: int):
        self.dim = dim
        self.gens = _antichain(check_exponent(g, dim) for g in gens)

    def __contains__(self, alpha) -> bool:
        return ideal_membership_monomial(alpha, self)

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        return (0,) * self.dim in self.gens

    def __eq__(self, other):
        if not isinstance(other, MonomialIdeal):
            return NotImplemented
        return self.dim == other.dim and self.gens == other.gens

    def __hash__(self):
        return hash((self.dim, self.gens))

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return f"MonomialIdeal({list(self.gens)}, dim={self.dim})"


def _antichain(exps: Iterable[Exponent]) -> tuple:
    keep: list[Exponent] = []
    for a in sorted(set(exps), key=monomial_key):
        # anything dividing `a` is no larger, so it is already in `keep`
        if not any(divides(g, a) for g in keep):
            keep.append(a)
    return tuple(keep)


def minimal_generators(exps: Iterable[Sequence[int]], dim: int | None = None) -> MonomialIdeal:
    exps = [tuple(e) for e in exps]
    if dim is None:
        if not exps:
            raise ValueError("dimension required for an empty generator set")
        dim = len(exps[0])
    return MonomialIdeal(exps, dim)


def ideal_membership_monomial(alpha: Sequence[int], ideal: MonomialIdeal) -> bool:
    if len(alpha) != ideal.dim:
        raise DimensionError(f"exponent {tuple(alpha)} vs ideal of dimension {ideal.dim}")
    return any(divides(g, alpha) for g in ideal.gens)


# --------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial, optionally truncated at degree ``trunc``.

    A truncated polynomial stands for a germ known only modulo terms of degree
    > trunc.  Equality compares dimension and stored terms.
    """

    __slots__ = ("dim", "trunc", "_terms", "_sorted")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None,
                 dim: int | None = None, trunc: int | None = None):
        clean: dict[Exponent, GaussianRational] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(exp)
            if dim is None:
                dim = len(exp)
            check_exponent(exp, dim)
            c = GaussianRational.coerce(coef)
            if not c or (trunc is not None and sum(exp) > trunc):
                continue
            clean[exp] = clean[exp] + c if exp in clean else c
            if not clean[exp]:
                del clean[exp]
        if dim is None:
            raise ValueError("dimension required for the zero polynomial")
        if trunc is not None and trunc < 0:
            raise ValueError("truncation degree must be >= 0")
        self.dim = dim
        self.trunc = trunc
        self._terms = clean
        self._sorted = None

    @classmethod
    def _raw(cls, terms: dict, dim: int, trunc: int | None) -> "Polynomial":
        p = cls.__new__(cls)
        p.dim, p.trunc, p._terms, p._sorted = dim, trunc, terms, None
        return p

    # constructors
    @classmethod
    def zero(cls, n: int, trunc: int | None = None) -> "Polynomial":
        return cls._raw({}, n, trunc)

    @classmethod
    def constant(cls, c, n: int) -> "Polynomial":
        return cls({(0,) * n: c}, n)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coef=1) -> "Polynomial":
        alpha = tuple(alpha)
        return cls({alpha: coef}, len(alpha))

    @classmethod
    def variable(cls, i: int, n: int) -> "Polynomial":
        """The coordinate ``z_{i+1}`` (0-based index ``i``)."""
        e = [0] * n
        e[i] = 1
        return cls.monomial(e)

    # structure
    @property
    def terms(self) -> list:
        """List of ``(exponent, coefficient)`` in increasing monomial order."""
        if self._sorted is None:
            self._sorted = sorted(self._terms.items(), key=lambda t: monomial_key(t[0]))
        return self._sorted

    def coefficient(self, alpha) -> GaussianRational:
        return self._terms.get(tuple(alpha), GaussianRational(0))

    def as_dict(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def order(self) -> int:
        """Degree of the initial monomial (-1 for zero)."""
        return sum(self.terms[0][0]) if self._terms else -1

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if not c:
            return not self._terms
        return self._terms == {(0,) * self.dim: c}

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def _check(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.dim)

    # arithmetic
    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self._terms)
        for e, c in other._terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        if trunc is not None:
            out = {e: c for e, c in out.items() if sum(e) <= trunc}
        return Polynomial._raw(out, self.dim, trunc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({e: -c for e, c in self._terms.items()}, self.dim, self.trunc)

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        # a factor known mod deg > D pins the product only mod deg > D + ord(other factor)
        trunc = None
        if self.trunc is not None:
            trunc = self.trunc + max(other.order(), 0)
        if other.trunc is not None:
            trunc = _min_trunc(trunc, other.trunc + max(self.order(), 0))
        out: dict[Exponent, GaussianRational] = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if trunc is not None and sum(e) > trunc:
                    continue
                out[e] = out[e] + ca * cb if e in out else ca * cb
        out = {e: c for e, c in out.items() if c}
        return Polynomial._raw(out, self.dim, trunc)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.constant(1, self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = GaussianRational.coerce(c)
        if not c:
            return Polynomial._raw({}, self.dim, self.trunc)
        return Polynomial._raw({e: c * v for e, v in self._terms.items()}, self.dim, self.trunc)

    def mul_term(self, coef, alpha) -> "Polynomial":
        """Multiply by the single term ``coef * z^alpha``."""
        coef = GaussianRational.coerce(coef)
        alpha = tuple(alpha)
        trunc = None if self.trunc is None else self.trunc + sum(alpha)
        return Polynomial._raw(
            {tuple(a + b for a, b in zip(e, alpha)): coef * c for e, c in self._terms.items()},
            self.dim, trunc)

    def truncate(self, D: int) -> "Polynomial":
        if D < 0:
            raise ValueError("truncation degree must be >= 0")
        D = D if self.trunc is None else min(D, self.trunc)
        return Polynomial._raw({e: c for e, c in self._terms.items() if sum(e) <= D}, self.dim, D)

    def untruncated(self) -> "Polynomial":
        return Polynomial._raw(dict(self._terms), self.dim, None)

    def monic(self) -> "Polynomial":
        return self.scale(initial_data(self)[0].inverse())

    def drop_initial(self) -> "Polynomial":
        out = dict(self._terms)
        del out[self.terms[0][0]]
        return Polynomial._raw(out, self.dim, self.trunc)

    def evaluate(self, z):
        """Evaluate at a point or a batch of points (last axis = coordinates)."""
        import numpy as np

        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise DimensionError(f"point dimension {z.shape[-1]} vs {self.dim}")
        out = np.zeros(z.shape[:-1], dtype=complex)
        for e, c in self._terms.items():
            t = np.full(z.shape[:-1], complex(c))
            for k, a in enumerate(e):
                if a:
                    t = t * z[..., k] ** a
            out = out + t
        return out

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self._terms), default=-1)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, dim={self.dim}, trunc={self.trunc})"

    def __str__(self):
        return format_polynomial(self)


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def initial_data(f: Polynomial):
    """Return ``(IC, IM, IT)`` of a nonzero polynomial; IT is ``(coef, exp)``."""
    if f.is_zero():
        raise ZeroGermError("the zero germ has no initial term")
    exp, coef = f.terms[0]
    return coef, exp, (coef, exp)


def initial_monomial(f: Polynomial) -> Exponent:
    return initial_data(f)[1]


def initial_coefficient(f: Polynomial) -> GaussianRational:
    return initial_data(f)[0]


def support(f: Polynomial) -> set:
    return set(f._terms)


def add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def scale(f: Polynomial, c) -> Polynomial:
    return f.scale(c)


def truncate(f: Polynomial, D: int) -> Polynomial:
    return f.truncate(D)


# --------------------------------------------------------------------------
# printing


def _monomial_text(alpha) -> str:
    parts = []
    for k, a in enumerate(alpha, start=1):
        if a == 1:
            parts.append(f"z{k}")
        elif a > 1:
            parts.append(f"z{k}^{a}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text: terms in increasing monomial order."""
    if f.is_zero():
        return "0"
    pieces = []
    for exp, c in f.terms:
        mono = _monomial_text(exp)
        negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
        mag = -c if negative else c
        if not mono:
            body = format_coefficient(mag)
        elif mag == 1:
            body = mono
        elif mag.re and mag.im:
            body = f"({format_coefficient(mag)})*{mono}"
        else:
            body = f"{format_coefficient(mag)}*{mono}"
        if not pieces:
            pieces.append(("-" if negative else "") + body)
        elif not mono and mag.re and mag.im:
            pieces.append(("- " if negative else "+ ") + f"({body})")
        else:
            pieces.append(("- " if negative else "+ ") + body)
    return " ".join(pieces)
