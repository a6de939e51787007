"""Exact multivariate Laurent polynomials over the integers.

A :class:`LaurentPoly` is an immutable map from integer exponent vectors to
nonzero Python integers.  Matrices over the Laurent ring are plain nested
lists wrapped by :class:`LaurentMatrix`; their determinant is computed by
cofactor expansion with memoized minors, so no polynomial division is needed.
"""

from __future__ import annotations

import itertools
import re
from typing import Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

_UNIT_TOL = 1e-12


class LaurentPoly:
    """Laurent polynomial in ``d`` variables with integer coefficients.

    Parameters
    ----------
    d : int
        Number of variables.
    terms : mapping, optional
        Exponent vector -> coefficient.  Zero coefficients are dropped.
    """

    __slots__ = ("d", "_terms", "_hash")

    def __init__(self, d: int, terms: Mapping[Sequence[int], int] | None = None):
        if d < 0:
            raise ValueError("number of variables must be non-negative")
        self.d = d
        clean: dict[Exponent, int] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != d:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {d}")
            c = int(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    # constructors

    @classmethod
    def constant(cls, d: int, c: int) -> LaurentPoly:
        return cls(d, {(0,) * d: c})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: int = 1) -> LaurentPoly:
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def variable(cls, d: int, k: int, power: int = 1) -> LaurentPoly:
        """The monomial ``x_{k+1}^power`` (``k`` is 0-based)."""
        exp = [0] * d
        exp[k] = power
        return cls(d, {tuple(exp): 1})

    @classmethod
    def _raw(cls, d: int, terms: dict[Exponent, int]) -> LaurentPoly:
        obj = cls.__new__(cls)
        obj.d = d
        obj._terms = terms
        obj._hash = None
        return obj

    # inspection

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, exp: Sequence[int]) -> int:
        return self._terms.get(tuple(exp), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.d, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(self.d, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._terms.items())))
        return self._hash

    # ring operations

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            if other.d != self.d:
                raise ValueError(f"variable count mismatch: {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, np.integer)):
            return LaurentPoly.constant(self.d, int(other))
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return LaurentPoly._raw(self.d, out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw(self.d, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return LaurentPoly._raw(self.d, {})
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw(self.d, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if len(self._terms) != 1 or abs(next(iter(self._terms.values()))) != 1:
                raise ValueError("negative powers are only defined for units +-x^s")
            (exp, c), = self._terms.items()
            return LaurentPoly._raw(self.d, {tuple(k * e for e in exp): c ** (-k)})
        result = LaurentPoly.constant(self.d, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> LaurentPoly:
        """Multiply by the monomial ``x^exp``."""
        return LaurentPoly._raw(
            self.d, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self._terms.items()}
        )

    def substitute(self, images: Sequence[Sequence[int]]) -> LaurentPoly:
        """Monomial change of variables ``x_k -> x^{images[k]}``.

        ``images`` lists, for each of the ``d`` variables, the exponent vector
        of its image; the result lives in ``len(images[0])`` variables.
        """
        images = [tuple(int(v) for v in im) for im in images]
        if len(images) != self.d:
            raise ValueError("need one image per variable")
        d_new = len(images[0]) if images else 0
        out: dict[Exponent, int] = {}
        for e, c in self._terms.items():
            new = [0] * d_new
            for k, ek in enumerate(e):
                if ek:
                    for t in range(d_new):
                        new[t] += ek * images[k][t]
            key = tuple(new)
            out[key] = out.get(key, 0) + c
        return LaurentPoly._raw(d_new, {e: c for e, c in out.items() if c})

    # text form

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.d}, {to_text(self)!r})"


def add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def neg(a: LaurentPoly) -> LaurentPoly:
    return -a


def reciprocal(f: LaurentPoly) -> LaurentPoly:
    """Substitute ``x_k -> x_k^{-1}`` in every variable."""
    return LaurentPoly._raw(f.d, {tuple(-e for e in exp): c for exp, c in f.items()})


def unit_equivalent(f: LaurentPoly, g: LaurentPoly) -> bool:
    """True iff ``f = +-x^s * g`` for some exponent vector ``s``."""
    if f.d != g.d:
        raise ValueError("variable count mismatch")
    if f.is_zero() or g.is_zero():
        return f.is_zero() and g.is_zero()
    if len(f) != len(g):
        return False
    ef = max(f._terms)
    eg = max(g._terms)
    s = tuple(a - b for a, b in zip(ef, eg))
    shifted = g.shift(s)
    return shifted == f or -shifted == f


def _power(z: complex, k: int) -> complex:
    # |z| == 1 so z^-1 is the conjugate; square-and-multiply keeps the error O(log k)
    if k < 0:
        z, k = z.conjugate(), -k
    result = 1 + 0j
    while k:
        if k & 1:
            result *= z
        z *= z
        k >>= 1
    return result


def _coefficient_float(c: int) -> float:
    # Python rounds ints beyond 2**53 to nearest; overflow past ~1e308 raises
    return float(c)


def evaluate(f: LaurentPoly, c: Sequence[complex]) -> complex:
    """Evaluate ``f`` at a point of the unit torus.

    Each coordinate must have modulus 1 within 1e-12 so that negative powers
    can be taken as conjugates.  Coefficients beyond 2**53 are rounded to the
    nearest double.
    """
    c = [complex(z) for z in c]
    if len(c) != f.d:
        raise ValueError(f"expected {f.d} coordinates, got {len(c)}")
    for z in c:
        if abs(abs(z) - 1.0) > _UNIT_TOL:
            raise ValueError(f"point {z} is not on the unit circle")
    total = 0j
    for exp, coeff in sorted(f.items()):
        term = complex(_coefficient_float(coeff))
        for z, k in zip(c, exp):
            if k:
                term *= _power(z, k)
        total += term
    return total


def evaluate_phases(f: LaurentPoly, theta: np.ndarray) -> np.ndarray:
    """Vectorised evaluation at ``exp(2*pi*i*theta)``.

    ``theta`` has shape ``(..., d)`` and holds angles in turns.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape[:-1], dtype=complex)
    for exp, coeff in sorted(f.items()):
        phase = theta @ np.asarray(exp, dtype=float)
        out += _coefficient_float(coeff) * np.exp(2j * np.pi * phase)
    return out


def evaluate_rational_phases(f: LaurentPoly, numerators: np.ndarray, denominator: int) -> np.ndarray:
    """Evaluate at ``exp(2*pi*i*a/R)`` for integer rows ``a``.

    The phase ``s.a mod R`` is formed in exact integer arithmetic before the
    exponential, so no angle error accumulates with large exponents.
    """
    a = np.asarray(numerators, dtype=np.int64)
    out = np.zeros(a.shape[:-1], dtype=complex)
    for exp, coeff in sorted(f.items()):
        k = np.mod(a @ np.asarray(exp, dtype=np.int64), denominator)
        out += _coefficient_float(coeff) * np.exp(2j * np.pi * (k / denominator))
    return out


class LaurentMatrix:
    """Square matrix with :class:`LaurentPoly` entries sharing one ``d``."""

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]], d: int | None = None):
        rows = [list(r) for r in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        if d is None:
            if n == 0:
                raise ValueError("variable count required for an empty matrix")
            d = rows[0][0].d
        for r in rows:
            for e in r:
                if e.d != d:
                    raise ValueError("entries must share one variable count")
        self.d = d
        self.entries = rows

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> LaurentMatrix:
        n = self.size
        return LaurentMatrix([[self.entries[j][i] for j in range(n)] for i in range(n)], self.d)

    def map(self, fn) -> LaurentMatrix:
        return LaurentMatrix([[fn(e) for e in row] for row in self.entries], self.d)

    def evaluate(self, c: Sequence[complex]) -> np.ndarray:
        n = self.size
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = evaluate(self.entries[i][j], c)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentMatrix) and self.d == other.d and self.entries == other.entries


def determinant(M: LaurentMatrix) -> LaurentPoly:
    """Exact determinant by Laplace expansion with memoized minors.

    Row ``r`` is expanded against every column subset of size ``n - r``; each
    minor is computed once, for ``O(2^n n)`` ring operations.  The empty
    matrix has determinant 1.
    """
    n = M.size
    d = M.d
    one = LaurentPoly.constant(d, 1)
    if n == 0:
        return one
    rows = M.entries
    # memo[mask] = det of rows (n - popcount(mask))..n-1 against columns in mask
    memo: dict[int, LaurentPoly] = {0: one}
    for size in range(1, n + 1):
        r = n - size
        row = rows[r]
        for cols in itertools.combinations(range(n), size):
            mask = 0
            for j in cols:
                mask |= 1 << j
            acc = LaurentPoly._raw(d, {})
            for pos, j in enumerate(cols):
                entry = row[j]
                if entry.is_zero():
                    continue
                minor = memo.get(mask & ~(1 << j))
                if minor is None or minor.is_zero():
                    continue
                term = entry * minor
                acc = acc - term if pos & 1 else acc + term
            memo[mask] = acc
        # minors of the previous size are no longer needed
        for key in [k for k in memo if bin(k).count("1") == size - 1]:
            del memo[key]
    return memo[(1 << n) - 1]


def leibniz_determinant(M: LaurentMatrix) -> LaurentPoly:
    """Determinant as the signed sum over permutations; exponential, for checks."""
    n = M.size
    total = LaurentPoly.constant(M.d, 0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = LaurentPoly.constant(M.d, -1 if inversions & 1 else 1)
        for i, j in enumerate(perm):
            term = term * M.entries[i][j]
        total = total + term
    return total


# text rendering


def _term_order(exp: Exponent):
    # constant first, then by total degree; within a degree, x1 before x2 and
    # positive powers before negative ones
    return (sum(abs(e) for e in exp), tuple((-abs(e), -e) for e in exp))


def sorted_terms(f: LaurentPoly) -> list[tuple[Exponent, int]]:
    return sorted(f.items(), key=lambda item: _term_order(item[0]))


def _monomial_text(exp: Exponent) -> str:
    parts = []
    for k, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"x{k}")
        elif e:
            parts.append(f"x{k}^{e}")
    return "*".join(parts)


def to_text(f: LaurentPoly) -> str:
    """Render as e.g. ``4 - x1 - x1^-1 - x2 - x2^-1``."""
    if f.is_zero():
        return "0"
    pieces = []
    for idx, (exp, c) in enumerate(sorted_terms(f)):
        mono = _monomial_text(exp)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if idx == 0:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(("+ " if c > 0 else "- ") + body)
    return " ".join(pieces)


_FACTOR_RE = re.compile(r"^(?:(\d+)|x(\d+)(?:\^(-?\d+))?)$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    # a sign right after '^' belongs to an exponent, not a term boundary
    out = []
    sign, start = 1, 0
    for i, ch in enumerate(text):
        if ch in "+-" and (i == 0 or text[i - 1] != "^"):
            if i > start:
                out.append((sign, text[start:i]))
            elif i > 0:
                raise ValueError(f"dangling sign in {text!r}")
            sign = 1 if ch == "+" else -1
            start = i + 1
    if start >= len(text):
        raise ValueError(f"trailing sign in {text!r}")
    out.append((sign, text[start:]))
    return out


def from_text(text: str, d: int | None = None) -> LaurentPoly:
    """Parse the rendering produced by :func:`to_text`.

    Terms are ``[coeff*]x1^a*x2^b...`` joined by ``+``/``-``; ``d`` defaults
    to the largest variable index present.
    """
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty polynomial")
    raw = []
    max_var = 0
    for sign, body in _split_terms(text):
        coeff = sign
        powers: dict[int, int] = {}
        for factor in body.split("*"):
            m = _FACTOR_RE.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            if m.group(1) is not None:
                coeff *= int(m.group(1))
            else:
                k = int(m.group(2))
                if k < 1:
                    raise ValueError("variables are numbered from x1")
                powers[k] = powers.get(k, 0) + int(m.group(3) or 1)
                max_var = max(max_var, k)
        raw.append((coeff, powers))
    if d is None:
        d = max(max_var, 1)
    elif max_var > d:
        raise ValueError(f"variable x{max_var} exceeds d={d}")
    terms: dict[Exponent, int] = {}
    for coeff, powers in raw:
        exp = tuple(powers.get(k, 0) for k in range(1, d + 1))
        terms[exp] = terms.get(exp, 0) + coeff
    return LaurentPoly(d, terms)

