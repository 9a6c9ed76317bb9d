"""Polynomials in the entries of a symmetric n x n matrix variable.

Terms are stored against integer exponent matrices; evaluation works on a
single matrix or on an arbitrary stack of them.  A small text grammar covers
the common weights: ``1``, ``det``, ``det^3``, ``X_{1,2}``, and integer
combinations such as ``2*X_{1,1}*X_{2,2} - det``.
"""

from __future__ import annotations

import functools
import itertools
import re

import numpy as np

from .errors import DimensionError, DomainError

_TOKEN = re.compile(r"(X_\{\s*(\d+)\s*,\s*(\d+)\s*\}|det|\d+|\^|\*|\+|-)")


def _canonical_terms(n, terms):
    canon = {}
    for exps, coeff in terms.items():
        E = tuple(tuple(int(v) for v in row) for row in exps)
        if len(E) != n or any(len(row) != n for row in E):
            raise DimensionError(f"exponent matrix must be {n}x{n}")
        if any(v < 0 for row in E for v in row):
            raise DomainError("exponents must be nonnegative")
        c = complex(coeff)
        if c != 0:
            canon[E] = canon.get(E, 0j) + c
    return {e: c for e, c in sorted(canon.items()) if c != 0}


class MatrixPolynomial:
    """Immutable polynomial in the entries of an n x n matrix."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms=None):
        n = int(n)
        if n < 1:
            raise DimensionError("matrix size must be positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_terms", _canonical_terms(n, dict(terms or {})))

    def __setattr__(self, *_):
        raise AttributeError("MatrixPolynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "MatrixPolynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "MatrixPolynomial":
        zero_exp = tuple(tuple(0 for _ in range(n)) for _ in range(n))
        return cls(n, {zero_exp: c})

    @classmethod
    def one(cls, n: int) -> "MatrixPolynomial":
        return cls.constant(n, 1.0)

    @classmethod
    def coordinate(cls, n: int, r: int, s: int) -> "MatrixPolynomial":
        """The entry X_{r,s}, indices 1-based."""
        if not (1 <= r <= n and 1 <= s <= n):
            raise DomainError(f"coordinate indices must lie in 1..{n}")
        exp = [[0] * n for _ in range(n)]
        exp[r - 1][s - 1] = 1
        return cls(n, {tuple(map(tuple, exp)): 1.0})

    @classmethod
    def det_power(cls, n: int, power: int) -> "MatrixPolynomial":
        if power < 0:
            raise DomainError("determinant power must be nonnegative")
        return _det_power_cached(n, int(power))

    # -- structure ----------------------------------------------------------

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(v for row in e for v in row) for e in self._terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatrixPolynomial)
                and self.n == other.n and self._terms == other._terms)

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"MatrixPolynomial({self.n}, 0)"
        return f"MatrixPolynomial({self.n}, {len(self._terms)} terms, degree {self.degree()})"

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other):
        if self.n != other.n:
            raise DimensionError("polynomials have different matrix sizes")

    def __add__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        self._check_compatible(other)
        merged = dict(self._terms)
        for e, c in other._terms.items():
            merged[e] = merged.get(e, 0j) + c
        return MatrixPolynomial(self.n, merged)

    def __neg__(self):
        return MatrixPolynomial(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return MatrixPolynomial(self.n, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        self._check_compatible(other)
        prod: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(e1, e2))
                prod[e] = prod.get(e, 0j) + c1 * c2
        return MatrixPolynomial(self.n, prod)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative powers are not polynomials")
        out = MatrixPolynomial.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, w) -> complex:
        """Value at a single n x n matrix."""
        return complex(self.evaluate_batch(np.asarray(w, dtype=np.complex128)))

    def evaluate_batch(self, W: np.ndarray) -> np.ndarray:
        """Value at a stack of matrices with shape (..., n, n)."""
        W = np.asarray(W, dtype=np.complex128)
        if W.shape[-2:] != (self.n, self.n):
            raise DimensionError(f"argument must have trailing shape ({self.n}, {self.n})")
        out = np.zeros(W.shape[:-2], dtype=np.complex128)
        for exps, coeff in self._terms.items():
            E = np.asarray(exps)
            mask = E > 0
            if mask.any():
                term = np.prod(W[..., mask] ** E[mask], axis=-1)
            else:
                term = np.ones(W.shape[:-2], dtype=np.complex128)
            out = out + coeff * term
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> list:
        return [{"coeff": [c.real, c.imag], "exps": [list(row) for row in e]}
                for e, c in self._terms.items()]

    @classmethod
    def from_json(cls, obj, n: int) -> "MatrixPolynomial":
        if not isinstance(obj, list):
            raise DomainError("polynomial JSON must be a list of terms")
        terms: dict = {}
        for item in obj:
            try:
                re_c, im_c = item["coeff"]
                exps = tuple(tuple(int(v) for v in row) for row in item["exps"])
            except (KeyError, TypeError, ValueError) as exc:
                raise DomainError(f"malformed polynomial term ({exc})") from None
            terms[exps] = terms.get(exps, 0j) + complex(re_c, im_c)
        return cls(n, terms)


@functools.lru_cache(maxsize=None)
def _det_power_cached(n: int, power: int) -> MatrixPolynomial:
    det = MatrixPolynomial.zero(n)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        exp = [[0] * n for _ in range(n)]
        for i, j in enumerate(perm):
            exp[i][j] += 1
        det = det + MatrixPolynomial(n, {tuple(map(tuple, exp)): float(sign)})
    return det ** power


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

def parse_polynomial(text: str, n: int) -> MatrixPolynomial:
    """Parse the shorthand grammar into a polynomial of size n."""
    tokens = []
    pos = 0
    for mo in _TOKEN.finditer(text):
        if text[pos:mo.start()].strip():
            raise DomainError(f"unrecognized input near {text[pos:mo.start()]!r}")
        tokens.append(mo)
        pos = mo.end()
    if text[pos:].strip():
        raise DomainError(f"unrecognized input near {text[pos:]!r}")
    parser = _Parser(tokens, n)
    result = parser.expression()
    if parser.peek() is not None:
        raise DomainError(f"unexpected token {parser.peek().group(0)!r}")
    return result


class _Parser:
    def __init__(self, tokens, n):
        self.tokens = tokens
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise DomainError("unexpected end of polynomial text")
        self.i += 1
        return tok

    def expression(self) -> MatrixPolynomial:
        sign = 1
        tok = self.peek()
        if tok is not None and tok.group(0) in "+-":
            self.take()
            sign = -1 if tok.group(0) == "-" else 1
        out = self.term() * sign
        while (tok := self.peek()) is not None and tok.group(0) in "+-":
            self.take()
            nxt = self.term()
            out = out - nxt if tok.group(0) == "-" else out + nxt
        return out

    def term(self) -> MatrixPolynomial:
        out = self.factor()
        while (tok := self.peek()) is not None and tok.group(0) == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> MatrixPolynomial:
        tok = self.take()
        text = tok.group(0)
        if text == "det":
            base = MatrixPolynomial.det_power(self.n, 1)
        elif text.startswith("X"):
            base = MatrixPolynomial.coordinate(self.n, int(tok.group(2)), int(tok.group(3)))
        elif text.isdigit():
            base = MatrixPolynomial.constant(self.n, float(text))
        else:
            raise DomainError(f"unexpected token {text!r}")
        if (nxt := self.peek()) is not None and nxt.group(0) == "^":
            self.take()
            ptok = self.take()
            if not ptok.group(0).isdigit():
                raise DomainError("exponent must be a nonnegative integer")
            base = base ** int(ptok.group(0))
        return base
