"""Finite commutative rings with integer-coded elements.

Every ring element is stored as a canonical integer code in ``[0, size)``:
a residue for Z/N, and the base-p digits (low degree first) of the reduced
coefficient vector for GF(p)[X]/(f). All arithmetic is vectorized over
numpy integer arrays of codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class RingError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FiniteRing:
    """Z/N (``kind="zmod"``) or GF(p)[X]/(f) (``kind="poly"``).

    ``f`` is a coefficient list, low degree first. It is normalized to be
    monic, which does not change the ideal it generates.
    """

    kind: str
    n: int = 0
    p: int = 0
    f: tuple[int, ...] = ()
    size: int = field(init=False)

    def __post_init__(self):
        if self.kind == "zmod":
            if self.n < 1:
                raise RingError(f"modulus must be positive, got {self.n}")
            object.__setattr__(self, "size", self.n)
        elif self.kind == "poly":
            if not _is_prime(self.p):
                raise RingError(f"p={self.p} is not prime")
            f = [int(c) % self.p for c in self.f]
            while f and f[-1] == 0:
                f.pop()
            if len(f) < 2:
                raise RingError("f must have degree >= 1")
            lead_inv = pow(f[-1], -1, self.p)
            f = [(c * lead_inv) % self.p for c in f]
            object.__setattr__(self, "f", tuple(f))
            object.__setattr__(self, "size", self.p ** (len(f) - 1))
        else:
            raise RingError(f"unknown ring kind {self.kind!r}")

    # -- construction -----------------------------------------------------

    @classmethod
    def zmod(cls, n: int) -> FiniteRing:
        return cls("zmod", n=int(n))

    @classmethod
    def poly(cls, p: int, f) -> FiniteRing:
        return cls("poly", p=int(p), f=tuple(int(c) for c in f))

    @classmethod
    def from_descriptor(cls, desc: dict) -> FiniteRing:
        kind = desc.get("kind")
        if kind == "zmod":
            return cls.zmod(desc["n"])
        if kind == "poly":
            return cls.poly(desc["p"], desc["f"])
        raise RingError(f"unknown ring kind {kind!r}")

    def descriptor(self) -> dict:
        if self.kind == "zmod":
            return {"kind": "zmod", "n": self.n}
        return {"kind": "poly", "p": self.p, "f": list(self.f)}

    def __repr__(self):
        if self.kind == "zmod":
            return f"Z/{self.n}"
        return f"GF({self.p})[X]/({_poly_str(self.f)})"

    # -- structure --------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.f) - 1 if self.kind == "poly" else 1

    @property
    def characteristic(self) -> int:
        return self.n if self.kind == "zmod" else self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 0 if self.size == 1 else 1

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def coeffs(self, x: int) -> tuple[int, ...]:
        """Coefficient vector of ``x`` (low degree first)."""
        if self.kind == "zmod":
            return (int(x),)
        out = []
        x = int(x)
        for _ in range(self.degree):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        if self.kind == "zmod":
            return int(coeffs[0]) % self.n if len(coeffs) else 0
        reduced = _poly_mod([int(c) % self.p for c in coeffs], self.f, self.p)
        code = 0
        for c in reversed(reduced):
            code = code * self.p + c
        return code

    def from_int(self, a: int) -> int:
        """Image of the integer ``a`` under Z -> R."""
        if self.kind == "zmod":
            return int(a) % self.n
        return self.from_coeffs([a])

    def additive_generators(self) -> list[int]:
        if self.size == 1:
            return []
        if self.kind == "zmod":
            return [1]
        return [self.p**i for i in range(self.degree)]

    # -- arithmetic -------------------------------------------------------

    @cached_property
    def _tables(self):
        q = self.size
        if self.kind == "zmod":
            return None
        digits = np.array([self.coeffs(x) for x in range(q)], dtype=np.int64).reshape(q, self.degree)
        powers = self.p ** np.arange(self.degree, dtype=np.int64)
        add = ((digits[:, None, :] + digits[None, :, :]) % self.p) @ powers
        neg = ((-digits) % self.p) @ powers
        mul = np.empty((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                prod = _poly_mul(digits[x].tolist(), digits[y].tolist(), self.p)
                mul[x, y] = self.from_coeffs(prod)
        return add, neg, mul

    def add(self, x, y):
        if self.kind == "zmod":
            return (np.asarray(x) + np.asarray(y)) % self.n
        return self._tables[0][x, y]

    def neg(self, x):
        if self.kind == "zmod":
            return (-np.asarray(x)) % self.n
        return self._tables[1][x]

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.kind == "zmod":
            return (np.asarray(x) * np.asarray(y)) % self.n
        return self._tables[2][x, y]


def _poly_str(f) -> str:
    terms = []
    for i, c in reversed(list(enumerate(f))):
        if c == 0:
            continue
        mono = "1" if i == 0 else ("X" if i == 1 else f"X^{i}")
        terms.append(mono if c == 1 and i > 0 else (f"{c}" if i == 0 else f"{c}{mono}"))
    return "+".join(terms) or "0"


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_mod(a, f, p):
    # f is monic
    d = len(f) - 1
    a = list(a)
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i] % p
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * f[j]) % p
    a = a[:d] + [0] * max(0, d - len(a))
    return [c % p for c in a]
