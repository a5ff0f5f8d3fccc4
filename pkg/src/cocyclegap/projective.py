"""Twisted regular representations as generalized permutation operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cocycles import PhaseCocycle
from ._kernels import tensor_gather
from .groups import FiniteGroup, Word


@lru_cache(maxsize=None)
def phase_table(order: int) -> np.ndarray:
    """exp(2 pi i q / order) for q in [0, order)."""
    q = np.arange(order)
    table = np.exp(2j * np.pi * q / order)
    table[0] = 1.0
    return table


@dataclass(frozen=True, eq=False)
class GenPermOperator:
    """Unitary sending e_j to exp(2 pi i phase[j] / order) e_{perm[j]}."""

    perm: np.ndarray
    phase: np.ndarray
    order: int = 1

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        phase = np.asarray(self.phase, dtype=np.int64) % self.order
        if perm.shape != phase.shape or perm.ndim != 1:
            raise ValueError("perm and phase must be 1-d arrays of equal length")
        if not np.array_equal(np.sort(perm), np.arange(len(perm))):
            raise ValueError("perm is not a bijection")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "phase", phase)

    @property
    def dim(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, dim: int, order: int = 1) -> GenPermOperator:
        return cls(np.arange(dim), np.zeros(dim, dtype=np.int64), order)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(self.dim)) and not self.phase.any())

    def lift(self, order: int) -> GenPermOperator:
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        return GenPermOperator(self.perm, self.phase * (order // self.order), order)

    def weights(self) -> np.ndarray:
        return phase_table(self.order)[self.phase]

    @property
    def inverse_perm(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.dim)
        return inv

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: operator {self.dim}, vector {v.shape[0]}")
        out = np.empty(v.shape, dtype=complex)
        out[self.perm] = (self.weights() * v.T).T
        return out

    def adjoint(self) -> GenPermOperator:
        inv = self.inverse_perm
        return GenPermOperator(inv, -self.phase[inv], self.order)

    def compose(self, other: GenPermOperator) -> GenPermOperator:
        """self after other."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        L = math.lcm(self.order, other.order)
        a, b = self.lift(L), other.lift(L)
        return GenPermOperator(a.perm[b.perm], a.phase[b.perm] + b.phase, L)

    def scale_phase(self, q: int, order: int | None = None) -> GenPermOperator:
        """Multiply by exp(2 pi i q / order) (order defaults to self.order)."""
        order = self.order if order is None else order
        L = math.lcm(self.order, order)
        a = self.lift(L)
        return GenPermOperator(a.perm, a.phase + int(q) * (L // order), L)

    def conjugate(self) -> GenPermOperator:
        return GenPermOperator(self.perm, -self.phase, self.order)

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=complex)
        M[self.perm, np.arange(self.dim)] = self.weights()
        return M

    def __eq__(self, other):
        if not isinstance(other, GenPermOperator) or self.dim != other.dim:
            return NotImplemented if not isinstance(other, GenPermOperator) else False
        L = math.lcm(self.order, other.order)
        a, b = self.lift(L), other.lift(L)
        return bool(np.array_equal(a.perm, b.perm) and np.array_equal(a.phase, b.phase))

    def normalized_trace(self) -> tuple[int, np.ndarray]:
        """(number of fixed basis vectors, their phases); trace / dim is exact from these."""
        fixed = np.flatnonzero(self.perm == np.arange(self.dim))
        return len(fixed), self.phase[fixed]


class ProjectiveRep:
    """pi_c(g) e_h = c(g, h) e_{gh} on l^2(G)."""

    def __init__(self, group: FiniteGroup, cocycle: PhaseCocycle):
        if cocycle.group is not group:
            raise ValueError("cocycle lives on a different group")
        self.group = group
        self.cocycle = cocycle
        self._all = group.all_indices()

    @property
    def dim(self) -> int:
        return self.group.size

    def op(self, g: int) -> GenPermOperator:
        h = self._all
        return GenPermOperator(self.group.mul(int(g), h), self.cocycle(int(g), h), self.cocycle.order)

    def op_word(self, w: Word | str) -> GenPermOperator:
        if isinstance(w, str):
            w = Word.parse(w)
        return self.op(w.evaluate(self.group))


def regular_rep(G: FiniteGroup, c: PhaseCocycle) -> ProjectiveRep:
    return ProjectiveRep(G, c)


class TensorSumOperator:
    """sum_i A_i (x) conj(B_i) acting on C^{d1} (x) C^{d2}, never densified.

    Vectors are flattened row-major from (d1, d2) arrays, matching np.kron.
    """

    def __init__(self, left: list[GenPermOperator], right: list[GenPermOperator], backend: str = "compiled"):
        if len(left) != len(right) or not left:
            raise ValueError("need equally many (>= 1) left and right operators")
        self.d1, self.d2 = left[0].dim, right[0].dim
        if any(a.dim != self.d1 for a in left) or any(b.dim != self.d2 for b in right):
            raise ValueError("operator dimensions differ within a factor")
        if backend not in ("compiled", "numpy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.left = list(left)
        self.right = list(right)
        self.m = len(left)
        self.backend = backend
        terms = [(a, b) for a, b in zip(self.left, self.right) if not (a.is_identity() and b.is_identity())]
        self.n_identity = self.m - len(terms)
        self._inv_a = np.array([a.inverse_perm for a, _ in terms], dtype=np.int64).reshape(-1, self.d1)
        self._wa = np.array([a.weights() for a, _ in terms], dtype=complex).reshape(-1, self.d1)
        self._inv_b = np.array([b.inverse_perm for _, b in terms], dtype=np.int64).reshape(-1, self.d2)
        wb = np.array([np.conj(b.weights()) for _, b in terms], dtype=complex).reshape(-1, self.d2)
        self._wb = wb
        self._wb_gathered = np.take_along_axis(wb, self._inv_b, axis=1)

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    def apply(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        X = np.ascontiguousarray(x, dtype=complex).reshape(self.d1, self.d2)
        if self.backend == "compiled":
            Y = np.empty_like(X) if out is None else out.reshape(self.d1, self.d2)
            tensor_gather(X, self._inv_a, self._wa, self._inv_b, self._wb_gathered, float(self.n_identity), Y)
            return Y.reshape(-1)
        if out is not None:
            out[:] = self.apply(x)
            return out
        Y = self.n_identity * X
        for inv_a, wa, inv_b, wb in zip(self._inv_a, self._wa, self._inv_b, self._wb):
            Z = X * wa[:, None]
            Z *= wb[None, :]
            Y += Z.take(inv_a, axis=0).take(inv_b, axis=1)
        return Y.reshape(-1)

    def with_backend(self, backend: str) -> TensorSumOperator:
        return TensorSumOperator(self.left, self.right, backend=backend)

    def adjoint(self) -> TensorSumOperator:
        return TensorSumOperator([a.adjoint() for a in self.left], [b.adjoint() for b in self.right], self.backend)

    def conjugate(self) -> TensorSumOperator:
        """Entrywise complex conjugate: every phase negated."""
        return TensorSumOperator([a.conjugate() for a in self.left], [b.conjugate() for b in self.right], self.backend)

    def swap(self) -> TensorSumOperator:
        """sum_i B_i (x) conj(A_i)."""
        return TensorSumOperator(self.right, self.left, self.backend)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for a, b in zip(self.left, self.right):
            out += np.kron(a.to_dense(), np.conj(b.to_dense()))
        return out


def tensor_sum(rep_left: ProjectiveRep, rep_right: ProjectiveRep, words) -> TensorSumOperator:
    """sum_i pi(w_i) (x) conj(pi'(w_i)), words reduced into each group."""
    words = [Word.parse(w) if isinstance(w, str) else w for w in words]
    return TensorSumOperator([rep_left.op_word(w) for w in words], [rep_right.op_word(w) for w in words])
