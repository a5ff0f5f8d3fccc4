"""Integer Smith normal form with a replayable row-operation log.

``smith_normal_form(A)`` returns ``D``, ``V`` and a list of elementary row
operations whose product ``U`` satisfies ``U @ A @ V == D``. The row
transform is kept as a log rather than a matrix because the systems this
is used on have many rows and few columns; ``apply_row_ops`` replays it on a
right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class SmithForm:
    diagonal: list[int]  # nonzero elementary divisors d_1 | d_2 | ...
    shape: tuple[int, int]
    V: list[list[int]]  # cols x cols, unimodular
    row_ops: list[tuple]

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def U(self) -> list[list[int]]:
        rows = self.shape[0]
        return [apply_row_ops(self.row_ops, [int(i == j) for i in range(rows)]) for j in range(rows)]

    def row_transform(self) -> list[list[int]]:
        """Materialize U (rows x rows). Only for small systems."""
        cols = self.U()
        rows = self.shape[0]
        return [[cols[j][i] for j in range(rows)] for i in range(rows)]

    def D(self) -> list[list[int]]:
        rows, cols = self.shape
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        return out


def apply_row_ops(ops, vec, modulus: int | None = None) -> list[int]:
    """Return U @ vec, optionally reduced mod ``modulus``."""
    v = [int(x) for x in vec]
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            v[i], v[j] = v[j], v[i]
        elif op[0] == "add":
            _, i, j, q = op
            v[i] += q * v[j]
        else:
            _, i = op
            v[i] = -v[i]
        if modulus is not None and op[0] == "add":
            v[op[1]] %= modulus
    if modulus is not None:
        v = [x % modulus for x in v]
    return v


def smith_normal_form(A) -> SmithForm:
    M = [[int(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]
    ops: list[tuple] = []

    def row_swap(i, j):
        if i != j:
            M[i], M[j] = M[j], M[i]
            ops.append(("swap", i, j))

    def row_add(i, j, q):  # row_i += q row_j
        if q:
            Mi, Mj = M[i], M[j]
            for c in range(cols):
                Mi[c] += q * Mj[c]
            ops.append(("add", i, j, q))

    def col_swap(i, j):
        if i != j:
            for row in M:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def col_add(i, j, q):  # col_i += q col_j
        if q:
            for row in M:
                row[i] += q * row[j]
            for row in V:
                row[i] += q * row[j]

    diagonal = []
    for t in range(min(rows, cols)):
        # smallest nonzero entry of the trailing block
        best = None
        for i in range(t, rows):
            Mi = M[i]
            for j in range(t, cols):
                if Mi[j] and (best is None or abs(Mi[j]) < best[0]):
                    best = (abs(Mi[j]), i, j)
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = M[t][t]
            moved = False
            for i in range(t + 1, rows):
                if M[i][t]:
                    row_add(i, t, -(M[i][t] // p))
                    if M[i][t] and abs(M[i][t]) < abs(M[t][t]):
                        row_swap(t, i)
                        moved = True
                        break
            if moved:
                continue
            p = M[t][t]
            for j in range(t + 1, cols):
                if M[t][j]:
                    col_add(j, t, -(M[t][j] // p))
                    if M[t][j] and abs(M[t][j]) < abs(M[t][t]):
                        col_swap(t, j)
                        moved = True
                        break
            if moved:
                continue
            if any(M[i][t] for i in range(t + 1, rows)) or any(M[t][j] for j in range(t + 1, cols)):
                continue
            p = M[t][t]
            bad = next(
                (i for i in range(t + 1, rows) if any(M[i][j] % p for j in range(t + 1, cols))),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            ops.append(("neg", t))
        diagonal.append(M[t][t])
    return SmithForm(diagonal=diagonal, shape=(rows, cols), V=V, row_ops=ops)


def solve_mod(form: SmithForm, rhs, modulus: int) -> list[int] | None:
    """Solve A x = rhs (mod ``modulus``) given the Smith form of A, or None.

    Works on the lifted system A x = rhs + modulus z: with y = V^-1 x and
    r = U rhs, row i < rank is solvable iff gcd(d_i, modulus) divides r_i, and
    every row at or beyond the rank needs r_i = 0 (mod modulus).
    """
    L = modulus
    r = apply_row_ops(form.row_ops, rhs, modulus=L)
    rows, cols = form.shape
    y = [0] * cols
    for i in range(rows):
        if i < form.rank:
            d = form.diagonal[i]
            g = math.gcd(d, L)
            if r[i] % g:
                return None
            Lg = L // g
            y[i] = (r[i] // g) * pow(d // g, -1, Lg) % Lg if Lg > 1 else 0
        elif r[i] % L:
            return None
    return [sum(form.V[i][j] * y[j] for j in range(cols)) % L for i in range(cols)]
