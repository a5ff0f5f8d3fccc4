import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from cocyclegap.snf import apply_row_ops, smith_normal_form, solve_mod


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_against_sympy(A):
    form = smith_normal_form(A)
    U, V, D = form.row_transform(), form.V, form.D()
    assert _matmul(_matmul(U, A), V) == D
    assert abs(sympy.Matrix(U).det()) == 1 and abs(sympy.Matrix(V).det()) == 1
    assert all(d > 0 for d in form.diagonal)
    assert all(b % a == 0 for a, b in zip(form.diagonal, form.diagonal[1:]))
    ref = sympy_snf(sympy.Matrix(A), domain=sympy.ZZ)
    ref_diag = [abs(int(ref[i, i])) for i in range(min(ref.shape)) if ref[i, i] != 0]
    assert form.diagonal == ref_diag


def test_zero_matrix():
    form = smith_normal_form([[0, 0], [0, 0]])
    assert form.rank == 0


@settings(max_examples=150, deadline=None)
@given(matrices, st.integers(2, 12), st.data())
def test_solve_mod_matches_brute_force(A, L, data):
    rows, cols = len(A), len(A[0])
    rhs = data.draw(st.lists(st.integers(0, L - 1), min_size=rows, max_size=rows))
    x = solve_mod(smith_normal_form(A), rhs, L)
    if x is not None:
        assert [sum(a * b for a, b in zip(row, x)) % L for row in A] == rhs
    if L**cols <= 5000:
        import itertools

        exists = any(
            [sum(a * b for a, b in zip(row, y)) % L for row in A] == rhs
            for y in itertools.product(range(L), repeat=cols)
        )
        assert exists == (x is not None)


def test_solvable_images_always_solve():
    rng = random.Random(3)
    for _ in range(50):
        A = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(7)]
        y = [rng.randint(0, 9) for _ in range(4)]
        rhs = [sum(a * b for a, b in zip(row, y)) % 10 for row in A]
        assert solve_mod(smith_normal_form(A), rhs, 10) is not None


def test_row_ops_modular_reduction():
    ops = [("add", 0, 1, 7), ("swap", 0, 1), ("neg", 1)]
    assert apply_row_ops(ops, [1, 2], 5) == [2, (-(1 + 14)) % 5]


@pytest.mark.parametrize("L", [2, 3, 4, 6])
def test_gcd_obstruction(L):
    # 2x = 1 has a solution mod L iff L is odd
    assert (solve_mod(smith_normal_form([[2]]), [1], L) is not None) == (L % 2 == 1)
