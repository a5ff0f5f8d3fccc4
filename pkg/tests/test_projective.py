import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocyclegap.cocycles import PhaseCocycle, standard_phase_cocycle
from cocyclegap.groups import generator_words
from cocyclegap.projective import GenPermOperator, TensorSumOperator, phase_table, regular_rep, tensor_sum

perms = st.integers(1, 12).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.lists(st.integers(0, 11), min_size=n, max_size=n)))


def op_from(data, order=12):
    perm, phase = data
    return GenPermOperator(np.array(perm), np.array(phase), order)


@settings(max_examples=100, deadline=None)
@given(perms, st.data())
def test_genperm_against_dense(pp, data):
    A = op_from(pp)
    B = op_from((data.draw(st.permutations(range(A.dim))), data.draw(st.lists(st.integers(0, 5), min_size=A.dim, max_size=A.dim))), 6)
    DA, DB = A.to_dense(), B.to_dense()
    v = np.arange(A.dim) + 1j * np.arange(A.dim)[::-1]
    assert np.allclose(A.apply(v), DA @ v, atol=1e-13)
    assert np.allclose(A.adjoint().to_dense(), DA.conj().T, atol=1e-13)
    assert np.allclose(A.compose(B).to_dense(), DA @ DB, atol=1e-13)
    assert np.allclose(A.conjugate().to_dense(), DA.conj(), atol=1e-13)
    assert A.compose(A.adjoint()).is_identity()
    assert abs(np.linalg.norm(A.apply(v)) - np.linalg.norm(v)) < 1e-12


def test_genperm_validation():
    with pytest.raises(ValueError):
        GenPermOperator(np.array([0, 0]), np.array([0, 0]), 2)
    with pytest.raises(ValueError):
        GenPermOperator(np.array([0, 1]), np.array([0]), 2)
    with pytest.raises(ValueError):
        GenPermOperator.identity(3).apply(np.ones(4))


def test_phase_arithmetic_exact():
    A = GenPermOperator(np.array([1, 0]), np.array([1, 2]), 3)
    assert A.scale_phase(2) == GenPermOperator(np.array([1, 0]), np.array([0, 1]), 3)
    assert A.lift(6) == A
    assert abs(phase_table(4)[1] - 1j) < 1e-15 and phase_table(4)[0] == 1


def test_multiplication_law_gamma3_all_pairs(rep):
    """pi(g) pi(h) = c(g,h) pi(gh) for every pair, as exact integer phases."""
    r = rep(3)
    G, c = r.group, r.cocycle
    ops = [r.op(g) for g in range(G.size)]
    perm = np.stack([o.perm for o in ops])
    phase = np.stack([o.phase for o in ops])
    M, T = G.mul_table(), c.table()
    for g in range(G.size):
        # (pi(g) pi(h)) e_x = w_g[h x] w_h[x] e_{g h x}, for all h at once
        lhs_perm = perm[g][perm]
        lhs_phase = (phase[g][perm] + phase) % 3
        assert np.array_equal(lhs_perm, perm[M[g]])
        assert np.array_equal(lhs_phase, (phase[M[g]] + T[g][:, None]) % 3)
    rng = np.random.default_rng(0)
    for g, h in rng.integers(0, G.size, (300, 2)):
        assert ops[g].compose(ops[h]) == ops[M[g, h]].scale_phase(T[g, h])


def test_regular_rep_defining_action(rep):
    r = rep(4)
    G, c = r.group, r.cocycle
    for g in (0, 5, 100, 700):
        op = r.op(g)
        h = np.arange(G.size)
        assert np.array_equal(op.perm, G.mul(g, h))
        assert np.array_equal(op.phase, c(g, h))


def test_trace_of_regular_rep(rep):
    # only the identity fixes basis vectors
    r = rep(3)
    for g in range(r.group.size):
        fixed, phases = r.op(g).normalized_trace()
        assert fixed == (r.group.size if g == 0 else 0)
        assert not phases.any()


def test_rep_rejects_foreign_cocycle(gamma):
    with pytest.raises(ValueError):
        regular_rep(gamma(3), standard_phase_cocycle(gamma(2)))


def _dense_tensor(op):
    return sum(np.kron(a.to_dense(), np.conj(b.to_dense())) for a, b in zip(op.left, op.right))


@pytest.mark.parametrize("k, kp", [(1, 3), (2, 2), (2, 3), (3, 1)])
def test_tensor_against_kron(k, kp, rep):
    op = tensor_sum(rep(k), rep(kp), generator_words(3))
    D = _dense_tensor(op)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
    for backend in ("compiled", "numpy"):
        o = op.with_backend(backend)
        assert np.abs(o.apply(x) - D @ x).max() < 1e-12
        assert np.abs(o.adjoint().apply(x) - D.conj().T @ x).max() < 1e-12


def test_tensor_against_factored_dense(rep):
    """A X conj(B)^T per term on the (d1, d2) reshaping, for a dimension too large for kron."""
    op = tensor_sum(rep(3), rep(3), generator_words(4))
    rng = np.random.default_rng(1)
    X = rng.standard_normal((op.d1, op.d2)) + 1j * rng.standard_normal((op.d1, op.d2))
    want = sum(a.to_dense() @ X @ np.conj(b.to_dense()).T for a, b in zip(op.left, op.right))
    assert np.abs(op.apply(X.ravel()).reshape(op.d1, op.d2) - want).max() < 1e-12


def test_backends_agree_and_out_buffer(rep):
    op = tensor_sum(rep(3), rep(2), generator_words(3))
    x = np.random.default_rng(2).standard_normal(op.dim).astype(complex)
    out = np.empty(op.dim, dtype=complex)
    op.apply(x, out=out)
    assert np.abs(out - op.with_backend("numpy").apply(x)).max() < 1e-13


def test_identity_terms_counted(rep):
    op = tensor_sum(rep(3), rep(3), generator_words(5))
    assert op.n_identity == 3 and op.m == 5


def test_swap_conjugate_symmetry(rep):
    # op(X) = sum A X B^H, so swap(X^H) = op(X)^H
    op = tensor_sum(rep(2), rep(3), generator_words(3))
    sw, cj = op.swap(), op.conjugate()
    rng = np.random.default_rng(3)
    X = rng.standard_normal((op.d1, op.d2)) + 1j * rng.standard_normal((op.d1, op.d2))
    Y = op.apply(X.ravel()).reshape(op.d1, op.d2)
    assert np.abs(sw.apply(X.conj().T.ravel()).reshape(op.d2, op.d1) - Y.conj().T).max() < 1e-12
    assert np.abs(cj.apply(X.conj().ravel()).reshape(op.d1, op.d2) - Y.conj()).max() < 1e-12


def test_tensor_shape_checks():
    a = GenPermOperator.identity(2)
    with pytest.raises(ValueError):
        TensorSumOperator([a], [])
    with pytest.raises(ValueError):
        TensorSumOperator([a, GenPermOperator.identity(3)], [a, a])
    with pytest.raises(ValueError):
        TensorSumOperator([a], [a], backend="gpu")
