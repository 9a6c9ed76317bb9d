"""Tests for exact integer enumeration and truncated group averages."""

import math

import numpy as np
import pytest

import siegelps as sp
from siegelps import (
    BudgetError,
    CongruenceGroup,
    DimensionError,
    DomainError,
    MatrixCoefficientSpec,
    MatrixPolynomial,
    SiegelPoint,
    Weight,
    enumerate_ball,
    kernel_series,
    load_ball,
    poincare_f,
    poincare_F,
    save_ball,
)
from conftest import random_symplectic

# ---------------------------------------------------------------------------
# independent enumeration oracles
# ---------------------------------------------------------------------------


def brute_ball_genus1(N, radius):
    """Plain quadruple loop over all 2x2 integer matrices."""
    r2 = int(math.floor(radius * radius + 1e-9))
    lim = int(math.floor(math.sqrt(r2)))
    found = []
    for a in range(-lim, lim + 1):
        for b in range(-lim, lim + 1):
            for c in range(-lim, lim + 1):
                for d in range(-lim, lim + 1):
                    if a * d - b * c != 1:
                        continue
                    if a * a + b * b + c * c + d * d > r2:
                        continue
                    if (a - 1) % N or b % N or c % N or (d - 1) % N:
                        continue
                    found.append(((a, b), (c, d)))
    return {np.array(m, dtype=np.int64).tobytes() for m in found}


def brute_ball_genus2(N, radius):
    """Column-pair tables: pairs (c0, c2) and (c1, c3) joined by orthogonality.

    Builds the full candidate list per column, forms all skew-paired column
    pairs at once, then crosses the two pair tables under the remaining four
    bilinear conditions.  Independent of the production search order.
    """
    r2 = int(math.floor(radius * radius + 1e-9))
    J = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]],
                 dtype=np.int64)
    cap = r2 - 3
    lim = int(math.floor(math.sqrt(cap)))
    rng = np.arange(-lim, lim + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(rng, rng, rng, rng, indexing="ij"), -1).reshape(-1, 4)
    cols = []
    for j in range(4):
        res = np.zeros(4, dtype=np.int64)
        res[j] = 1
        ok = np.all((grid - res) % N == 0, axis=1) & (np.sum(grid * grid, 1) <= cap)
        cols.append(grid[ok])

    def paired(U, V, target):
        skew = U @ J @ V.T
        i, j = np.nonzero(skew == target)
        norms = np.sum(U[i] * U[i], 1) + np.sum(V[j] * V[j], 1)
        keep = norms <= r2 - 2
        return U[i[keep]], V[j[keep]], norms[keep]

    a0, a2, n02 = paired(cols[0], cols[2], 1)
    b1, b3, n13 = paired(cols[1], cols[3], 1)
    out = set()
    Jb1 = b1 @ J.T
    Jb3 = b3 @ J.T
    for v0, v2, m02 in zip(a0, a2, n02):
        ok = ((Jb1 @ v0 == 0) & (Jb3 @ v0 == 0)
              & (Jb1 @ v2 == 0) & (Jb3 @ v2 == 0)
              & (m02 + n13 <= r2))
        for v1, v3 in zip(b1[ok], b3[ok]):
            out.add(np.stack([v0, v1, v2, v3], axis=1).tobytes())
    return out


def as_byte_set(ball):
    return {e.tobytes() for e in ball.elements}


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


def test_group_validation():
    with pytest.raises(DomainError):
        CongruenceGroup(0, 1)
    with pytest.raises(DomainError):
        CongruenceGroup(1, 0)


def test_group_epsilon():
    assert CongruenceGroup(1, 1).epsilon() == 2
    assert CongruenceGroup(2, 2).epsilon() == 2
    assert CongruenceGroup(1, 3).epsilon() == 1


def test_group_contains():
    g1 = CongruenceGroup(1, 1)
    assert g1.contains([[1, 1], [0, 1]])
    assert g1.contains(np.array([[1.0, 1.0], [0.0, 1.0]]))  # exact floats pass
    assert not g1.contains([[1, 1], [1, 1]])                # not symplectic
    assert not g1.contains([[1.5, 0], [0, 1]])
    g2 = CongruenceGroup(1, 2)
    assert g2.contains([[1, 2], [2, 5]])
    assert not g2.contains([[1, 1], [0, 1]])                # wrong congruence
    assert not g2.contains(np.eye(4))                       # wrong shape


def test_k_intersection_counts():
    assert len(CongruenceGroup(1, 1).k_intersection()) == 4
    assert len(CongruenceGroup(2, 1).k_intersection()) == 32
    assert len(CongruenceGroup(1, 2).k_intersection()) == 2
    assert len(CongruenceGroup(2, 2).k_intersection()) == 4
    assert len(CongruenceGroup(1, 3).k_intersection()) == 1
    # each one really lies in the group and in the compact subgroup
    for mat in CongruenceGroup(2, 2).k_intersection():
        assert CongruenceGroup(2, 2).contains(mat)
        assert np.array_equal(mat.T @ mat, np.eye(4, dtype=np.int64))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def test_genus1_matches_brute_force():
    expected_counts = {1: 196, 2: 34, 3: 5}
    for N in (1, 2, 3):
        ball = enumerate_ball(CongruenceGroup(1, N), 6.0)
        oracle = brute_ball_genus1(N, 6.0)
        assert len(oracle) == expected_counts[N]
        assert as_byte_set(ball) == oracle


def test_genus2_matches_brute_force():
    ball = enumerate_ball(CongruenceGroup(2, 1), 3.0)
    oracle = brute_ball_genus2(1, 3.0)
    assert len(oracle) == 12320
    assert as_byte_set(ball) == oracle


def test_genus2_level2_matches_brute_force():
    ball = enumerate_ball(CongruenceGroup(2, 2), 4.2)
    oracle = brute_ball_genus2(2, 4.2)
    assert len(oracle) == 260
    assert as_byte_set(ball) == oracle


def test_higher_level_is_congruence_filter():
    base = enumerate_ball(CongruenceGroup(1, 1), 8.0)
    for N in (2, 3):
        sub = enumerate_ball(CongruenceGroup(1, N), 8.0)
        eye = np.eye(2, dtype=np.int64)
        keep = np.all((base.elements - eye) % N == 0, axis=(1, 2))
        assert np.array_equal(sub.elements, base.elements[keep])


def test_canonical_order_and_center(ball40):
    norms = ball40.norms_squared()
    assert np.all(np.diff(norms) >= 0)
    byteset = as_byte_set(ball40)
    eye = np.eye(2, dtype=np.int64)
    assert eye.tobytes() in byteset
    assert (-eye).tobytes() in byteset


def test_restrict_equals_direct(ball40):
    direct = enumerate_ball(CongruenceGroup(1, 1), 6.0)
    assert np.array_equal(ball40.restrict(6.0).elements, direct.elements)
    with pytest.raises(DomainError):
        ball40.restrict(41.0)


def test_enumeration_validation():
    with pytest.raises(DomainError):
        enumerate_ball(CongruenceGroup(1, 1), -1.0)
    with pytest.raises(DimensionError):
        enumerate_ball(CongruenceGroup(3, 1), 4.0)


def test_budget_error_genus1():
    with pytest.raises(BudgetError) as exc:
        enumerate_ball(CongruenceGroup(1, 1), 10 ** 6, budget=100)
    feasible = exc.value.feasible_radius
    assert feasible is not None and feasible > 0
    enumerate_ball(CongruenceGroup(1, 1), feasible, budget=100)  # attainable


def test_budget_error_genus2():
    with pytest.raises(BudgetError) as exc:
        enumerate_ball(CongruenceGroup(2, 1), 5.0, budget=10 ** 6)
    assert exc.value.feasible_radius >= 2.0


def test_save_load_round_trip(tmp_path):
    ball = enumerate_ball(CongruenceGroup(2, 2), 4.2)
    path = str(tmp_path / "ball.bin")
    save_ball(path, ball)
    back = load_ball(path)
    assert back.group == ball.group
    assert back.radius == ball.radius
    assert np.array_equal(back.elements, ball.elements)


def test_load_rejects_corruption(tmp_path):
    ball = enumerate_ball(CongruenceGroup(1, 1), 5.0)
    path = str(tmp_path / "ball.bin")
    save_ball(path, ball)
    raw = open(path, "rb").read()
    short = str(tmp_path / "short.bin")
    with open(short, "wb") as fh:
        fh.write(raw[:10])
    with pytest.raises(DomainError):
        load_ball(short)
    chopped = str(tmp_path / "chopped.bin")
    with open(chopped, "wb") as fh:
        fh.write(raw[:-8])
    with pytest.raises(DomainError):
        load_ball(chopped)
    # flip one matrix entry: the exact symplectic check has to catch it
    tampered = bytearray(raw)
    tampered[32] ^= 1
    bad = str(tmp_path / "bad.bin")
    with open(bad, "wb") as fh:
        fh.write(bytes(tampered))
    with pytest.raises(DomainError):
        load_ball(bad)


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------


def test_series_matches_elementwise_sum():
    # compare the vectorized sum against a per-element evaluation
    group = CongruenceGroup(2, 1)
    w = Weight(6, 2)
    mu = MatrixPolynomial.one(2)
    ball = enumerate_ball(group, 2.2)
    assert len(ball) == 32        # only the compact elements fit
    z = SiegelPoint(np.array([[0.2, 0.1], [0.1, -0.3]]),
                    np.array([[1.1, 0.2], [0.2, 0.9]]))
    res = poincare_f(mu, w, group, z, 2.2, ball=ball)
    manual = 0j
    for e in ball.elements:
        g = sp.SymplecticMatrix(e.astype(np.float64))
        manual += sp.j_factor(g, z) ** (-w.m) * sp.f_mu_m(mu, w, sp.act(g, z))
    assert res.value == pytest.approx(manual, rel=1e-11)
    assert res.terms == 32


def test_series_radius_convergence(ball40):
    w = Weight(12, 1)
    mu = MatrixPolynomial.one(1)
    group = CongruenceGroup(1, 1)
    z = SiegelPoint.center(1)
    v12 = poincare_f(mu, w, group, z, 12.0, ball=ball40)
    v24 = poincare_f(mu, w, group, z, 24.0, ball=ball40)
    v40 = poincare_f(mu, w, group, z, 40.0, ball=ball40)
    assert abs(v24.value - v40.value) < abs(v12.value - v40.value)
    assert abs(v40.value - v24.value) < 1e-8 * max(1.0, abs(v40.value))
    assert v40.tail_estimate < 1e-6 * abs(v40.value)


def test_group_side_series_consistent(ball40):
    # averaging on the group side equals translating the base point
    rng = np.random.default_rng(51)
    w = Weight(12, 1)
    mu = MatrixPolynomial.one(1)
    group = CongruenceGroup(1, 1)
    spec = MatrixCoefficientSpec(mu, w)
    for _ in range(3):
        g = random_symplectic(1, rng)
        lhs = poincare_F(spec, group, g, 30.0, ball=ball40)
        z0 = SiegelPoint.center(1)
        rhs = (sp.j_factor(g, z0) ** (-w.m)
               * poincare_f(mu, w, group, sp.act(g, z0), 30.0, ball=ball40).value)
        assert lhs.value == pytest.approx(rhs, rel=1e-10)


def test_kernel_series_hermitian_truncation(ball40):
    # the ball is inverse-closed, so truncation keeps the kernel symmetry
    w = Weight(12, 1)
    group = CongruenceGroup(1, 1)
    xi = SiegelPoint.from_complex(np.array([[0.2 + 1.3j]]))
    z = SiegelPoint.from_complex(np.array([[-0.4 + 0.8j]]))
    a = kernel_series(w, group, xi, z, 10.0, ball=ball40)
    b = kernel_series(w, group, z, xi, 10.0, ball=ball40)
    assert a.value == pytest.approx(np.conj(b.value), rel=1e-12)


def test_series_rejects_mismatches(ball40):
    w = Weight(12, 1)
    mu = MatrixPolynomial.one(1)
    z = SiegelPoint.center(1)
    with pytest.raises(DomainError):
        poincare_f(mu, w, CongruenceGroup(1, 2), z, 10.0, ball=ball40)
    with pytest.raises(DomainError):
        poincare_f(mu, w, CongruenceGroup(1, 1), z, 80.0, ball=ball40)
    with pytest.raises(DomainError):
        poincare_f(mu, Weight(2, 1), CongruenceGroup(1, 1), z, 10.0)
    with pytest.raises(DimensionError):
        poincare_f(MatrixPolynomial.one(2), Weight(6, 2), CongruenceGroup(1, 1),
                   z, 10.0)


def test_vectorized_evaluator_matches(ball40):
    w = Weight(12, 1)
    group = CongruenceGroup(1, 1)
    mu = MatrixPolynomial.one(1)
    xi = SiegelPoint.from_complex(np.array([[0.1 + 1.0j]]))
    zs = np.array([1j, 0.3 + 0.8j, -0.2 + 2.0j])
    ev_mu = sp.series_evaluator_genus1(w, ball40, mu=mu)
    ev_xi = sp.series_evaluator_genus1(w, ball40, xi=xi)
    got_mu = ev_mu(zs)
    got_xi = ev_xi(zs)
    for i, zval in enumerate(zs):
        z = SiegelPoint.from_complex(np.array([[zval]]))
        ref = poincare_f(mu, w, group, z, 40.0, ball=ball40)
        assert got_mu[i] == pytest.approx(ref.value, rel=1e-11)
        refk = kernel_series(w, group, xi, z, 40.0, ball=ball40)
        assert got_xi[i] == pytest.approx(refk.value, rel=1e-11)
    # shape is preserved and both modes refuse bad argument combinations
    assert ev_mu(zs.reshape(3, 1)).shape == (3, 1)
    with pytest.raises(DomainError):
        sp.series_evaluator_genus1(w, ball40)
    with pytest.raises(DomainError):
        sp.series_evaluator_genus1(w, ball40, mu=mu, xi=xi)


# ---------------------------------------------------------------------------
# norm bounds
# ---------------------------------------------------------------------------


def test_norm_bounds_reports():
    for n, N in ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2)):
        rep = sp.norm_bounds_check(CongruenceGroup(n, N), samples=50, seed=3)
        assert rep.passed
        assert rep.max_product_norm < rep.bound
        assert rep.min_noncompact_norm >= rep.threshold - 1e-12
        assert rep.level == N
