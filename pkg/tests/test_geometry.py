import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from fracapprox.geometry import (
    Ball,
    DyadicScale,
    Hyperplane,
    RationalPoint,
    Simplex,
    Slab,
    affine_rank,
    greedy_cover,
    hyperplane_through,
    hyperplane_witness,
    simplex_volume_times_dfact,
    slab_of,
    unit_ball_volume,
)


# ---------------------------------------------------------------------------
# basic types
# ---------------------------------------------------------------------------


def test_ball_requires_positive_radius():
    with pytest.raises(ValueError):
        Ball([0.0], 0.0)
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)


def test_ball_dilation_preserves_center():
    b = Ball([1.0, 2.0], 0.5)
    d = b.dilate(3.0)
    assert np.array_equal(d.center, b.center)
    assert d.radius == 1.5
    with pytest.raises(ValueError):
        b.dilate(0.5)


def test_hyperplane_unit_normal_enforced():
    with pytest.raises(ValueError):
        Hyperplane([2.0, 0.0], 1.0)
    h = Hyperplane([1.0], 0.5)  # d = 1: the point 1/2
    assert h.distance([0.5]) == 0.0
    assert h.distance([0.75]) == pytest.approx(0.25)


def test_slab_membership():
    s = Slab(Hyperplane([0.0, 1.0], 0.0), 0.1)
    assert s.contains([5.0, 0.1])
    assert not s.contains([0.0, 0.11])


def test_rational_point_validation_and_equality():
    with pytest.raises(ValueError):
        RationalPoint((1,), 0)
    assert RationalPoint((1,), 2) == RationalPoint((2,), 4)
    assert RationalPoint((1, 3), 2) == RationalPoint((2, 6), 4)
    assert RationalPoint((1,), 2) != RationalPoint((1,), 3)
    assert hash(RationalPoint((1,), 2)) == hash(RationalPoint((2,), 4))


def test_simplex_needs_d_plus_one_vertices():
    with pytest.raises(ValueError):
        Simplex((RationalPoint((0, 0), 1), RationalPoint((1, 0), 1)))


# ---------------------------------------------------------------------------
# exact simplex volume
# ---------------------------------------------------------------------------


def test_unit_right_triangle_volume():
    s = Simplex(
        (RationalPoint((0, 0), 1), RationalPoint((1, 0), 1), RationalPoint((0, 1), 1))
    )
    assert simplex_volume_times_dfact(s) == 1


def test_collinear_simplex_is_degenerate():
    s = Simplex(
        (RationalPoint((0, 0), 1), RationalPoint((1, 1), 1), RationalPoint((2, 2), 1))
    )
    assert simplex_volume_times_dfact(s) == 0
    assert s.is_degenerate()


def test_d1_simplex_is_exact_difference():
    # oracle: plain Fraction subtraction
    s = Simplex((RationalPoint((1,), 2), RationalPoint((1,), 3)))
    assert simplex_volume_times_dfact(s) == Fraction(1, 2) - Fraction(1, 3)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_determinant_matches_float_and_rank(d):
    rng = np.random.default_rng(20240 + d)
    for _ in range(60):
        pts = []
        for _i in range(d + 1):
            q = int(rng.integers(1, 2**30))
            nums = tuple(int(v) for v in rng.integers(-(2**30), 2**30, size=d))
            pts.append(RationalPoint(nums, q))
        s = Simplex(tuple(pts))
        exact = simplex_volume_times_dfact(s)
        mat = np.array(
            [[1.0] + list(p.as_float()) for p in pts], dtype=float
        )
        approx = abs(np.linalg.det(mat))
        if exact != 0:
            assert abs(approx - float(exact)) <= 1e-6 * float(exact)
        # exact zero iff the independent rank computation sees dependence
        assert (exact == 0) == (affine_rank(pts) < d)


def test_zero_volume_on_constructed_dependence():
    # three points on the line y = x with large mixed denominators
    pts = [
        RationalPoint((1, 1), 7),
        RationalPoint((5, 5), 11),
        RationalPoint((9, 9), 13),
    ]
    assert simplex_volume_times_dfact(Simplex(tuple(pts))) == 0
    assert affine_rank(pts) == 1


# ---------------------------------------------------------------------------
# dyadic scales
# ---------------------------------------------------------------------------


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-14)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("n", [0, 1, 3, 6, 9])
def test_volume_ceiling_identity_float(d, n):
    scale = DyadicScale(n, d)
    expected = 2.0 ** (-(d + 1) * (n + 1)) / math.factorial(d)
    assert scale.six_dilate_volume() == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_volume_ceiling_identity_symbolic(d):
    sympy = pytest.importorskip("sympy")
    n = sympy.symbols("n", nonnegative=True)
    kappa = {1: sympy.Integer(2), 2: sympy.pi, 3: sympy.Rational(4, 3) * sympy.pi}[d]
    r_n = (
        sympy.Rational(1, 6)
        * (1 / (kappa * sympy.factorial(d))) ** sympy.Rational(1, d)
        * 2 ** (-(sympy.Rational(d + 1, d)) * (n + 1))
    )
    lhs = kappa * (6 * r_n) ** d
    rhs = 2 ** (-(d + 1) * (n + 1)) / sympy.factorial(d)
    assert sympy.simplify(lhs - rhs) == 0


def test_dyadic_block_bounds():
    scale = DyadicScale(3, 1)
    assert scale.q_lo == 8 and scale.q_hi == 16


# ---------------------------------------------------------------------------
# greedy covering
# ---------------------------------------------------------------------------


def test_greedy_cover_trace_012():
    balls = [Ball([float(c)], 1.0) for c in (0, 1, 2)]
    chosen, k = greedy_cover(balls)
    assert k == 3
    assert [float(b.center[0]) for b in chosen] == [0.0]
    # the 3-dilate [-3, 3] covers the union [-1, 3]
    assert chosen[0].dilate(3).contains([3.0])


def test_greedy_cover_single_ball():
    chosen, _ = greedy_cover([Ball([0.3, 0.4], 0.2)])
    assert len(chosen) == 1


def test_greedy_cover_separated_balls_all_kept():
    balls = [Ball([float(c)], 1.0) for c in (0, 10, 20)]
    chosen, _ = greedy_cover(balls)
    assert sorted(float(b.center[0]) for b in chosen) == [0.0, 10.0, 20.0]


def test_greedy_cover_rejects_mixed_radii():
    with pytest.raises(ValueError):
        greedy_cover([Ball([0.0], 1.0), Ball([3.0], 2.0)])


def test_greedy_cover_empty_input():
    chosen, k = greedy_cover([])
    assert chosen == [] and k == 3


def test_greedy_cover_order_independent():
    rng = np.random.default_rng(7)
    centers = rng.random((40, 2))
    balls = [Ball(c, 0.1) for c in centers]
    ref = {tuple(b.center) for b in greedy_cover(balls)[0]}
    for _ in range(5):
        perm = rng.permutation(len(balls))
        got = {tuple(b.center) for b in greedy_cover([balls[i] for i in perm])[0]}
        assert got == ref


@pytest.mark.parametrize("d", [1, 2, 3])
def test_greedy_cover_disjoint_and_covering(d):
    rng = np.random.default_rng(100 + d)
    for _ in range(30):
        m = int(rng.integers(1, 120))
        r = float(rng.uniform(0.05, 0.4))
        centers = rng.uniform(0, 3, size=(m, d))
        chosen, _ = greedy_cover([Ball(c, r) for c in centers])
        ch = np.array([b.center for b in chosen])
        if len(ch) > 1:
            gaps = np.linalg.norm(ch[:, None, :] - ch[None, :, :], axis=2)
            np.fill_diagonal(gaps, np.inf)
            assert gaps.min() > 2 * r
        # 1000 points sampled inside input balls all land in some 3-dilate
        idx = rng.integers(0, m, size=1000)
        dirs = rng.normal(size=(1000, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = r * rng.random(1000) ** (1.0 / d)
        pts = centers[idx] + dirs * radii[:, None]
        dist = np.linalg.norm(pts[:, None, :] - ch[None, :, :], axis=2)
        assert np.all(dist.min(axis=1) <= 3 * r * (1 + 1e-12))


# ---------------------------------------------------------------------------
# hyperplane witnesses
# ---------------------------------------------------------------------------


def test_witness_single_point_d1():
    scale = DyadicScale(1, 1)
    res = hyperplane_witness(
        [RationalPoint((1,), 2)], Ball([0.5], scale.r_n), scale
    )
    assert res.is_hyperplane
    assert res.hyperplane.distance([0.5]) < 1e-12


def test_witness_rejects_wrong_block_denominator():
    scale = DyadicScale(1, 1)
    with pytest.raises(ValueError):
        hyperplane_witness([RationalPoint((1,), 5)], Ball([0.2], scale.r_n), scale)


def test_witness_rejects_far_points():
    scale = DyadicScale(1, 1)
    with pytest.raises(ValueError):
        hyperplane_witness([RationalPoint((1,), 2)], Ball([0.9], scale.r_n), scale)


def test_witness_rejects_wrong_container_radius():
    scale = DyadicScale(1, 1)
    with pytest.raises(ValueError):
        hyperplane_witness([RationalPoint((1,), 2)], Ball([0.5], 0.25), scale)


def test_block1_interval_of_length_one_sixteenth_holds_one_rational():
    # oracle: exhaustive pairwise gaps of the block-1 rational values
    vals = sorted(
        {Fraction(p, q) for q in (2, 3) for p in range(0, 4 * q + 1)}
    )
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    assert min(gaps) == Fraction(1, 6)
    assert Fraction(1, 6) > Fraction(1, 16)
    # hence any closed interval of length 1/16 holds at most one block value
    length = Fraction(1, 16)
    for start in vals:
        inside = [v for v in vals if start <= v <= start + length]
        assert len(inside) <= 2  # endpoints can touch two only if gap == length
        if len(inside) == 2:
            assert inside[1] - inside[0] > length  # cannot actually happen
    # and the greedy witness machinery agrees at the matching dyadic radius
    scale = DyadicScale(1, 1)
    assert 2 * scale.r_n < 1 / 16


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_d1_block_rational_gap_exceeds_paper_interval(n):
    # the d = 1 specialization: any interval of length 2^(-2(n+1)) contains at
    # most one rational with denominator in the block, because distinct block
    # values differ by more than 1/(q q') > 2^(-2(n+1)); checked exhaustively
    # on [0, 1] with exact arithmetic
    vals = sorted(
        {Fraction(p, q) for q in range(2**n, 2 ** (n + 1)) for p in range(q + 1)}
    )
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    assert min(gaps) > Fraction(1, 2 ** (2 * (n + 1)))


def test_d1_paper_interval_balls_disjoint():
    # balls B(p/q, r_n') with r_n' = 2^(-2(n+1))/2 around distinct block
    # rationals are disjoint
    n = 3
    r = Fraction(1, 2 ** (2 * (n + 1) + 1))
    vals = sorted(
        {Fraction(p, q) for q in range(2**n, 2 ** (n + 1)) for p in range(q + 1)}
    )
    for a, b in zip(vals, vals[1:]):
        assert b - a > 2 * r


def _exact_triple_independent(points) -> bool:
    for trio in combinations(points, 3):
        (x0, y0), (x1, y1), (x2, y2) = [p.fractions() for p in trio]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if det != 0:
            return True
    return False


def test_witness_d2_block3_always_hyperplane():
    from fracapprox.analysis import _block_rationals_in_six_dilate

    rng = np.random.default_rng(42)
    scale = DyadicScale(3, 2)
    for _ in range(50):
        ball = Ball(rng.random(2), scale.r_n)
        pts = _block_rationals_in_six_dilate(2, scale, ball)
        res = hyperplane_witness(pts, ball, scale)
        assert res.is_hyperplane
        # independent oracle: cofactor determinants over all triples
        assert not _exact_triple_independent(pts)
        for p in pts:
            assert res.hyperplane.distance(p.as_float()) < 1e-9


def test_witness_returns_simplex_when_preconditions_broken():
    # an oversized container admits genuinely independent triples; the result
    # must expose one as the counterexample
    scale = DyadicScale(1, 2)
    big = Ball([0.5, 0.5], scale.r_n)
    pts = [
        RationalPoint((0, 0), 2),
        RationalPoint((1, 0), 2),
        RationalPoint((0, 1), 2),
    ]
    with pytest.raises(ValueError):
        hyperplane_witness(pts, big, scale)  # they are outside the 6-dilate


def test_simplex_branch_via_affine_rank_directly():
    pts = [
        RationalPoint((0, 0), 2),
        RationalPoint((1, 0), 2),
        RationalPoint((0, 1), 2),
    ]
    assert affine_rank(pts) == 2
    assert _exact_triple_independent(pts)


# ---------------------------------------------------------------------------
# hyperplane completion and slabs
# ---------------------------------------------------------------------------


def test_hyperplane_through_is_deterministic_and_signed():
    pts = [RationalPoint((0, 0), 1), RationalPoint((1, 0), 1)]
    h1 = hyperplane_through(pts)
    h2 = hyperplane_through(pts)
    assert np.array_equal(h1.normal, h2.normal)
    first_nonzero = h1.normal[np.nonzero(np.abs(h1.normal) > 1e-9)[0][0]]
    assert first_nonzero > 0


def test_slab_of_point_d1():
    s = slab_of([RationalPoint((1,), 2)], 0.01)
    assert s.contains([0.4901]) and s.contains([0.5099])
    assert not s.contains([0.489]) and not s.contains([0.5111])
    # boundary exact where floats permit: epsilon an exact dyadic
    s2 = slab_of([RationalPoint((1,), 2)], 0.015625)
    assert s2.contains([0.5 - 0.015625]) and s2.contains([0.5 + 0.015625])


def test_slab_of_x_axis_d2():
    s = slab_of([RationalPoint((0, 0), 1), RationalPoint((1, 0), 1)], 0.1)
    assert abs(abs(s.plane.normal[1]) - 1.0) < 1e-12
    assert s.contains([7.0, 0.09]) and not s.contains([0.0, 0.11])


def test_slab_of_contains_all_inputs():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = int(rng.integers(2, 50))
        a = RationalPoint((int(rng.integers(0, q)), int(rng.integers(0, q))), q)
        b = RationalPoint((int(rng.integers(0, q)), int(rng.integers(0, q))), q)
        s = slab_of([a, b], 1e-6)
        assert s.plane.distance(a.as_float()) <= 1e-6
        assert s.plane.distance(b.as_float()) <= 1e-6


def test_slab_of_rejects_empty_and_independent():
    with pytest.raises(ValueError):
        slab_of([], 0.1)
    pts = [
        RationalPoint((0, 0), 1),
        RationalPoint((1, 0), 1),
        RationalPoint((0, 1), 1),
    ]
    with pytest.raises(ValueError):
        slab_of(pts, 0.1)
