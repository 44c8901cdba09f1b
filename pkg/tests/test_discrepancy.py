import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latdisc.convex import AxisBox, Ball, HPolytope, VPolytope, unit_cube
from latdisc.discrepancy import (
    DiscrepancyWitness,
    convex_hull_2d,
    count_points,
    count_points_halfspace,
    count_points_slab,
    halfspace_cube_volume,
    halfspace_cube_volume_derivative,
    isotropic_lower_bound,
    polygon_area_exact,
    slab_witness,
    verify_thm1,
)
from latdisc.lattice import enumerate_points, fibonacci_lattice, rank1_lattice


R5 = rank1_lattice(5, (1, 2))
P5 = enumerate_points(R5)


def mc_halfspace_volume_oracle(a, b, d, n=200_000, seed=123):
    rng = np.random.default_rng(seed)
    x = rng.random((n, d))
    return np.mean(x @ np.asarray(a, dtype=float) <= b)


def test_halfspace_volume_symmetry_case():
    assert halfspace_cube_volume([1, 1], 1) == Fraction(1, 2)


def test_halfspace_volume_triangle_case():
    assert halfspace_cube_volume([1, 2], 1) == Fraction(1, 4)


def test_halfspace_volume_axis_case():
    for t in (Fraction(-1, 2), Fraction(0), Fraction(3, 10), Fraction(1), Fraction(2)):
        expected = min(max(t, Fraction(0)), Fraction(1))
        assert halfspace_cube_volume([1, 0, 0], t) == expected


def test_halfspace_volume_negative_coeffs_and_mc_oracle():
    cases = [([1, -1], Fraction(1, 3), 2), ([2, -1, 1], Fraction(1, 2), 3), ([-1, -2], Fraction(-1), 2)]
    for a, b, d in cases:
        vol = halfspace_cube_volume(a, b)
        assert 0 <= vol <= 1
        mc = mc_halfspace_volume_oracle(a, float(b), d)
        assert abs(float(vol) - mc) < 0.005


@settings(max_examples=50, deadline=None)
@given(
    a=st.lists(st.integers(min_value=-6, max_value=6), min_size=1, max_size=4).filter(
        lambda v: any(v)
    ),
    num=st.integers(min_value=-40, max_value=40),
    den=st.integers(min_value=1, max_value=8),
)
def test_halfspace_volume_properties(a, num, den):
    b = Fraction(num, den)
    v = halfspace_cube_volume(a, b)
    assert 0 <= v <= 1
    # the two closed halves overlap in a measure-zero plane
    assert v + halfspace_cube_volume([-x for x in a], -b) == 1
    # monotone in the offset
    assert halfspace_cube_volume(a, b + Fraction(1, 3)) >= v


def test_halfspace_volume_complement_identity():
    # Vol(a.x <= b) + Vol(-a.x <= -b) = 1 for continuous cut positions
    a = [3, -2, 1]
    for b in (Fraction(1, 3), Fraction(-1, 2), Fraction(7, 5)):
        v1 = halfspace_cube_volume(a, b)
        v2 = halfspace_cube_volume([-x for x in a], -b)
        assert v1 + v2 == 1


def test_halfspace_derivative_matches_finite_difference():
    a = [2, -1]
    h = Fraction(1, 10**6)
    for b in (Fraction(1, 4), Fraction(1, 2), Fraction(9, 8)):
        fd = (halfspace_cube_volume(a, b + h) - halfspace_cube_volume(a, b - h)) / (2 * h)
        dv = halfspace_cube_volume_derivative(a, b)
        assert abs(float(fd - dv)) < 1e-5


def test_cross_section_sqrt2_attained():
    # the diagonal plane through the square center has section length sqrt(2)
    dv = halfspace_cube_volume_derivative([1, 1], 1)
    assert float(dv) * math.sqrt(2) == pytest.approx(math.sqrt(2))
    # and in d=3 the max axis-diagonal section is also sqrt(2)
    dv3 = halfspace_cube_volume_derivative([1, 1, 0], 1)
    assert float(dv3) * math.sqrt(2) == pytest.approx(math.sqrt(2))


def test_vd_decision_cross_sections_bounded_by_sqrt2():
    # numerical validation of v_d = sqrt(2) for d in {2, 3}
    rng = np.random.default_rng(7)
    for d in (2, 3):
        worst = 0.0
        for _ in range(200):
            a = rng.normal(size=d)
            a /= np.linalg.norm(a)
            af = [Fraction(round(v * 2**20), 2**20) for v in a]
            b = Fraction(round(rng.uniform(float(sum(x for x in af if x < 0)),
                                           float(sum(x for x in af if x > 0))) * 2**20), 2**20)
            norm = math.sqrt(float(sum(x * x for x in af)))
            section = float(halfspace_cube_volume_derivative(af, b)) * norm
            worst = max(worst, section)
        assert worst <= math.sqrt(2) + 1e-9
        assert worst > 1.0  # near-diagonal sections beat axis sections


def test_count_points_halfspace_rank1():
    assert count_points_halfspace(P5, [1, 0], Fraction(1, 2)) == 3
    assert count_points_halfspace(P5, [1, 0], Fraction(2, 5)) == 3  # boundary point counts
    assert count_points(P5, unit_cube(2)) == 5


def test_count_points_open_slab_is_zero():
    # all five points satisfy 2x1 - x2 in {0, 1} exactly
    assert count_points_slab(P5, (2, -1), 0, 1, closed=False) == 0
    assert count_points_slab(P5, (2, -1), 0, 1, closed=True) == 5


def test_count_points_ball_exact():
    ball = Ball([0.5, 0.5], 0.25)
    # brute inspection: which of the 5 points are within 0.25 of center?
    expected = 0
    for p in P5.points:
        if (float(p[0]) - 0.5) ** 2 + (float(p[1]) - 0.5) ** 2 <= 0.25**2 + 1e-15:
            expected += 1
    assert count_points(P5, ball) == expected


def test_count_points_box_and_polytope():
    box = AxisBox([0.0, 0.0], [0.5, 0.5])
    assert count_points(P5, box) == count_points_halfspace(P5, [1, 0], Fraction(1, 2)) - sum(
        1 for p in P5.points if p[0] <= Fraction(1, 2) and p[1] > Fraction(1, 2)
    )
    tri = HPolytope([[1.0, 2.0], [-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0, 0.0])
    assert count_points(P5, tri) == sum(
        1 for p in P5.points if p[0] + 2 * p[1] <= 1
    )


def test_convex_hull_2d_and_area():
    pts = [
        (Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(0)),
        (Fraction(1), Fraction(1)),
        (Fraction(0), Fraction(1)),
        (Fraction(1, 2), Fraction(1, 2)),
    ]
    hull = convex_hull_2d(pts)
    assert len(hull) == 4
    assert polygon_area_exact(hull) == 1


def test_slab_witness_rank1_5_12():
    w = slab_witness(R5)
    assert w.family == "dual-slab"
    assert w.inside_count == 0
    assert w.certified
    # slab 0 < 2x1 - x2 < 1 has area 1/2 (piecewise-linear computation)
    assert w.local_value == pytest.approx(0.5, abs=1e-6)
    assert w.local_value_exact <= Fraction(1, 2)


def test_slab_witness_z1_single_point():
    lat = rank1_lattice(1, (0,))
    w = slab_witness(lat)
    assert w.local_value == pytest.approx(1.0, abs=1e-6)


def test_slab_witness_equispaced_gap():
    lat = rank1_lattice(8, (1,))
    w = slab_witness(lat)
    assert w.local_value == pytest.approx(1 / 8, abs=1e-6)
    # length is exactly 1/N minus twice the 1e-9 Euclidean shrink
    assert Fraction(1, 8) - w.local_value_exact <= Fraction(3, 10**9)


def test_isotropic_lower_bound_single_point_d2():
    lat = rank1_lattice(1, (0, 0))
    ps = enumerate_points(lat)
    best, all_w = isotropic_lower_bound(ps, budget=6, seed=42)
    assert best.certified
    assert best.local_value >= 0.9
    assert all(w.local_value <= 1 + 1e-12 for w in all_w)


def test_isotropic_lower_bound_equispaced_d1():
    lat = rank1_lattice(16, (1,))
    ps = enumerate_points(lat)
    best, _ = isotropic_lower_bound(ps, budget=4, seed=1)
    assert best.local_value >= 1 / 16 - 1e-6
    assert best.local_value <= 1 / 16 + 1e-6 or best.local_value <= 1.0


def test_isotropic_lower_bound_monotone_in_budget():
    ps = enumerate_points(fibonacci_lattice(8))
    vals = []
    for budget in (2, 4, 8):
        best, _ = isotropic_lower_bound(ps, budget, seed=11)
        vals.append(best.local_value_exact)
    assert vals[0] <= vals[1] <= vals[2]


def test_witness_bodies_inside_cube():
    ps = enumerate_points(fibonacci_lattice(7))
    _, all_w = isotropic_lower_bound(ps, budget=6, seed=3)
    for w in all_w:
        lo, hi = w.body.bounding_box()
        assert np.all(lo >= -1e-9) and np.all(hi <= 1 + 1e-9)
        assert 0 <= w.inside_count <= ps.n


def test_verify_thm1_rank1_5_12():
    rep = verify_thm1(R5, budget=6, seed=0, lattice_id="rank1-5-12")
    assert rep.verdict == "PASS"
    assert rep.bound == pytest.approx(2 * 2**6 / math.sqrt(5), rel=1e-12)
    assert rep.old_bound == pytest.approx(4 * 4 / math.sqrt(5), rel=1e-12)
    assert rep.j_lower >= 0.5 - 1e-6
    assert rep.slab_floor_ok
    assert rep.j_lower <= min(1.0, rep.bound)


def test_verify_thm1_zd():
    for d in (1, 2, 3):
        lat = rank1_lattice(1, tuple(0 for _ in range(d)))
        rep = verify_thm1(lat, budget=3, seed=5)
        assert rep.verdict == "PASS"
        assert rep.sigma == 1.0
        assert rep.slab_floor_ok


def test_verify_thm1_fibonacci():
    rep = verify_thm1(fibonacci_lattice(15), budget=6, seed=9)
    assert rep.verdict == "PASS"
    assert rep.slab_floor_ok
    assert rep.slab_value > 0
    assert rep.j_lower <= min(1.0, rep.bound)
