import math

import numpy as np
import pytest

from latdisc.convex import (
    AxisBox,
    Ball,
    HPolytope,
    OffsetSpec,
    VPolytope,
    VolumeEstimate,
    binom_kappa_sum,
    body_from_json_dict,
    body_volume,
    boundary_neighborhood_volume,
    box_quermassintegral,
    cube_intrinsic_volume,
    cube_quermassintegral,
    inradius,
    kappa,
    log_kappa,
    offset_volume,
    offset_volumes,
    parallel_volume_derivative_check,
    random_bodies,
    remark_lower,
    remark_upper,
    steiner_volume,
    unit_cube,
)
from latdisc.errors import EmptyBodyError
from latdisc.montecarlo import McConfig


TRIANGLE = HPolytope(
    normals=[[1.0, 2.0], [-1.0, 0.0], [0.0, -1.0]], offsets=[1.0, 0.0, 0.0]
)


def test_kappa_small_values():
    assert kappa(0) == pytest.approx(1.0, abs=1e-14)
    assert kappa(1) == pytest.approx(2.0, abs=1e-13)
    assert kappa(2) == pytest.approx(math.pi, abs=1e-13)
    assert kappa(5) == pytest.approx(8 * math.pi**2 / 15, abs=1e-12)


def test_kappa_max_at_five():
    vals = [kappa(j) for j in range(51)]
    assert all(v <= kappa(5) + 1e-12 for v in vals)
    assert log_kappa(10**7) < 0  # stable far beyond the float-gamma range


def test_cube_intrinsic_volumes():
    assert cube_intrinsic_volume(7, 0) == 1
    assert cube_intrinsic_volume(7, 7) == 1
    assert cube_intrinsic_volume(4, 2) == 6
    with pytest.raises(ValueError):
        cube_intrinsic_volume(3, 4)


def test_cube_quermassintegral_is_kappa():
    assert cube_quermassintegral(3, 1) == pytest.approx(kappa(1), abs=1e-13)
    # d * W_1 is the surface area of the unit cube
    assert 3 * cube_quermassintegral(3, 1) == pytest.approx(6.0, abs=1e-12)
    for d in (2, 3, 5):
        for j in range(d + 1):
            assert cube_quermassintegral(d, j) == pytest.approx(kappa(j), abs=1e-12)


def test_box_quermassintegral_monotone_under_inclusion():
    for d in (2, 3, 4):
        sides = np.full(d, 0.6)
        for j in range(d + 1):
            assert box_quermassintegral(sides, j) <= cube_quermassintegral(d, j) + 1e-12
        # nested boxes
        small, big = np.full(d, 0.3), np.full(d, 0.8)
        for j in range(d + 1):
            assert box_quermassintegral(small, j) <= box_quermassintegral(big, j) + 1e-12


def test_steiner_cube_2d():
    est = steiner_volume(unit_cube(2), 0.5)
    assert est.exact
    assert est.value == pytest.approx(1 + 4 * 0.5 + math.pi * 0.25, abs=1e-12)


def test_steiner_ball():
    est = steiner_volume(Ball([0.5, 0.5], 0.3), 0.1)
    assert est.value == pytest.approx(math.pi * 0.16, abs=1e-12)


def test_steiner_rho_zero_is_volume():
    for body in [unit_cube(3), Ball([0.5, 0.5], 0.25)]:
        assert steiner_volume(body, 0.0).value == pytest.approx(
            body.volume_exact(), abs=1e-12
        )


def test_steiner_cube_against_mc_oracle():
    est = steiner_volume(unit_cube(2), 0.3)
    # MC oracle: sample [-0.3, 1.3]^2, distance to the cube
    cube = unit_cube(2)
    cfg = McConfig(n_samples=200_000, seed=7)
    from latdisc.montecarlo import box_fraction

    hits, n = box_fraction(
        np.array([-0.3, -0.3]),
        np.array([1.3, 1.3]),
        lambda x: cube.dist_many(x) <= 0.3,
        cfg,
    )
    mc = 1.6 * 1.6 * hits / n
    se = 1.6 * 1.6 * math.sqrt(0.25 / n)
    assert abs(est.value - mc) <= 3 * se


def test_steiner_polygon_2d():
    tri = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]])
    est = steiner_volume(tri, 0.2)
    perim = 1 + 0.5 + math.hypot(1, 0.5)
    assert est.exact
    assert est.value == pytest.approx(0.25 + perim * 0.2 + math.pi * 0.04, abs=1e-12)


def test_steiner_mc_fallback_warns():
    with pytest.warns(UserWarning):
        est = steiner_volume(TRIANGLE, 0.1, McConfig(n_samples=50_000, seed=3))
    assert not est.exact
    # same region as the exact 2-d polygon Steiner value
    tri = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]])
    exact = steiner_volume(tri, 0.1).value
    assert abs(est.value - exact) <= 4 * est.std_error


def test_dist_to_complement_cube_center():
    cube = unit_cube(3)
    assert cube.dist_to_complement([0.5, 0.5, 0.5]) == pytest.approx(0.5)
    assert cube.dist_to_complement([2.0, 0.5, 0.5]) == 0.0


def test_dist_to_body_ball():
    ball = Ball([0.5, 0.5], 0.3)
    assert ball.dist_to_body([0.9, 0.5]) == pytest.approx(0.1, abs=1e-14)
    assert ball.dist_to_body([0.5, 0.6]) == 0.0
    assert ball.dist_to_complement([0.5, 0.5]) == pytest.approx(0.3)


def test_triangle_projection_matches_grid_oracle():
    x = np.array([1.0, 1.0])
    d = TRIANGLE.dist_to_body(x)
    # dense grid oracle over the triangle
    g = np.linspace(0, 1, 2001)
    xx, yy = np.meshgrid(g, g * 0.5)
    pts = np.c_[xx.ravel(), yy.ravel()]
    pts = pts[pts[:, 0] + 2 * pts[:, 1] <= 1.0]
    oracle = np.min(np.linalg.norm(pts - x, axis=1))
    assert abs(d - oracle) <= 1e-3  # grid resolution limit
    assert d == pytest.approx(2 / math.sqrt(5), abs=1e-8)


def test_projection_point_is_feasible_and_optimal():
    p = TRIANGLE.project([1.0, 1.0])
    assert TRIANGLE.margins_many(p[None, :]).max() <= 1e-10
    assert np.allclose(p, [0.6, 0.2], atol=1e-8)


def test_offset_ball_annulus():
    est = offset_volume(Ball([0.5, 0.5], 0.3), OffsetSpec(0.1, "outer"))
    assert est.exact
    assert est.value == pytest.approx(math.pi * (0.4**2 - 0.3**2), abs=1e-12)


def test_offset_cube_outer_matches_lemma3_equality_case():
    est = offset_volume(unit_cube(2), OffsetSpec(0.1, "outer"))
    assert est.value == pytest.approx(4 * 0.1 + math.pi * 0.01, abs=1e-12)


def test_offset_rho_zero():
    for side in ("outer", "inner"):
        assert offset_volume(unit_cube(2), OffsetSpec(0.0, side)).value == 0.0


def test_offset_inner_cube():
    est = offset_volume(unit_cube(3), OffsetSpec(0.05, "inner"))
    assert est.value == pytest.approx(1 - 0.9**3, abs=1e-12)


def test_offset_mc_matches_polygon_steiner_difference():
    tri = VPolytope([[0.1, 0.1], [0.9, 0.1], [0.1, 0.5]])
    rho = 0.08
    mc = offset_volume(tri, OffsetSpec(rho, "outer"), McConfig(n_samples=200_000, seed=11))
    exact = steiner_volume(tri, rho).value - tri.volume_exact()
    assert abs(mc.value - exact) <= 3 * mc.std_error


def test_offset_volumes_shares_stream_and_is_monotone():
    tri = VPolytope([[0.1, 0.1], [0.9, 0.1], [0.1, 0.5]])
    ests = offset_volumes(tri, [0.01, 0.05, 0.1], "outer", McConfig(n_samples=100_000, seed=5))
    vals = [e.value for e in ests]
    assert vals == sorted(vals)


def test_offset_budget_guard():
    tri = VPolytope([[0.1, 0.1], [0.9, 0.1], [0.1, 0.5]])
    with pytest.raises(ValueError):
        offset_volume(tri, OffsetSpec(0.1, "outer"), McConfig(n_samples=100, seed=1))


def test_boundary_neighborhood_ball():
    est = boundary_neighborhood_volume(Ball([0.5, 0.5], 0.3), 0.1)
    assert est.value == pytest.approx(math.pi * (0.4**2 - 0.2**2), abs=1e-12)
    assert est.value <= 2 * 2**6 * 0.1


def test_boundary_neighborhood_point():
    pt = VPolytope([[0.4, 0.4, 0.4]])
    est = boundary_neighborhood_volume(pt, 0.2)
    assert est.exact
    assert est.value == pytest.approx(kappa(3) * 0.2**3, abs=1e-12)


def test_boundary_neighborhood_cube_3d():
    est = boundary_neighborhood_volume(unit_cube(3), 0.05)
    outer = sum(math.comb(3, j) * kappa(j) * 0.05**j for j in range(1, 4))
    inner = 1 - 0.9**3
    assert est.value == pytest.approx(outer + inner, abs=1e-12)


def test_inradius_closed_forms():
    assert inradius(unit_cube(4)) == pytest.approx(0.5)
    assert inradius(Ball([0.5, 0.5], 0.21)) == 0.21
    assert inradius(AxisBox([0.1, 0.2], [0.9, 0.5])) == pytest.approx(0.15)


def test_inradius_triangle_chebyshev():
    # oracle: area / semiperimeter for a triangle
    area = 0.25
    semi = (1 + 0.5 + math.hypot(1, 0.5)) / 2
    assert inradius(TRIANGLE) == pytest.approx(area / semi, abs=1e-9)
    assert area / semi == pytest.approx(0.190983, abs=1e-6)


def test_inradius_empty_body_raises():
    with pytest.raises(EmptyBodyError):
        HPolytope([[1.0, 0.0], [-1.0, 0.0]], [0.2, -0.8])


def test_derivative_check_ball():
    fd, analytic = parallel_volume_derivative_check(Ball([0.5, 0.5], 0.3), 0.1, 1e-4)
    assert analytic == pytest.approx(2 * math.pi * 0.4, abs=1e-12)
    assert abs(fd - analytic) <= 1e-6


def test_derivative_check_cube_outer():
    fd, analytic = parallel_volume_derivative_check(unit_cube(2), 0.2, 1e-4)
    assert analytic == pytest.approx(4 + 2 * math.pi * 0.2, abs=1e-12)
    assert abs(fd - analytic) <= 1e-6


def test_derivative_check_cube_inner():
    fd, analytic = parallel_volume_derivative_check(unit_cube(2), -0.1, 1e-5)
    assert analytic == pytest.approx(3.2, abs=1e-12)
    assert abs(fd - analytic) <= 1e-6


def test_derivative_check_domain_guard():
    with pytest.raises(ValueError):
        parallel_volume_derivative_check(Ball([0.5, 0.5], 0.3), -0.3, 1e-3)


def test_binom_kappa_sum_small():
    assert binom_kappa_sum(1) == pytest.approx(math.log(2), abs=1e-12)
    assert binom_kappa_sum(2) == pytest.approx(math.log(4 + math.pi), abs=1e-12)


def test_remark_sandwich_large_d():
    for d in (10, 100, 1000):
        s = binom_kappa_sum(d)
        assert remark_lower(d, 0.3) <= s
        if d >= 1000:
            assert s / d ** (2 / 3) <= 5.1 * math.log(d * math.sqrt(2 * math.e**3 * math.pi))


def test_remark_parameter_validation():
    with pytest.raises(ValueError):
        remark_lower(10, 0.7)
    with pytest.raises(ValueError):
        remark_upper(10, 2.0)


def test_volume_estimate_invariant():
    est = VolumeEstimate.exact_value(0.5)
    assert est.exact and est.std_error == 0.0


def test_random_bodies_inside_cube_and_valid():
    rng = np.random.Generator(np.random.Philox(key=np.array([1, 2], dtype=np.uint64)))
    for d in (2, 3, 4):
        for body in random_bodies(d, 8, rng):
            lo, hi = body.bounding_box()
            assert np.all(lo >= -1e-9) and np.all(hi <= 1 + 1e-9)
            assert inradius(body) >= 0
            vol = body_volume(body, McConfig(n_samples=20_000, seed=2))
            assert 0 <= vol.value <= 1 + 1e-9


def test_lemma2_and_lemma3_small_sample():
    rng = np.random.Generator(np.random.Philox(key=np.array([5, 6], dtype=np.uint64)))
    cfg = McConfig(n_samples=100_000, seed=9)
    for d in (2, 3):
        for body in random_bodies(d, 4, rng):
            for rho in (0.05, 0.1):
                outer = offset_volume(body, OffsetSpec(rho, "outer"), cfg)
                inner = offset_volume(body, OffsetSpec(rho, "inner"), cfg)
                se = math.hypot(outer.std_error, inner.std_error)
                assert outer.value >= inner.value - 3 * se
                assert max(outer.value, inner.value) <= 2 ** (d + 3) * rho + 3 * se


def test_outer_offset_monotone_in_rho_exact_bodies():
    grid = np.linspace(0.0, 0.5, 11)
    for body in [Ball([0.5, 0.5], 0.25), AxisBox([0.2, 0.3], [0.7, 0.8]), unit_cube(3)]:
        vals = [offset_volume(body, OffsetSpec(float(r), "outer")).value for r in grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_inner_offset_saturates_above_inradius():
    # K_rho is empty below -r(K), so the inner shell at rho > r(K) is all of K
    box = AxisBox([0.4, 0.1], [0.6, 0.9])  # inradius 0.1
    est = offset_volume(box, OffsetSpec(0.11, "inner"))
    assert est.value == pytest.approx(box.volume_exact(), abs=1e-12)
    ball = Ball([0.5, 0.5], 0.2)
    est = offset_volume(ball, OffsetSpec(0.21, "inner"))
    assert est.value == pytest.approx(ball.volume_exact(), abs=1e-12)


def test_body_json_roundtrip():
    for body in [
        Ball([0.5, 0.5], 0.2),
        AxisBox([0.1, 0.2], [0.8, 0.9]),
        TRIANGLE,
        VPolytope([[0.1, 0.1], [0.9, 0.1], [0.1, 0.5]]),
    ]:
        back = body_from_json_dict(body.to_json_dict())
        assert type(back) is type(body)
        x = np.array([[0.3, 0.3], [0.95, 0.95]])
        assert np.allclose(body.dist_many(x), back.dist_many(x))
