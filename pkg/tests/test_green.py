"""Green functions, kernels, integral operators, classical limits."""

import math

import numpy as np
import pytest

from qdisc import (
    CapacityError,
    DiscElement,
    DomainError,
    GridFunction,
    apply_kernel,
    classical_limit_report,
    coef_order1,
    coef_order2,
    delta_fn,
    dilog,
    g_radial,
    g_radial_grid,
    gm_quadrature,
    gm_spectral,
    green_solve,
    kernel_G,
    kernel_assembled,
    kernel_invariance_residual,
    lambda_rho,
    laplacian_apply,
    radial_laplacian,
    rep_matrix,
    sector_laplacian_matrix,
)
from qdisc.green import gm_quadrature_grid
from conftest import random_element


def test_radial_solution_order1(ctx_wide):
    ctx = ctx_wide
    g1 = g_radial_grid(1, ctx, 44)
    lap = radial_laplacian(g1, ctx).values
    f0 = np.zeros(44)
    f0[0] = 1.0
    assert np.max(np.abs(lap[:41] - f0[:41])) < 1e-10


def test_radial_solution_order2(ctx_wide):
    ctx = ctx_wide
    g1 = g_radial_grid(1, ctx, 44)
    g2 = g_radial_grid(2, ctx, 44)
    lap2 = radial_laplacian(g2, ctx).values
    assert np.max(np.abs(lap2[:41] - g1.values[:41])) < 1e-11
    lap22 = radial_laplacian(GridFunction(lap2, False), ctx).values
    f0 = np.zeros(44)
    f0[0] = 1.0
    assert np.max(np.abs(lap22[:41] - f0[:41])) < 1e-10


def test_centre_value_series(ctx):
    # value at the disc centre from an independent coefficient sum
    total = 0.0
    q2 = ctx.q2
    for m in range(1, 400):
        total += (1.0 / q2 - 1.0) / (q2**-m - 1.0)
    expected = -(1 - q2) * total
    assert abs(g_radial(1, 0, ctx) - expected) < 1e-12


def test_quadrature_oracle_matches_series(ctx):
    for m in (1, 2):
        gq = gm_quadrature_grid(m, ctx, 21)
        gs = g_radial_grid(m, ctx, 21)
        assert np.max(np.abs(gq.values - gs.values)) < 1e-7


def test_gm_quadrature_point(ctx):
    assert abs(gm_quadrature(1, 1, ctx) - g_radial(1, 1, ctx)) < 1e-7
    with pytest.raises(DomainError):
        gm_quadrature(0, 1, ctx)


def test_spectral_image_inverts_eigenvalue(ctx):
    for rho in (0.25, 0.8, 1.9):
        for m in (1, 2):
            prod = lambda_rho(rho, ctx) ** m * gm_spectral(m, rho, ctx)
            assert abs(prod - (1 - ctx.q2)) < 1e-13


def test_kernel_terminating_expansion(ctx):
    # expansion of the l = -1 kernel: coefficient 1 on the (0,0) depth-0
    # block, -1 and -q^-2 on the two mixed-sector blocks, q^-2 on depth 1
    q = ctx.q
    K = kernel_G(-1.0, "plain", ctx, shape=(8, 8), sector_max=3)
    assert sorted(K.terms) == [(-1, 1), (0, 0), (1, -1)]
    a = np.arange(8)
    yinv = (1.0 / ctx.q2) ** a
    yg = ctx.q2**a
    leg1 = ctx.q2 * yinv * (1 - yg)
    refs = {
        (0, 0): np.outer(yinv, yinv) + q**-2 * np.outer(leg1, leg1),
        (1, -1): -(q**-2) * np.outer(yinv, yinv),
        (-1, 1): -1.0 * np.outer(yinv, yinv),
    }
    for key, ref in refs.items():
        scale = np.maximum(1.0, np.abs(ref))
        assert np.max(np.abs(K.term(*key) - ref) / scale) < 1e-13


def test_kernel_pairing_against_representation_trace(ctx):
    # independent route: pair the second leg with f through matrix traces
    # in the weighted-shift representation
    K = kernel_G(-1.0, "plain", ctx, shape=(10, 10), sector_max=2)
    f = delta_fn(1, ctx)
    direct = apply_kernel(K, f, ctx)
    dim = 10
    w = (1.0 / ctx.q2) ** np.arange(dim)
    acc = np.zeros((10,), dtype=complex)
    for (i, j), psi in K.terms.items():
        if j != 0:
            # build the second-leg element and f in the representation
            pass
    # sector-0 term only: nu(psi(.,eta) f(eta)) via the trace identity
    psi00 = K.term(0, 0)
    fmat = rep_matrix(f, dim, ctx).entries
    for arow in range(10):
        leg2 = rep_matrix(
            DiscElement({0: GridFunction(psi00[arow, :dim])}, ctx), dim, ctx
        ).entries
        acc[arow] = (1 - ctx.q2) * np.sum((leg2 @ fmat).diagonal() * w)
    assert np.max(np.abs(acc - direct.sector(0).values[:10])) / np.max(
        np.abs(acc)
    ) < 1e-12


def test_kernel_invariance_exact(ctx):
    for l0 in (1, 2, 3):
        K = kernel_G(-float(l0), "plain", ctx, shape=(10, 10), sector_max=l0 + 1)
        assert K.exact
        assert kernel_invariance_residual(K, ctx) < 1e-12


def test_kernel_derivative_matches_finite_difference(ctx):
    for N in (1, 2):
        Kd = kernel_G(float(N), "derivative", ctx, (6, 6), 2)
        errs = []
        for eps in (1e-3, 5e-4):
            Kp = kernel_G(N + eps, "plain", ctx, (6, 6), 2)
            Km = kernel_G(N - eps, "plain", ctx, (6, 6), 2)
            worst = 0.0
            for key in Kd.terms:
                fd = (Kp.term(*key) - Km.term(*key)) / (2 * eps)
                worst = max(worst, float(np.max(np.abs(fd - Kd.term(*key)))))
            errs.append(worst)
        assert errs[0] < 1e-5
        assert errs[1] / errs[0] == pytest.approx(0.25, abs=0.1)


def test_assembled_coefficients(ctx):
    assert coef_order1(1, ctx.q) == -1.0
    for qq in (0.9, 0.99, 0.999):
        for m in (2, 5, 10):
            dev_now = abs(coef_order1(m, qq) + 1.0 / m)
            assert dev_now < abs(coef_order1(m, 0.8) + 1.0 / m) or qq == 0.8
    # classical trend toward -1/m and 2/m^2
    for m in (1, 2, 7):
        assert abs(coef_order1(m, 0.999) + 1.0 / m) * m < 2e-2
        assert abs(coef_order2(m, 0.999) - 2.0 / m**2) * m * m < 4e-2


def test_kernel_centre_delta_gives_fundamental_solutions(ctx):
    f0 = delta_fn(0, ctx)
    for order in (1, 2):
        K = kernel_assembled(order, ctx, sector_max=1)
        sol = apply_kernel(K, f0, ctx)
        assert sorted(sol.sectors) == [0]
        ref = g_radial_grid(order, ctx)
        assert np.max(np.abs(sol.sector(0).values - ref.values)) < 1e-10


def test_kernel_application_uses_orthogonality(ctx):
    # a kernel with only a nonzero-sector second leg pairs to zero against
    # a radial element
    K = kernel_G(-1.0, "plain", ctx, shape=(8, 8), sector_max=1)
    K.terms.pop((0, 0))
    with pytest.raises(CapacityError):
        apply_kernel(K, delta_fn(0, ctx), ctx)


def test_power_kernel_pairs_to_power_function(ctx):
    # the one-parameter kernel paired with the centre delta returns
    # (1 - q^2) y^l for every parameter
    for l in (-1.0, -2.0, 0.7, 1.5):
        K = kernel_G(l, "plain", ctx, shape=(10, 10), sector_max=2)
        out = apply_kernel(K, delta_fn(0, ctx), ctx)
        a = np.arange(10)
        expected = (1 - ctx.q2) * np.exp(2 * a * l * math.log(ctx.q))
        assert np.max(
            np.abs(out.sector(0).values[:10] - expected) / np.maximum(1.0, np.abs(expected))
        ) < 1e-13


def test_main_inversion_identity(ctx):
    K1 = kernel_assembled(1, ctx, sector_max=3)
    K2 = kernel_assembled(2, ctx, sector_max=3)
    rng = np.random.default_rng(9)
    for m in range(-3, 4):
        v = np.zeros(ctx.npoints, dtype=complex)
        v[:8] = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        f = DiscElement({m: GridFunction(v)}, ctx)
        back1 = laplacian_apply(apply_kernel(K1, f, ctx), ctx) - f
        r1 = max(np.max(np.abs(g.values[:-1])) for g in back1.sectors.values())
        assert r1 < 1e-8
        back2 = (
            laplacian_apply(laplacian_apply(apply_kernel(K2, f, ctx), ctx), ctx) - f
        )
        r2 = max(np.max(np.abs(g.values[:-2])) for g in back2.sectors.values())
        assert r2 < 1e-7


def test_assembled_invariance_below_tail(ctx):
    for order in (1, 2):
        K = kernel_assembled(order, ctx, sector_max=2)
        assert kernel_invariance_residual(K, ctx) <= max(K.tail_bound, 1e-12)


def test_green_solve_preserves_sectors(ctx, rng):
    f = random_element(ctx, rng, sectors=2, support=5)
    sol = green_solve(f, 1, ctx)
    assert set(sol.sectors) <= set(f.sectors)


def test_green_solve_requires_finite(ctx):
    with pytest.raises(DomainError):
        green_solve(DiscElement.one(ctx), 1, ctx)


def test_matrix_solve_oracle(ctx):
    rng = np.random.default_rng(77)
    dim = 200
    for sector in (-1, 0, 2):
        mat = sector_laplacian_matrix(sector, dim, ctx)
        v = np.zeros(ctx.npoints, dtype=complex)
        v[:6] = rng.standard_normal(6)
        f = DiscElement({sector: GridFunction(v)}, ctx)
        sol = green_solve(f, 1, ctx)
        rhs = np.zeros(dim, dtype=complex)
        rhs[: ctx.npoints] = v
        x = np.linalg.solve(mat, rhs)
        assert np.max(np.abs(x[: ctx.npoints] - sol.sector(sector).values)) < 1e-6


def test_uniqueness_transfer(ctx):
    # two intertwining inverse routes that agree on the centre delta agree
    # on the whole spanning set
    dim = 160
    K1 = kernel_assembled(1, ctx, sector_max=2)
    mats = {s: sector_laplacian_matrix(s, dim, ctx) for s in (-2, -1, 0, 1, 2)}
    f0 = delta_fn(0, ctx)
    route_a = apply_kernel(K1, f0, ctx).sector(0).values
    rhs = np.zeros(dim, dtype=complex)
    rhs[0] = 1.0
    route_b = np.linalg.solve(mats[0], rhs)
    assert np.max(np.abs(route_a - route_b[: ctx.npoints])) < 1e-6
    for s in (-2, -1, 1, 2):
        for n in (0, 3, 7):
            f = DiscElement({s: GridFunction.delta(n, ctx.npoints)}, ctx)
            a = apply_kernel(K1, f, ctx).sector(s).values
            rhs = np.zeros(dim, dtype=complex)
            rhs[n] = 1.0
            b = np.linalg.solve(mats[s], rhs)
            assert np.max(np.abs(a - b[: ctx.npoints])) < 1e-6


def test_route_consistency(ctx):
    rng = np.random.default_rng(5)
    v = np.zeros(ctx.npoints, dtype=complex)
    v[:5] = rng.standard_normal(5)
    f = DiscElement({-1: GridFunction(v)}, ctx)
    once = green_solve(f, 1, ctx)
    once_f = DiscElement(
        {m: GridFunction(g.values.copy(), True) for m, g in once.sectors.items()}, ctx
    )
    twice = green_solve(once_f, 1, ctx)
    direct = green_solve(f, 2, ctx)
    assert twice.max_abs_diff(direct) < 1e-6


def test_capacity_on_missing_sector(ctx):
    K = kernel_assembled(1, ctx, sector_max=1)
    f = DiscElement({2: GridFunction.delta(0, ctx.npoints)}, ctx)
    with pytest.raises(CapacityError):
        apply_kernel(K, f, ctx)


def test_classical_limit_report():
    rows = classical_limit_report([0.0, 0.25, 0.5, 0.75], [0.9, 0.99, 0.999])
    by_qt = {(r.q, r.t): r for r in rows}
    # the t = 0 rows vanish identically
    for q in (0.9, 0.99, 0.999):
        r = by_qt[(q, 0.0)]
        assert r.err_order1 == 0.0 and r.err_order2 == 0.0
    # errors decrease monotonically along the q list
    for t in (0.25, 0.5, 0.75):
        e1 = [by_qt[(q, t)].err_order1 for q in (0.9, 0.99, 0.999)]
        e2 = [by_qt[(q, t)].err_order2 for q in (0.9, 0.99, 0.999)]
        assert e1[0] > e1[1] > e1[2]
        assert e2[0] > e2[1] > e2[2]
        assert by_qt[(0.999, t)].reflection_residual < 1e-12


def test_limit_targets_against_dilog_reflection():
    # the second-order target rewrites to the reflected classical form
    for t in (0.25, 0.5, 0.75):
        target = 2 * dilog(t) + math.log(t) * math.log(1 - t)
        classical = (
            -math.log(1 - t) * math.log(t) - 2 * dilog(1 - t) + math.pi**2 / 3
        )
        assert abs(target - classical) < 1e-12


def test_limit_rejects_bad_arguments():
    with pytest.raises(DomainError):
        classical_limit_report([0.5], [1.5])
    with pytest.raises(DomainError):
        classical_limit_report([1.0], [0.9])
