import math

import numpy as np
import pytest

from arithchern.hermitian import (ChartGrid, DegreeMismatch, ExprError, FormGrid, HermBundle,
                                  SingularMetric, chern_forms, curvature, integrate,
                                  parse_expr, surface_chern)
from arithchern.hermitian.expr import check_global, parse_matrix
from arithchern.hermitian.fields import jet, values
from arithchern.hermitian.grid import CHARTS
from arithchern.hermitian.sequences import (ExactSeqData, induced_metrics,
                                            second_fundamental_form, sff_density)
from arithchern.poly_ring import BinaryForm

PHI = "abs2(X0)/(abs2(X0)+abs2(X1))"
PHI2 = "re(X0*conj(X1))/(abs2(X0)+abs2(X1))"


def seq(E1, e, s1, s2):
    return ExactSeqData(E1, e, BinaryForm.parse(s1), BinaryForm.parse(s2))


def flat2():
    return HermBundle.direct_sum(HermBundle.line(0), HermBundle.line(0))


# --- grid and forms ---------------------------------------------------------------

def test_grid_area_and_shape(grid64):
    assert abs(grid64.area_check() - 1.0) < 1e-12
    assert grid64.h == 1 / 64
    assert grid64.size == grid64.n_r * grid64.n_theta
    assert np.all(np.abs(grid64.points) < 1)


def test_grid_mirror_is_conjugation(grid64):
    m = grid64.mirror_index()
    assert np.allclose(grid64.points[m], np.conj(grid64.points))


def test_integrate_rejects_wrong_degree(grid64):
    with pytest.raises(DegreeMismatch):
        integrate(FormGrid.zeros((0, 0), grid64))
    with pytest.raises(DegreeMismatch):
        FormGrid.zeros((1, 1), grid64) + FormGrid.zeros((0, 0), grid64)
    assert integrate(FormGrid.zeros((1, 1), grid64)) == 0.0


def test_small_grid_rejected():
    with pytest.raises(ValueError):
        ChartGrid.build(2)


# --- expressions ------------------------------------------------------------------

def test_expr_values_on_both_charts():
    z = np.array([0.3 + 0.4j, -0.7j])
    fz = values(parse_expr(PHI, "z"), z)
    fw = values(parse_expr(PHI, "w"), 1 / z)
    assert np.allclose(fz, np.abs(z) ** 2 / (1 + np.abs(z) ** 2))
    assert np.allclose(fz, fw)


@pytest.mark.parametrize("text", ["abs2(X0)", "re(X0^2/(abs2(X0)+abs2(X1)))", "abs2(z)"])
def test_check_global_rejects(text):
    with pytest.raises(ExprError):
        check_global(text)


@pytest.mark.parametrize("text", ["foo(X0)", "X0 +", "X2", "__import__('os')"])
def test_parse_errors(text):
    with pytest.raises(ExprError):
        parse_expr(text, "z")


def test_parse_matrix():
    m = parse_matrix("[[1, 0], [0, exp(-abs2(X0)/(abs2(X0)+abs2(X1)))]]", "z")
    assert len(m) == 2 and len(m[1]) == 2


def test_jet_fd_matches_analytic():
    e = parse_expr("exp(" + PHI2 + ")", "z")
    pts = np.array([0.2 + 0.1j, -0.5 + 0.6j, 0.9j])
    a = jet(e, pts, "analytic")
    errs = []
    for h in (1e-2, 5e-3):
        f = jet(e, pts, "fd", h)
        errs.append(max(np.max(np.abs(f.fz - a.fz)), np.max(np.abs(f.fzzb - a.fzzb))))
    assert errs[1] < errs[0] / 3.5        # second order


# --- curvature --------------------------------------------------------------------

def test_flat_curvature_is_zero(grid64):
    c1 = chern_forms(curvature(HermBundle.line(0), grid64))["c1"]
    assert c1.sup() == 0.0


def test_fubini_study_degree(grid256):
    c1 = chern_forms(curvature(HermBundle.line(1), grid256, "analytic"))["c1"]
    assert abs(integrate(c1) - 1) < 1e-6
    z = grid256.points
    assert np.allclose(c1.values["z"], 1 / (math.pi * (1 + np.abs(z) ** 2) ** 2))


@pytest.mark.parametrize("n, phi", [(2, None), (-1, PHI), (3, PHI2)])
def test_degree_of_line_bundles(grid256, n, phi):
    c1 = chern_forms(curvature(HermBundle.line(n, phi), grid256, "analytic"))["c1"]
    assert abs(integrate(c1) - n) < 1e-6
    assert c1.seam_defect() < 1e-9
    assert c1.real_structure_defect() < 1e-9


def test_gaussian_weight_curvature_is_constant():
    # h = exp(-|z|^2) on a chart: c1 coefficient = (1/pi) d dbar |z|^2 = 1/pi
    e = parse_expr("exp(-abs2(z))", "z")
    pts = np.array([0.1, 0.3 + 0.2j, -0.6j])
    J = jet(e.log(), pts, "analytic")
    assert np.allclose(-J.fzzb / math.pi, 1 / math.pi)


def test_fd_curvature_converges_to_analytic():
    E = HermBundle.line(1, PHI2)
    errs = []
    for N in (32, 64):
        g = ChartGrid.build(N, 16, 32)
        fd = chern_forms(curvature(E, g, "fd"))["c1"]
        an = chern_forms(curvature(E, g, "analytic"))["c1"]
        errs.append((fd - an).sup())
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_direct_sum_c2_is_product_pointwise():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 10)) + 1j * rng.normal(size=(4, 10))
    b = rng.normal(size=(4, 10)) + 1j * rng.normal(size=(4, 10))
    diag = lambda u, v: np.stack([np.stack([u, 0 * u], -1), np.stack([0 * v, v], -1)], -2)
    t = [diag(a[i], b[i]) for i in range(4)]
    out = surface_chern(*t)
    k = 1 / math.pi
    want = k * k * (a[0] * b[1] + b[0] * a[1] - a[2] * b[3] - b[2] * a[3])
    assert np.allclose(out["c2"], want)


def test_transition_compatibility(grid64):
    E = HermBundle.direct_sum(HermBundle.line(1, PHI), HermBundle.line(-2, PHI2))
    assert E.transition_defect(grid64) < 1e-12


def test_singular_metric_detected(grid64):
    E = HermBundle.twisted_matrix(0, 2, "[[1, 2], [2, 1]]")
    with pytest.raises(SingularMetric):
        curvature(E, grid64)


# --- sequences --------------------------------------------------------------------

def test_split_injection_gives_flat_induced_metrics(grid64):
    s = ExactSeqData(flat2(), 0, BinaryForm((1,)), BinaryForm((0,)))
    h0, h2 = induced_metrics(s, grid64)
    for c in CHARTS:
        assert np.allclose(values(h0.metric[c][0][0], grid64.points), 1)
        assert np.allclose(values(h2.metric[c][0][0], grid64.points), 1)


def test_shipped_induced_metric_formula(grid64):
    s = seq(flat2(), -1, "X0", "2*X1")
    A = values(s.family_fields("z")["A"], grid64.points).real
    assert np.allclose(A, np.abs(grid64.points) ** 2 + 4)


@pytest.mark.parametrize("E1, e, s1, s2", [
    (flat2(), -1, "X0", "2*X1"),
    (HermBundle.direct_sum(HermBundle.line(1, PHI2), HermBundle.line(2)), -1,
     "X0^2-3*X1^2", "X0^3+2*X1^3"),
    (HermBundle.direct_sum(HermBundle.line(1), HermBundle.line(1)), 0, "X0-2*X1", "X0+2*X1"),
])
def test_whitney_pointwise(grid64, E1, e, s1, s2):
    alt = seq(E1, e, s1, s2).alternating_c1(grid64, "analytic")
    assert alt.sup() < 1e-9


def test_non_injective_map_rejected():
    # s1, s2 with a common complex zero
    from arithchern.hermitian.bundles import SingularMetric as SM
    with pytest.raises(SM):
        seq(flat2(), -1, "X0", "X0")


def test_second_fundamental_form_split_vanishes(grid64):
    E1 = HermBundle.direct_sum(HermBundle.line(0, PHI), HermBundle.line(1))
    s = ExactSeqData(E1, 0, BinaryForm((1,)), BinaryForm((0, 0)))
    assert second_fundamental_form(s, grid64, "analytic").sup() == 0.0


def test_second_fundamental_form_positive_and_converged():
    s = seq(flat2(), -1, "X0", "2*X1")
    vals = [integrate(sff_density(s, ChartGrid.build(N), "fd")) for N in (128, 256)]
    exact = integrate(sff_density(s, ChartGrid.build(256), "analytic"))
    assert vals[1] > 0 and exact > 0
    assert abs(vals[1] - exact) < abs(vals[0] - exact) / 3


def test_conformal_rescale_keeps_beta(grid64):
    s = seq(flat2(), -1, "X0", "2*X1")
    scaled = HermBundle.direct_sum(HermBundle.line(0, PHI2), HermBundle.line(0, PHI2))
    t = seq(scaled, -1, "X0", "2*X1")
    b1 = second_fundamental_form(s, grid64, "analytic")
    b2 = second_fundamental_form(t, grid64, "analytic")
    assert (b1 - b2).sup() < 1e-12
