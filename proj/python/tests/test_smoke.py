import math

import pytest

import gammaw


def gaussian_problem(dim=2):
    return gammaw.Problem.from_text(dim, "gaussian", "sqrt1sq")


def test_field_parse_and_eval():
    f = gammaw.parse_field("x0^2 + 3*x1", 2)
    assert f([2.0, 1.0]) == pytest.approx(7.0)
    assert f.diff(0)([2.0, 1.0]) == pytest.approx(4.0)
    g = gammaw.exp(gammaw.Field.coordinate(2, 0)) * 2.0
    assert g([0.0, 5.0]) == pytest.approx(2.0)


def test_errors_map_to_exception_classes():
    with pytest.raises(gammaw.ParseError):
        gammaw.parse_field("x0 +", 1)
    with pytest.raises(gammaw.Error):
        gammaw.parse_field("x3", 2)


def test_jet():
    jet = gammaw.eval_jet(gammaw.parse_field("x0*x1", 2), [1.0, 2.0])
    assert jet.value == pytest.approx(2.0)
    assert list(jet.gradient) == pytest.approx([2.0, 1.0])
    assert jet.hessian[0, 1] == pytest.approx(1.0)


def test_operators_on_linear_function():
    # For U = |x|^2/2 and f = x0: L f = -x0, Gamma_2(f) = 1.
    p = gaussian_problem()
    f = gammaw.parse_field("x0", 2)
    x = [0.3, -0.7]
    assert gammaw.apply_L(p, f, x) == pytest.approx(-0.3)
    assert gammaw.gamma2(p, f, x) == pytest.approx(1.0)
    assert gammaw.gamma_w(p, f, f, x) == pytest.approx(1.0 + (1 + 0.58) * 0.09)
    assert gammaw.gamma2_w(p, f, x) == pytest.approx(gammaw.gamma2_w_definitional(p, f, x), rel=1e-10)


def test_gamma_integrand_closed_form():
    p = gaussian_problem()
    x = [0.4, 1.1]
    u = 1.0 / (1.0 + 0.16 + 1.21)
    assert gammaw.gamma_integrand(p, x) == pytest.approx(-u + 4 * u * u - 1)


def test_weight_vanishes():
    p = gammaw.Problem.from_text(1, "gaussian", "zero")
    with pytest.raises(gammaw.WeightVanishes):
        gammaw.gamma_integrand(p, [0.0])


def test_rho_estimate():
    p = gaussian_problem()
    s = gammaw.SearchConfig()
    s.grid_per_axis = 16
    s.multistart_count = 4
    rho = gammaw.estimate_rho(p, s)
    assert rho.value == pytest.approx(1.0, abs=1e-6)
    assert not rho.diverging


def test_semigroup_mc_matches_mehler():
    p = gaussian_problem()
    f = gammaw.parse_field("x0^2", 2)
    exact = gammaw.mehler_Qt(p, f, [0.5, 0.0], 0.5)
    mc = gammaw.estimate_Qt(p, f, [0.5, 0.0], 0.5, n_paths=4000, dt=1e-2, seed=7)
    assert abs(mc.mean - exact) < 4 * mc.std_error + 1e-2


def test_commutation_report():
    p = gaussian_problem()
    battery = {"exp": gammaw.parse_field("exp(0.1*x0)", 2)}
    r = gammaw.verify_commutation(p, -1.0, [0.5], [[0.0, 0.0]], battery=battery, n_paths=2000, dt=1e-2)
    assert len(r.cases) == 1
    assert r.cases[0].verdict in ("pass", "inconclusive")
    assert "exp" in r.to_csv()


def test_optimality_study():
    p = gaussian_problem()
    rows, best = gammaw.optimality_study(p, [[0.0, 0.0], [0.5, 0.0]], [10.0, 100.0])
    assert len(rows) == 4
    assert best == pytest.approx(-1.0, abs=1e-2)
    assert all(math.isfinite(r["ratio"]) for r in rows)


def test_run_cli():
    code, out, _ = gammaw.run_cli(["check-curvature", "--override", "problem.dim=3"])
    assert code == 0
    assert "gamma:" in out
    code, _, _ = gammaw.run_cli(["--override", "nosuch.key=1", "check-curvature"])
    assert code == 2
