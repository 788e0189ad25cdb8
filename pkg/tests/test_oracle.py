import math
import sys
from pathlib import Path

import numpy as np
import pytest

from exact_ising import (BETA_C, LatticeGraph, build_dual, build_square_lattice,
                         enumerate_boltzmann, enumerate_rc, es_joint_check, tv_distance)
from exact_ising.oracle import (DistributionTable, SizeGuardError, chi_square, chi_square_critical,
                                dual_route_distribution, duality_error, empirical,
                                plus_conditional_error)

sys.path.insert(0, str(Path(__file__).parent / "fixtures"))
from make_tables import BETAS, table_path  # noqa: E402


def single_edge():
    return LatticeGraph(2, np.array([[0, 1]]), np.zeros(2, dtype=int))


def test_single_site_is_fair():
    t = enumerate_boltzmann(build_square_lattice(1), 2.0)
    np.testing.assert_allclose(t.probs, [0.5, 0.5])


def test_infinite_temperature_uniform(g3):
    np.testing.assert_allclose(enumerate_boltzmann(g3, 0.0).probs, np.full(512, 1 / 512))


def test_g2_hand_enumeration(g2):
    # 4-cycle: 2 states agree on all 4 edges, 12 on 2, 2 on none
    Z = 2 * math.e**4 + 12 * math.e**2 + 2
    t = enumerate_boltzmann(g2, 1.0)
    assert t.Z == pytest.approx(Z, rel=1e-12)
    assert t.probs[15] == pytest.approx(math.e**4 / Z, rel=1e-12)
    assert t.probs[0b1001] == pytest.approx(1 / Z, rel=1e-12)
    assert t.probs.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bc", ["free", "plus", "minus"])
@pytest.mark.parametrize("beta", [0.0, 0.5, 30.0])
def test_tables_normalised(g3, bc, beta):
    t = enumerate_boltzmann(g3, beta, bc)
    assert t.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(t.probs >= 0)
    assert np.isfinite(t.log_Z)


def test_boundary_symmetry(g3):
    plus = enumerate_boltzmann(g3, 0.7, "plus").probs
    minus = enumerate_boltzmann(g3, 0.7, "minus").probs
    np.testing.assert_allclose(plus, minus[::-1], atol=1e-15)
    free = enumerate_boltzmann(g3, 0.7).probs
    np.testing.assert_allclose(free, free[::-1], atol=1e-15)


def test_size_guards():
    with pytest.raises(SizeGuardError):
        enumerate_boltzmann(build_square_lattice(5), 0.3)
    with pytest.raises(SizeGuardError):
        enumerate_rc(build_square_lattice(4), 0.3)


def test_rc_single_edge():
    p = 0.3
    t = enumerate_rc(single_edge(), p)
    w = np.array([(1 - p) * 4, p * 2])
    np.testing.assert_allclose(t.probs, w / w.sum())


def test_rc_percolation_case(g3):
    p = 0.35
    t = enumerate_rc(g3, p, q=1)
    sizes = np.array([bin(m).count("1") for m in range(4096)])
    np.testing.assert_allclose(t.probs, p**sizes * (1 - p) ** (12 - sizes), atol=1e-15)


def test_rc_duality_g2(g2):
    d, m = build_dual(2)
    assert duality_error(g2, d, m, 2 - math.sqrt(2)) < 1e-12
    assert duality_error(g2, d, m, 0.3) < 1e-12
    # a wrong dual parameter breaks it
    assert duality_error(g2, d, m, 0.3, p_dual=0.5) > 1e-3


def test_tv_basics(g3):
    t = enumerate_boltzmann(g3, 0.5)
    assert tv_distance(t, t) == 0.0
    a = DistributionTable(np.array([1.0, 0.0]), 0.0)
    b = DistributionTable(np.array([0.0, 1.0]), 0.0)
    assert tv_distance(a, b) == 1.0
    assert tv_distance([3, 1], DistributionTable(np.array([0.75, 0.25]), 0.0)) == 0.0
    with pytest.raises(ValueError):
        tv_distance(a, t)


def test_tv_metric(g3):
    tabs = [enumerate_boltzmann(g3, b, bc) for b in (0.2, 0.9, 1.5) for bc in ("free", "plus")]
    for x in tabs:
        for y in tabs:
            assert tv_distance(x, y) == pytest.approx(tv_distance(y, x))
            for z in tabs:
                assert tv_distance(x, z) <= tv_distance(x, y) + tv_distance(y, z) + 1e-15


def test_tv_null_calibration():
    # empirical TV between 2e5 uniform draws and the uniform table on 512 points
    rng = np.random.default_rng(2024)
    uniform = DistributionTable(np.full(512, 1 / 512), math.log(512))
    reps = [tv_distance(empirical(rng.integers(512, size=200_000), 512), uniform) for _ in range(20)]
    # normal approximation: 512/2 * sqrt(2/pi) * sqrt(1/(512 n))
    approx = 256 * math.sqrt(2 / math.pi) * math.sqrt(1 / (512 * 200_000))
    assert approx == pytest.approx(0.0202, abs=5e-4)
    assert np.mean(reps) == pytest.approx(approx, rel=0.05)
    # acceptance threshold sits about 1.5x above the null
    assert 0.03 / approx == pytest.approx(1.5, abs=0.05)


def test_chi_square_exact_counts():
    t = DistributionTable(np.array([0.5, 0.25, 0.25]), 0.0)
    stat, dof = chi_square([200, 100, 100], t)
    assert stat == 0.0 and dof == 2


def test_chi_square_pooling():
    t = DistributionTable(np.array([0.97, 0.01, 0.01, 0.01]), 0.0)
    # 100 draws: three bins expect 1 each, pooled into one bin expecting 3, folded into the big bin
    stat, dof = chi_square([97, 1, 1, 1], t)
    assert dof == 0
    t2 = DistributionTable(np.array([0.5, 0.3, 0.1, 0.1]), 0.0)
    stat, dof = chi_square([20, 12, 4, 4], t2)
    assert dof == 2 and stat == pytest.approx(0.0)


def test_chi_square_null_mean(g3):
    exact = enumerate_boltzmann(g3, 0.6)
    rng = np.random.default_rng(7)
    stats = []
    for _ in range(30):
        counts = empirical(rng.choice(512, size=100_000, p=exact.probs), 512)
        stat, dof = chi_square(counts, exact)
        stats.append(stat / dof)
    assert np.mean(stats) == pytest.approx(1.0, abs=0.05)


def test_chi_square_errors():
    t = DistributionTable(np.array([0.5, 0.5]), 0.0)
    with pytest.raises(ValueError):
        chi_square([0, 0], t)
    with pytest.raises(ValueError):
        chi_square([1, 1], DistributionTable(np.array([1.0, 0.0]), 0.0))


def test_chi_square_critical_value():
    # tabulated 99.99% point for 10 degrees of freedom
    assert chi_square_critical(10) == pytest.approx(35.564, abs=1e-3)


@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("beta", [0.0, 0.3, BETA_C, 1.0, 1.5])
def test_es_joint_check(L, beta):
    rep = es_joint_check(build_square_lattice(L), beta)
    assert rep.passed, rep


def test_es_joint_size_guard():
    with pytest.raises(SizeGuardError):
        es_joint_check(build_square_lattice(4), 0.5)


@pytest.mark.parametrize("L", [2, 3, 4])
@pytest.mark.parametrize("beta", [0.4, BETA_C, 1.2])
def test_plus_boundary_is_outer_spin_conditional(L, beta):
    assert plus_conditional_error(L, beta) < 1e-10


@pytest.mark.parametrize("beta", [0.9, 1.2, 2.5])
def test_dual_route_law_is_exact(g3, beta):
    assert tv_distance(dual_route_distribution(3, beta), enumerate_boltzmann(g3, beta)) < 1e-10


@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("bc", ["free", "plus"])
@pytest.mark.parametrize("label", list(BETAS))
def test_fixture_tables(L, bc, label, tmp_path):
    stored = DistributionTable.load(table_path(L, bc, label))
    fresh = enumerate_boltzmann(build_square_lattice(L), BETAS[label], bc)
    np.testing.assert_allclose(stored.probs, fresh.probs, rtol=0, atol=1e-15)
    assert stored.log_Z == pytest.approx(fresh.log_Z, rel=1e-14)
    fresh.save(tmp_path / "t.txt")
    np.testing.assert_array_equal(DistributionTable.load(tmp_path / "t.txt").probs, fresh.probs)
