import random
from fractions import Fraction

import numpy as np
import pytest

from kzb import connection as conn
from kzb import dunkl
from kzb.elliptic import ModularPoint
from kzb.rootsys import build_root_system

A2 = build_root_system("A2")
B2 = build_root_system("B2")
G2 = build_root_system("G2")

MP = ModularPoint(0.2 + 1.3j)


def numeric_rep(rs, c=0.7, **kw):
    return dunkl.build_rep(rs, c={i: c for i in range(len(rs.orbit_keys()))}, **kw)


def point(rs, seed):
    return conn.sample_torus_point(random.Random(seed), rs, MP)


# -- the exact representation ----------------------------------------------


@pytest.mark.parametrize("rs", [A2, B2, G2], ids=["A2", "B2", "G2"])
def test_defining_relations_exact(rs):
    report = dunkl.verify_rep(rs)
    assert report["ok"]
    assert report["failures"] == []
    # commutators, group structure, equivariance, eigenvalues all ran
    names = report["checked"]
    assert any(n.startswith("yx_") for n in names)
    assert any(n.startswith("braid_") for n in names)
    assert "regular_character" in names
    assert "x_eigenvalues" in names


def test_orbit_lines_are_separated():
    rep = dunkl.build_rep(B2)
    assert len(set(rep.wrho)) == rep.nw
    # the x-eigenvalue tuples distinguish every line
    cols = []
    for widx in range(rep.nw):
        cols.append(tuple(rep.rs.pair(a, rep.wrho[widx]) for a in rep.rs.simple))
    assert len(set(cols)) == rep.nw


def test_stabilized_rho_rejected():
    with pytest.raises(ValueError, match="stabilized"):
        dunkl.build_rep(B2, rho=(1, 1))
    with pytest.raises(ValueError, match="stabilized"):
        dunkl.build_rep(A2, rho=(0, 0, 0))


def test_lattice_coincident_rho_rejected():
    # the plain coweight sum pairs integrally with a B2 coroot
    rep = numeric_rep(B2, rho=(2, 1))
    with pytest.raises(ValueError, match="lattice"):
        dunkl.dunkl_sample_direct(rep, point(B2, 0), MP)


def test_chosen_rho_avoids_theta_zeros():
    for rs in (A2, B2, G2):
        rho = dunkl.choose_rho(rs)
        rep = dunkl.build_rep(rs, rho=rho)
        for row in rep.dw:
            for d in row:
                assert d != 0 and d.denominator != 1
    # scale 1 is unusable for B2, the fallback kicks in
    assert dunkl.choose_rho(B2) == (Fraction(10, 7), Fraction(5, 7))


def test_symbolic_rep_refuses_sampling():
    rep = dunkl.build_rep(B2)
    with pytest.raises(ValueError, match="numeric"):
        dunkl.dunkl_sample_direct(rep, point(B2, 0), MP)


def test_mu_enters_as_diagonal():
    rep = dunkl.build_rep(B2, mu=(Fraction(1, 3), Fraction(1, 5)))
    base = dunkl.build_rep(B2)
    ei = [1, 0]
    with_mu = rep.y_matrix(ei)
    without = base.y_matrix(ei)
    for a in range(rep.nw):
        for b in range(rep.nw):
            if a != b:
                assert with_mu[a][b] == without[a][b]
    lam = rep.rs.from_coweight_coords(ei)
    for a in range(rep.nw):
        diff = dunkl._padd(
            with_mu[a][a], dunkl._pscale(without[a][a], -1)
        )
        assert diff == {rep._zexp: rep.rs.form(rep.wmu[a], lam)}


# -- the matrix connection --------------------------------------------------


def test_routes_agree_and_flat_b2():
    rep = numeric_rep(B2)
    scan = dunkl.connection_scan(rep, MP, count=10, seed=101)
    assert scan["count"] == 10
    assert scan["max_route_diff"] < 1e-10
    assert scan["max_curvature"] < 1e-8


@pytest.mark.parametrize("rs", [A2, G2], ids=["A2", "G2"])
def test_routes_agree_other_types(rs):
    rep = numeric_rep(rs)
    scan = dunkl.connection_scan(rep, MP, count=4, seed=7)
    assert scan["max_route_diff"] < 1e-10
    assert scan["max_curvature"] < 1e-8


@pytest.mark.parametrize("rs", [A2, B2, G2], ids=["A2", "B2", "G2"])
def test_quasi_periodicity(rs):
    rep = numeric_rep(rs)
    assert dunkl.quasi_periodicity(rep, point(rs, 5), MP) < 1e-10


@pytest.mark.parametrize("rs", [A2, B2, G2], ids=["A2", "B2", "G2"])
def test_weyl_equivariance(rs):
    rep = numeric_rep(rs)
    assert dunkl.equivariance_check(rep, point(rs, 6), MP) < 1e-10


def test_opposite_positive_system():
    for rs in (A2, B2, G2):
        rep = numeric_rep(rs)
        assert dunkl.opposite_system_check(rep, point(rs, 8), MP) < 1e-12


def test_c_zero_connection_vanishes():
    rep = numeric_rep(B2, c=0.0)
    z = point(B2, 3)
    direct = dunkl.dunkl_sample_direct(rep, z, MP)
    via = dunkl.dunkl_sample_via_rca(rep, z, MP)
    for a in direct.A + via.A:
        assert float(np.abs(a).max()) == 0.0


def test_mu_star_removes_compensator():
    rep = numeric_rep(G2)
    shifted = numeric_rep(G2, mu=rep.mu_star())
    drift = max(abs(a - b) for a, b in zip(shifted.mu_star(), shifted.mu))
    assert drift < 1e-14
    z = point(G2, 9)
    direct = dunkl.dunkl_sample_direct(shifted, z, MP)
    via = dunkl.dunkl_sample_via_rca(shifted, z, MP)
    assert dunkl.route_difference(direct, via) < 1e-12


def test_multipliers_are_unimodular_diagonals():
    rep = numeric_rep(B2)
    for i in range(rep.n):
        M = rep.multiplier(i)
        assert np.abs(M - np.diag(np.diag(M))).max() == 0.0
        assert np.abs(np.abs(np.diag(M)) - 1.0).max() < 1e-14


def test_divisor_proximity_guard():
    rep = numeric_rep(B2)
    z = (1e-7, 0.4 + 0.3 * MP.tau)
    with pytest.raises(ValueError, match="divisor"):
        dunkl.dunkl_sample_direct(rep, z, MP)
    dunkl.dunkl_sample_direct(rep, z, MP, check_regular=False)


def test_scan_report_is_json_ready():
    import json

    rep = numeric_rep(A2)
    scan = dunkl.connection_scan(rep, MP, count=2, seed=1)
    assert json.loads(json.dumps(scan)) == scan
