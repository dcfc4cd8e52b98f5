"""Transport along divisor-avoiding paths and the relations of the
resulting monodromy matrices."""

import cmath

import numpy as np
import pytest

from kzb import monodromy as mon
from kzb.connection import TWO_PI_I, as_numeric, divisor_distance
from kzb.dunkl import build_rep
from kzb.elliptic import ModularPoint
from kzb.liealg import build_quotient
from kzb.rootsys import braid_order, build_root_system

MP = ModularPoint(0.2 + 1.3j)


def orbit_c(rs, val):
    return {i: val for i in range(len(rs.orbit_keys()))}


@pytest.fixture(scope="module")
def b2():
    rs = build_root_system("B2")
    rep = build_rep(rs, c=orbit_c(rs, 0.3))
    return rs, rep, mon.choose_base_point(rs, MP)


@pytest.fixture(scope="module")
def hecke_b2(b2):
    rs, rep, _ = b2
    return mon.hecke_check(rep, MP, tol=1e-8)


# -- the quadratic relation and the braid relations -------------------------


def test_quadratic_relation(hecke_b2):
    assert hecke_b2["max_quadratic"] < 1e-8


def test_braid_relation(hecke_b2):
    assert hecke_b2["max_braid"] < 1e-8


def test_eigenvalue_scalars(hecke_b2, b2):
    rs, rep, _ = b2
    for i in range(rs.rank):
        k = rs.index(rs.simple[i])
        sq = complex(rs.sq(rs.roots[k]))
        want = cmath.exp(-TWO_PI_I * 0.3 / sq)
        got = complex(hecke_b2["t"][i])
        assert abs(got - want) < 1e-12


def test_monodromy_is_unimodular(hecke_b2):
    # eigenvalues are t and -1/t with |t| = 1 for real c
    for S in hecke_b2["monodromy"]:
        assert abs(abs(np.linalg.det(S)) - 1.0) < 1e-8


def test_transport_error_is_reported(hecke_b2):
    assert 0.0 <= hecke_b2["transport_error"] < 1e-8


def test_reverse_detour_gives_inverse_generator(b2):
    """The counterclockwise half turn satisfies the quadratic relation
    with swapped eigenvalues and fails the direct one outright; this
    pins the orientation convention."""
    rs, rep, z0 = b2
    k = rs.index(rs.simple[0])
    path = mon.braid_arc(rs, MP, z0, 0, multiplier=rep.refl_numeric(k),
                         orientation=+1)
    res = mon.transport(mon.matrix_sampler(rep, MP), path, tol=1e-8)
    S = path.multiplier @ res.value
    t = cmath.exp(-TWO_PI_I * 0.3 / complex(rs.sq(rs.roots[k])))
    I = np.eye(rep.nw, dtype=complex)
    assert np.abs((S - t * I) @ (S + I / t)).max() > 1e-2
    assert np.abs((S - I / t) @ (S + t * I)).max() < 1e-8


def test_swapped_factor_order_breaks_braid(b2):
    rs, rep, z0 = b2
    sampler = mon.matrix_sampler(rep, MP)
    S = []
    for i in range(rs.rank):
        k = rs.index(rs.simple[i])
        path = mon.braid_arc(rs, MP, z0, i, multiplier=rep.refl_numeric(k))
        res = mon.transport(sampler, path, tol=1e-8)
        S.append(res.value @ path.multiplier)
    m = braid_order(rs, 0, 1)
    lhs = rhs = np.eye(rep.nw, dtype=complex)
    for a in range(m):
        lhs = lhs @ (S[0] if a % 2 == 0 else S[1])
        rhs = rhs @ (S[1] if a % 2 == 0 else S[0])
    assert np.abs(lhs - rhs).max() > 1e-2


def test_c_zero_monodromy_is_plain_reflection(b2):
    rs, _, z0 = b2
    rep0 = build_rep(rs, c=orbit_c(rs, 0.0))
    k = rs.index(rs.simple[0])
    path = mon.braid_arc(rs, MP, z0, 0, multiplier=rep0.refl_numeric(k))
    res = mon.transport(mon.matrix_sampler(rep0, MP), path, tol=1e-8)
    S = path.multiplier @ res.value
    assert np.abs(S @ S - np.eye(rep0.nw)).max() < 1e-14


# -- transport as an integrator ---------------------------------------------


def test_zero_sampler_transports_identically(b2):
    rs, _, z0 = b2
    zero = lambda z: [np.zeros((3, 3), dtype=complex)] * rs.rank
    res = mon.transport(zero, mon.x_loop(rs, MP, z0, 0), tol=1e-8)
    assert np.abs(res.value - np.eye(3)).max() == 0.0
    assert res.error == 0.0


def test_contractible_loop_is_trivial(b2):
    rs, rep, z0 = b2
    h = 0.08
    square = [z0,
              (z0[0] + h, z0[1]),
              (z0[0] + h, z0[1] + h * 1j),
              (z0[0], z0[1] + h * 1j),
              z0]
    res = mon.transport(mon.matrix_sampler(rep, MP),
                        mon.polyline(rs, MP, square), tol=1e-8)
    assert np.abs(res.value - np.eye(rep.nw)).max() < 1e-10


def test_homotopic_paths_transport_equally(b2):
    rs, rep, z0 = b2
    sampler = mon.matrix_sampler(rep, MP)
    straight = mon.transport(sampler, mon.x_loop(rs, MP, z0, 0), tol=1e-8)
    dogleg = mon.polyline(
        rs, MP,
        [z0, (z0[0] + 0.5 + 0.18j, z0[1] - 0.12), (z0[0] + 1.0, z0[1])],
        closure=("lattice", (1.0, 0.0)))
    bent = mon.transport(sampler, dogleg, tol=1e-8)
    assert np.abs(straight.value - bent.value).max() < 1e-8


def test_tolerance_self_consistency(b2):
    rs, rep, z0 = b2
    sampler = mon.matrix_sampler(rep, MP)
    k = rs.index(rs.simple[0])
    path = mon.braid_arc(rs, MP, z0, 0, multiplier=rep.refl_numeric(k))
    coarse = mon.transport(sampler, path, tol=1e-6)
    fine = mon.transport(sampler, path, tol=1e-8)
    assert np.abs(coarse.value - fine.value).max() < 1e-9
    assert coarse.error < 1e-6
    assert fine.error < 1e-8


def test_flat_guard_rejects_noncommuting_sampler(b2):
    rs, _, z0 = b2
    e01 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    bad = lambda z: [e01, e01.T]
    with pytest.raises(RuntimeError, match="not flat"):
        mon.transport(bad, mon.x_loop(rs, MP, z0, 0), tol=1e-8)


# -- path validation --------------------------------------------------------


def test_standard_loops_validate(b2):
    rs, rep, z0 = b2
    for path in (mon.x_loop(rs, MP, z0, 0),
                 mon.y_loop(rs, MP, z0, 1),
                 mon.t_loop(rs, MP, z0, 0),
                 mon.braid_arc(rs, MP, z0, 1)):
        margin = mon.validate_path(path)
        assert margin >= path.floor


def test_validate_rejects_divisor_crossing(b2):
    rs, _, z0 = b2
    near_wall = (0.001 + 0.001j, z0[1])
    path = mon.polyline(rs, MP, [z0, near_wall, z0])
    with pytest.raises(ValueError, match="divisor"):
        mon.validate_path(path)


def test_validate_rejects_wrong_closure(b2):
    rs, _, z0 = b2
    path = mon.x_loop(rs, MP, z0, 0)
    path.closure = ("lattice", (0.0, 1.0))
    with pytest.raises(ValueError, match="closure"):
        mon.validate_path(path)


@pytest.mark.parametrize("label", ["A2", "B2", "G2"])
def test_base_point_clears_divisors(label):
    rs = build_root_system(label)
    z0 = mon.choose_base_point(rs, MP)
    assert divisor_distance(rs, z0, MP) >= 2e-2
    # every root value sits on one ray, so reflection detours stay clear
    vals = []
    for k in range(rs.num_positive()):
        m = rs.simple_coords(k)
        vals.append(sum(complex(c) * v for c, v in zip(m, z0)))
    args = [cmath.phase(v / vals[0]) for v in vals]
    assert max(abs(a) for a in args) < 1e-12


# -- truncated enveloping target --------------------------------------------


@pytest.fixture(scope="module")
def env_a2():
    rs = build_root_system("A2")
    qa = build_quotient(rs, 3)
    return rs, qa, mon.EnvelopingTruncation(qa)


def test_enveloping_dimensions(env_a2):
    rs, qa, env = env_a2
    assert len(env.gens) == sum(qa.dims.values())
    assert env.dim == 56
    assert env.mdeg[0] == 0 and env.mdeg[-1] == env.N


def test_enveloping_unit_and_associativity(env_a2):
    rs, qa, env = env_a2
    u = env.from_sample_element(as_numeric(qa.x(0)))
    v = env.from_sample_element(as_numeric(qa.y(1)))
    w = env.from_sample_element(as_numeric(qa.t(1)))
    assert np.abs(env.mul(env.unit(), u) - u).max() == 0.0
    assert np.abs(env.mul(u, env.unit()) - u).max() == 0.0
    lhs = env.mul(u, env.mul(v, w))
    rhs = env.mul(env.mul(u, v), w)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_enveloping_exp_log_round_trip(env_a2):
    rs, qa, env = env_a2
    u = env.from_sample_element(as_numeric(qa.x(0)).scale(0.7 + 0.2j))
    u = u + env.from_sample_element(as_numeric(qa.y(1)).scale(-0.4j))
    back = env.log(env.exp(u))
    assert np.abs(back - u).max() < 1e-12
    total = sum(env.graded(back, d) for d in range(env.N + 1))
    assert np.abs(total - back).max() == 0.0


def test_leading_terms_of_transport_logs(env_a2):
    rs, qa, _ = env_a2
    report = mon.leading_term_check(qa, rs, MP, tol=1e-8)
    assert sorted(report["x"]) == ["0", "1"]
    assert sorted(report["t"]) == ["0", "1", "2"]
    assert report["max_residual"] < 1e-6
    assert report["transport_error"] < 1e-8
