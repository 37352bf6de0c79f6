import math

import pytest

import resnet as rn
from resnet.errors import (ConfigurationError, DomainError,
                           UnsupportedModelError)
from resnet.models import (ModelSpec, build, harmonic_energy,
                           log_increment_function, oracle_h,
                           oracle_h_function, oracle_residuals, oracle_v,
                           oracle_v_function, oracle_w_o, oracle_w_o_function)
from resnet.operators import energy

# Dynamic-range limits of float64: radius where c^R * eps stays far below
# the 1e-10 solver gate.
ORACLE_RADII = {1.5: 36, 2.0: 30, 3.0: 12}


def test_geometric_edge_conductances():
    net = build(ModelSpec("geom_z", {"c": 2.0}), radius=5)
    assert net.conductance(1, 2) == 4.0
    assert net.conductance(-1, 0) == 2.0
    assert net.conductance(0, 1) == 2.0


def test_unit_line_edges():
    net = build(ModelSpec("unit_line"), radius=5)
    assert all(c == 1.0 for x in net.vertices for _, c in net.incident(x))


def test_star_is_glued_half_lines():
    net = build(ModelSpec("star", {"c": 2.0, "arms": 3}), radius=4)
    assert net.origin == (0, 0)
    assert set(net.neighbors((0, 0))) == {(0, 1), (1, 1), (2, 1)}
    assert net.conductance((1, 1), (1, 2)) == 4.0


def test_binary_tree_shape():
    net = build(ModelSpec("binary_tree"), radius=4)
    assert set(net.neighbors((0, 0))) == {(0, 1), (1, 1)}
    assert set(net.neighbors((1, 1))) == {(0, 0), (2, 2), (3, 2)}


def test_family_validation():
    with pytest.raises(UnsupportedModelError):
        ModelSpec("moebius_strip")
    with pytest.raises(ConfigurationError):
        ModelSpec("geom_z", {"c": -1.0})
    with pytest.raises(ConfigurationError):
        ModelSpec("star", {"arms": 0})


@pytest.mark.parametrize("family", ["geom_z", "geom_zplus"])
@pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
def test_oracles_satisfy_their_defining_equations(family, c):
    spec = ModelSpec(family, {"c": c})
    residuals = oracle_residuals(spec, radius=ORACLE_RADII[c])
    for name, res in residuals.items():
        assert res < 1e-10, (name, res)


def test_oracle_values_at_c2():
    spec = ModelSpec("geom_z", {"c": 2.0})
    assert oracle_v(spec, 2, 1) == pytest.approx(0.5)
    assert oracle_v(spec, 2, 2) == pytest.approx(0.75)
    assert oracle_v(spec, 2, 9) == pytest.approx(0.75)   # constant past the pole
    assert oracle_v(spec, 2, -4) == 0.0
    assert oracle_w_o(spec, 0) == pytest.approx(0.5)
    assert oracle_w_o(spec, 1) == pytest.approx(0.25)
    assert oracle_h(spec, 1) == pytest.approx(0.5)
    assert oracle_h(spec, -1) == pytest.approx(-0.5)
    assert oracle_h(spec, 0) == 0.0
    assert harmonic_energy(spec) == pytest.approx(2.0)


def test_zplus_oracle_amplitude():
    spec = ModelSpec("geom_zplus", {"c": 2.0})
    assert oracle_w_o(spec, 0) == pytest.approx(1.0)
    assert oracle_w_o(spec, 3) == pytest.approx(0.125)
    assert oracle_h(spec, 4) == 0.0
    with pytest.raises(DomainError):
        oracle_w_o(spec, -1)


def test_oracle_warns_in_recurrent_regime():
    spec = ModelSpec("geom_z", {"c": 1.0})
    with pytest.warns(UserWarning):
        oracle_v(spec, 1, 1)


def test_oracle_rejects_other_families():
    with pytest.raises(UnsupportedModelError):
        oracle_v(ModelSpec("unit_line"), 1, 1)


@pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
def test_computed_kernels_match_oracles(c):
    spec = ModelSpec("geom_z", {"c": c})
    radius = ORACLE_RADII[c]
    net = build(spec, radius=radius + 2)
    plan = rn.make_exhaustion(net, range(1, radius + 1))
    v2 = rn.energy_kernel(net, 2, plan)
    assert v2.converged
    probes = [-radius + 1, -3, -1, 0, 1, 2, 3, 7, radius - 1]
    for k in probes:
        assert v2.approximant.value(k) == pytest.approx(
            oracle_v(spec, 2, k), abs=1e-5)
    w = rn.monopole(net, 0, plan)
    assert w.converged
    for k in (-3, 0, 2, 5):
        assert w.approximant.value(k) == pytest.approx(
            oracle_w_o(spec, k), abs=1e-5)


@pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
def test_computed_harmonic_part_is_scaled_oracle(c):
    spec = ModelSpec("geom_z", {"c": c})
    radius = ORACLE_RADII[c]
    net = build(spec, radius=radius + 2)
    plan = rn.make_exhaustion(net, range(1, radius + 1))
    h2 = rn.harm_part(net, 2, plan)
    # projection of the dipole kernel spans the 1-dim harmonic space:
    # h_2 = (h(2)/E(h)) h in the origin-zero gauge
    scale = oracle_h(spec, 2) / harmonic_energy(spec)
    for k in (-5, -1, 1, 3, 8):
        assert h2.approximant.value(k) == pytest.approx(
            scale * oracle_h(spec, k), abs=1e-5)


def test_log_increment_values():
    u = log_increment_function(2 ** 5)
    assert u.value(0) == 0.0
    assert u.value(1) == 1.0
    assert u.value(2) == 2.0          # n = 2^1 contributes 1/1
    assert u.value(3) == pytest.approx(2.0 + 1.0 / 3.0)
    assert u.value(4) == pytest.approx(u.value(3) + 0.5)   # n = 2^2
    assert u.value(5) == pytest.approx(u.value(4) + 0.2)


def test_log_increment_energy_bound():
    radius = 2 ** 14
    net = build(ModelSpec("log_increment_line"), radius=radius)
    u = log_increment_function(radius)
    e = energy(net, u, window=net.ball(radius)).value
    assert e < math.pi ** 2 / 6.0 * 2.0
    assert e > 1.0


def test_log_increment_needs_radius():
    with pytest.raises(ConfigurationError):
        log_increment_function(1)


def test_oracle_functions_carry_gauges(geom2_spec):
    assert oracle_v_function(geom2_spec, 2, 10).gauge == "origin-zero"
    assert oracle_w_o_function(geom2_spec, 10).gauge == "vanish-at-infinity"
    h1 = oracle_h_function(geom2_spec, 20, unit_energy=True)
    net = build(geom2_spec, radius=20)
    assert energy(net, h1, window=net.ball(20)).value == pytest.approx(1.0, abs=1e-5)
