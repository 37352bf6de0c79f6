"""Built-in network families with closed-form oracles.

Families
--------
``geom_z``              integers, edge (n-1, n) has conductance c^max(|n|,|n-1|)
``geom_zplus``          nonnegative integers with the same conductances
``star``                m copies of geom_zplus glued at a common origin
``unit_line``           integers with unit conductances
``binary_tree``         rooted binary tree, unit conductances
``log_increment_line``  nonnegative integers, unit conductances (carrier of the
                        exhaustion-dependence test function)

Oracles for the geometric families (r = 1/c):

* dipole kernel    v_n(k) = sum_{j=1..min(|k|,|n|)} r^j on the side of n,
                   0 on the other side, constant past n; solves
                   Δv_n = δ_n − δ_0 with v_n(0) = 0.
* monopole         w_o(n) = a r^|n| with a = r/(2(1−r)) on geom_z and
                   a = r/(1−r) on geom_zplus; solves Δw_o = δ_0 and
                   E(w_o) = a.
* harmonic         h(n) = sgn(n)(1 − r^|n|) on geom_z (Δh ≡ 0, asymptotes
                   ±1, E(h) = 2(1−r)/r); the zero function on geom_zplus.

Every oracle is validated against its defining pointwise equation by
:func:`oracle_residuals`; a formula that failed that check would be
quarantined rather than shipped.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

from .errors import ConfigurationError, DomainError, UnsupportedModelError
from .network import GAUGE_ORIGIN, GAUGE_VANISH, Network, VertexFunction

FAMILIES = ("geom_z", "geom_zplus", "star", "unit_line", "binary_tree",
            "log_increment_line")

_GEOMETRIC = ("geom_z", "geom_zplus", "star")


@dataclass(frozen=True)
class ModelSpec:
    """A built-in family plus its parameters.

    Parameters: ``c`` (conductance base, geometric families), ``arms``
    (star arm count), ``radius`` (default window radius).
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedModelError(
                f"unknown model family {self.family!r}; choose from {FAMILIES}")
        if self.family in _GEOMETRIC:
            c = float(self.params.get("c", 2.0))
            if c <= 0.0:
                raise ConfigurationError("conductance base c must be positive")
        if self.family == "star":
            arms = int(self.params.get("arms", 3))
            if arms < 1:
                raise ConfigurationError("a star needs at least one arm")

    @property
    def c(self):
        return float(self.params.get("c", 2.0))

    @property
    def r(self):
        return 1.0 / self.c

    @property
    def arms(self):
        return int(self.params.get("arms", 3))

    @property
    def radius(self):
        return int(self.params.get("radius", 30))


def _geom_edge(c, a, b):
    """Conductance of the integer edge {a, b} = c^max(|a|, |b|)."""
    return c ** max(abs(a), abs(b))


def _generator(spec):
    c = spec.c if spec.family in _GEOMETRIC else 1.0
    if spec.family in ("geom_z", "unit_line"):
        def nbrs(n):
            return ((n - 1, _geom_edge(c, n - 1, n)), (n + 1, _geom_edge(c, n, n + 1)))
        return 0, nbrs
    if spec.family in ("geom_zplus", "log_increment_line"):
        def nbrs(n):
            out = []
            if n > 0:
                out.append((n - 1, _geom_edge(c, n - 1, n)))
            out.append((n + 1, _geom_edge(c, n, n + 1)))
            return out
        return 0, nbrs
    if spec.family == "star":
        m = spec.arms

        def nbrs(v):
            b, d = v
            if d == 0:
                return [((arm, 1), c) for arm in range(m)]
            out = [((b, d - 1) if d > 1 else (0, 0), c ** d)]
            out.append(((b, d + 1), c ** (d + 1)))
            return out
        return (0, 0), nbrs
    if spec.family == "binary_tree":
        # Vertex (k, d) is the k-th node at depth d; children (2k, d+1), (2k+1, d+1).
        def nbrs(v):
            k, d = v
            out = [((2 * k, d + 1), 1.0), ((2 * k + 1, d + 1), 1.0)]
            if d > 0:
                out.append(((k // 2, d - 1), 1.0))
            return out
        return (0, 0), nbrs
    raise UnsupportedModelError(spec.family)


def build(spec, radius=None):
    """Materialize a generator-backed network for the given model family."""
    if radius is None:
        radius = spec.radius
    origin, nbrs = _generator(spec)
    model = {"model": spec.family, "params": dict(spec.params), "radius": int(radius)}
    model["params"].pop("radius", None)
    return Network.from_generator(origin, nbrs, radius, model=model)


def spec_of(net):
    """Recover the ModelSpec of a model-built network, or None."""
    if net.model is None:
        return None
    return ModelSpec(net.model["model"], dict(net.model.get("params", {})))


def _require_geometric(spec, op):
    if spec.family not in ("geom_z", "geom_zplus"):
        raise UnsupportedModelError(f"{op} oracle only covers geom_z/geom_zplus, "
                                    f"not {spec.family!r}")
    if spec.c <= 1.0:
        warnings.warn(f"{op} oracle assumes c > 1 (transient regime); got c={spec.c:g}",
                      stacklevel=3)


def oracle_v(spec, n, k):
    """Closed-form dipole kernel value v_n(k) on the geometric integer models."""
    _require_geometric(spec, "dipole kernel")
    n, k = int(n), int(k)
    if spec.family == "geom_zplus" and (n < 0 or k < 0):
        raise DomainError("geom_zplus vertices are nonnegative")
    if n == 0:
        return 0.0
    if k == 0 or (k > 0) != (n > 0):
        return 0.0
    r = spec.r
    m = min(abs(k), abs(n))
    if r == 1.0:
        return float(m)
    return (r - r ** (m + 1)) / (1.0 - r)


def oracle_w_o(spec, n):
    """Closed-form origin monopole value w_o(n) = a r^|n|."""
    _require_geometric(spec, "monopole")
    if spec.c <= 1.0:
        raise DomainError("no finite-energy monopole exists for c <= 1")
    r = spec.r
    if spec.family == "geom_z":
        a = r / (2.0 * (1.0 - r))
    else:
        if int(n) < 0:
            raise DomainError("geom_zplus vertices are nonnegative")
        a = r / (1.0 - r)
    return a * r ** abs(int(n))


def oracle_h(spec, n):
    """Closed-form finite-energy harmonic value h(n) = sgn(n)(1 − r^|n|).

    geom_zplus supports no nonconstant finite-energy harmonic function, so
    its oracle is identically zero.
    """
    _require_geometric(spec, "harmonic")
    n = int(n)
    if spec.family == "geom_zplus":
        if n < 0:
            raise DomainError("geom_zplus vertices are nonnegative")
        return 0.0
    if n == 0:
        return 0.0
    sign = 1.0 if n > 0 else -1.0
    return sign * (1.0 - spec.r ** abs(n))


def harmonic_energy(spec):
    """E(h) for the geom_z harmonic oracle: 2(1−r)/r."""
    _require_geometric(spec, "harmonic")
    if spec.family != "geom_z":
        return 0.0
    r = spec.r
    return 2.0 * (1.0 - r) / r


def oracle_v_function(spec, n, radius):
    window = range(-radius, radius + 1) if spec.family == "geom_z" else range(radius + 1)
    return VertexFunction({k: oracle_v(spec, n, k) for k in window}, GAUGE_ORIGIN)


def oracle_w_o_function(spec, radius):
    window = range(-radius, radius + 1) if spec.family == "geom_z" else range(radius + 1)
    return VertexFunction({k: oracle_w_o(spec, k) for k in window}, GAUGE_VANISH)


def oracle_h_function(spec, radius, *, unit_energy=False):
    """The harmonic oracle on a symmetric window, optionally scaled to E(h) = 1.

    For a harmonic function the whole energy arrives through the boundary
    term, so the unit-energy representative is the one whose boundary sum
    over symmetric exhaustions converges to exactly 1.
    """
    window = range(-radius, radius + 1)
    values = {k: oracle_h(spec, k) for k in window}
    if unit_energy:
        e = harmonic_energy(spec)
        if e <= 0.0:
            raise UnsupportedModelError("no nonconstant harmonic function to normalize")
        s = e ** -0.5
        values = {k: s * v for k, v in values.items()}
    return VertexFunction(values, GAUGE_ORIGIN)


def _is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def log_increment_function(radius):
    """The unbounded finite-energy test function on the unit half-line.

    u(0) = 0 and u(n) − u(n−1) is 1/k when n = 2^k, else 1/n.  The n = 1
    increment (formally 1/0, since 1 = 2^0) is taken to be 1; this keeps the
    asymptotics of the construction and is the only sensible reading.
    """
    if radius < 2:
        raise ConfigurationError("log-increment window needs radius >= 2")
    values = {0: 0.0}
    total = 0.0
    for n in range(1, radius + 1):
        if n == 1:
            inc = 1.0
        elif _is_power_of_two(n):
            inc = 1.0 / (n.bit_length() - 1)
        else:
            inc = 1.0 / n
        total += inc
        values[n] = total
    return VertexFunction(values, GAUGE_ORIGIN)


def oracle_residuals(spec, radius=30):
    """Scaled pointwise residuals of each oracle against its defining equation.

    Returns a dict with the worst |Δ(oracle) − expected| / max(1, c(x)) over
    the interior of the given window, for the dipole (n = 2), monopole and
    harmonic oracles.  Values should sit at float rounding level; anything
    larger would mean the closed form fails its own equation and must not be
    used as a reference.
    """
    from .operators import scaled_laplacian_residual

    net = build(spec, radius=radius)
    interior = net.interior_of(net.ball(radius))
    out = {}
    n0 = 2 if radius >= 3 else 1
    v = oracle_v_function(spec, n0, radius)
    out["dipole"] = scaled_laplacian_residual(net, v, {n0: 1.0, 0: -1.0}, interior)
    w = oracle_w_o_function(spec, radius)
    out["monopole"] = scaled_laplacian_residual(net, w, {0: 1.0}, interior)
    if spec.family == "geom_z":
        h = oracle_h_function(spec, radius)
        out["harmonic"] = scaled_laplacian_residual(net, h, {}, interior)
    return out


# -- JSON interchange -------------------------------------------------------


def _vertex_to_json(v):
    return list(v) if isinstance(v, tuple) else v


def _vertex_from_json(v):
    return tuple(v) if isinstance(v, list) else v


def network_to_jsonable(net):
    """Canonical JSON-ready dict for a network (model form when available)."""
    if net.model is not None:
        return {"model": net.model["model"],
                "params": dict(net.model.get("params", {})),
                "radius": int(net.model["radius"])}
    edges = [{"u": _vertex_to_json(x), "v": _vertex_to_json(y), "c": c}
             for x, y, c in net.edges_within(net.vertices)]
    return {"origin": _vertex_to_json(net.origin),
            "vertices": [_vertex_to_json(v) for v in net.vertices],
            "edges": edges}


def network_from_jsonable(obj, radius=None):
    """Load a network from either JSON form (explicit edges, or model spec)."""
    if "model" in obj:
        spec = ModelSpec(obj["model"], dict(obj.get("params", {})))
        return build(spec, radius=radius if radius is not None else obj.get("radius"))
    try:
        origin = _vertex_from_json(obj["origin"])
        edges = [(_vertex_from_json(e["u"]), _vertex_from_json(e["v"]), float(e["c"]))
                 for e in obj["edges"]]
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed network JSON: {exc}") from exc
    net = Network.from_edges(origin, edges)
    declared = {_vertex_from_json(v) for v in obj.get("vertices", [])}
    if declared and declared != set(net.vertices):
        raise ConfigurationError("declared vertex list disagrees with the edges")
    return net


def load_network(text_or_obj, radius=None):
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    return network_from_jsonable(obj, radius=radius)
