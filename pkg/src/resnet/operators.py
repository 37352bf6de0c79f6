"""Pointwise operators and the Dirichlet energy form.

The Laplacian used throughout has the positive-spectrum sign convention,
(Δv)(x) = Σ_{y~x} c_xy (v(x) − v(y)), and the energy form counts every edge
exactly once: E(u, v) = ½ Σ_{x,y} c_xy (u(x) − u(y))(v(x) − v(y)).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .network import GAUGE_RAW, VertexFunction, vsorted


@dataclass(frozen=True)
class EnergyValue:
    """An energy evaluated over an explicit truncation window.

    ``converged`` is True when the value is trusted as a limit: either the
    window covers a finite network, or successive exhaustion stages agreed to
    the stated relative tolerance (see :func:`energy_over_plan`).
    """

    value: float
    window: frozenset
    converged: bool


def laplacian_apply(net, u, x):
    """(Δu)(x); requires u on x and all its neighbors, never zero-extends."""
    ux = u.value(x)
    return sum(c * (ux - u.value(y)) for y, c in net.incident(x))


def transfer_apply(net, u, x):
    """(Tu)(x) = Σ_{y~x} c_xy u(y), so that Δ = c − T pointwise."""
    return sum(c * u.value(y) for y, c in net.incident(x))


def energy(net, u, v=None, window=None):
    """Energy over the induced subgraph on ``window`` (crossing edges excluded).

    Symmetric, bilinear and gauge-independent.  Defaults: v = u, and the
    window is the common support window of u and v.
    """
    if v is None:
        v = u
    if window is None:
        window = u.window if v is u else (u.window & v.window)
    total = 0.0
    for x, y, c in net.edges_within(window):
        total += c * (u.value(x) - u.value(y)) * (v.value(x) - v.value(y))
    converged = net.is_finite and len(window) == len(net.vertices)
    return EnergyValue(value=total, window=frozenset(window), converged=converged)


def energy_over_plan(net, u, v, plan, rel_tol=1e-9):
    """Energy along an exhaustion, flagged converged when the last two stages
    agree to ``rel_tol`` relative."""
    values = [energy(net, u, v, window=stage).value for stage in plan.stages]
    converged = len(values) >= 2 and (
        abs(values[-1] - values[-2]) <= rel_tol * max(1.0, abs(values[-1])))
    return EnergyValue(value=values[-1], window=frozenset(plan.final),
                       converged=converged)


def normal_derivative(net, subset, v, x):
    """∂v(x) for x on the boundary of ``subset``: the Laplacian sum restricted
    to neighbors inside the subset."""
    sub = frozenset(subset)
    if x not in net.boundary_of(sub):
        raise DomainError(f"vertex {x!r} is not on the boundary of the subset")
    vx = v.value(x)
    return sum(c * (vx - v.value(y)) for y, c in net.incident(x) if y in sub)


def contract(u):
    """Pointwise clamp of u to [0, 1]; never increases energy (Markov property)."""
    return VertexFunction({x: min(1.0, max(0.0, val)) for x, val in u.items()},
                          GAUGE_RAW)


def scaled_laplacian_residual(net, u, rhs, window):
    """max over ``window`` of |Δu − rhs| / max(1, c(x)).

    Conductance scaling keeps the check meaningful across the huge dynamic
    ranges of geometric models, where forming c_xy (u(x) − u(y)) already costs
    c_xy·eps of absolute accuracy in floating point.
    """
    worst = 0.0
    for x in vsorted(window):
        r = abs(laplacian_apply(net, u, x) - rhs.get(x, 0.0))
        worst = max(worst, r / max(1.0, net.total_conductance(x)))
    return worst
