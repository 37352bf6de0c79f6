"""Both sides of the discrete Gauss-Green identity along exhaustions.

For a finite stage G of an exhaustion, regrouping the energy sum over edges
inside G gives the exact identity

    E_G(u, v) = Σ_{x in int G} u(x) Δv(x) + Σ_{x in bd G} u(x) ∂v(x),

where ∂v is the normal derivative (the Laplacian sum restricted to neighbors
inside G).  Following the two right-hand sums along the exhaustion separates
the energy into a vertex part and a boundary part; the boundary part tends to
zero for dipole-kernel combinations and for summable cases, converges to a
nonzero limit exactly on transient networks, and can genuinely depend on the
exhaustion for functions outside the monopole domain.  This module measures
all of it rather than assuming any of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, PreconditionError
from .kernels import harm_part
from .network import VertexFunction, vsorted
from .operators import (energy, laplacian_apply, normal_derivative,
                        scaled_laplacian_residual)

LIMIT_TOL = 1e-6          # last-3-stage agreement declares a limit
EXHAUSTION_TOL = 1e-3     # two plans differing more than this are dependent
STAGE_IDENTITY_TOL = 1e-9

VERDICT_IDENTITY = "identity-holds"
VERDICT_BOUNDARY = "boundary-nonvanishing"
VERDICT_DEPENDENT = "exhaustion-dependent"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GaussGreenStage:
    radius: int
    size: int
    energy: float
    vertex_sum: float
    boundary_sum: float
    residual: float


@dataclass(frozen=True)
class GaussGreenReport:
    """Stagewise decomposition of E(u, v) plus limit estimates and a verdict.

    ``boundary_zero_shift`` is the gauge shift t such that replacing u by
    u + t makes the boundary term vanish; it exists whenever Σ Δv is nonzero
    (shifting a representative moves mass between the two sums but never
    changes their total).
    """

    stages: tuple
    lhs_energy: float
    lhs_converged: bool
    vertex_limit: float | None
    boundary_limit: float | None
    verdict: str
    descriptor: str
    boundary_zero_shift: float | None = None
    meta: dict = field(default_factory=dict)

    def to_jsonable(self):
        return {
            "descriptor": self.descriptor,
            "verdict": self.verdict,
            "lhs_energy": self.lhs_energy,
            "lhs_converged": self.lhs_converged,
            "vertex_limit": self.vertex_limit,
            "boundary_limit": self.boundary_limit,
            "boundary_zero_shift": self.boundary_zero_shift,
            "stages": [[s.radius, s.size, s.energy, s.vertex_sum,
                        s.boundary_sum, s.residual] for s in self.stages],
            "meta": dict(self.meta),
        }


@dataclass(frozen=True)
class BoundarySumTrace:
    stages: tuple            # (radius, value) pairs
    limit: float | None
    converged: bool
    alt_stages: tuple = ()
    alt_limit: float | None = None
    exhaustion_dependent: bool | None = None


def _limit_estimate(values, tol=LIMIT_TOL, window=3):
    if len(values) < window:
        return None, False
    tail = values[-window:]
    if max(tail) - min(tail) <= tol:
        return sum(tail) / len(tail), True
    return None, False


def _traces_separated(a, b, gap=EXHAUSTION_TOL, window=3):
    """True when the tails of two stage traces are disjoint by more than
    ``gap``: unambiguous disagreement even before either trace has settled."""
    if len(a) < window or len(b) < window:
        return False
    ta, tb = a[-window:], b[-window:]
    return min(ta) - max(tb) > gap or min(tb) - max(ta) > gap


def _stage_sums(net, u, v, stage, radius):
    interior = net.interior_of(stage)
    boundary = net.boundary_of(stage)
    e = energy(net, u, v, window=stage).value
    vertex = sum(u.value(x) * laplacian_apply(net, v, x) for x in vsorted(interior))
    bdry = sum(u.value(x) * normal_derivative(net, stage, v, x)
               for x in vsorted(boundary))
    return GaussGreenStage(radius=radius, size=len(stage), energy=e,
                           vertex_sum=vertex, boundary_sum=bdry,
                           residual=e - vertex - bdry)


def gauss_green(net, u, v, plan, alt_plan=None, *, limit_tol=LIMIT_TOL):
    """Evaluate energy, vertex sums and boundary sums per exhaustion stage.

    The verdict is ``identity-holds`` when the boundary sums settle at zero,
    ``boundary-nonvanishing`` when they settle elsewhere, and
    ``inconclusive`` when the plan ends before they settle.  Supplying
    ``alt_plan`` additionally compares the two boundary limits and returns
    ``exhaustion-dependent`` when they disagree beyond tolerance.
    """
    stages = tuple(_stage_sums(net, u, v, stage, radius)
                   for stage, radius in zip(plan.stages, plan.radii))
    boundary_values = [s.boundary_sum for s in stages]
    vertex_values = [s.vertex_sum for s in stages]
    boundary_limit, b_conv = _limit_estimate(boundary_values, tol=limit_tol)
    vertex_limit, v_conv = _limit_estimate(vertex_values, tol=limit_tol)
    energies = [s.energy for s in stages]
    lhs, lhs_conv = _limit_estimate(energies, tol=limit_tol)
    lhs = energies[-1] if lhs is None else lhs

    meta = {}
    verdict = VERDICT_INCONCLUSIVE
    if b_conv:
        verdict = VERDICT_IDENTITY if abs(boundary_limit) <= limit_tol \
            else VERDICT_BOUNDARY
    if alt_plan is not None:
        alt = tuple(_stage_sums(net, u, v, stage, radius)
                    for stage, radius in zip(alt_plan.stages, alt_plan.radii))
        alt_values = [s.boundary_sum for s in alt]
        alt_limit, alt_conv = _limit_estimate(alt_values, tol=limit_tol)
        meta["alt_descriptor"] = alt_plan.descriptor
        meta["alt_boundary_limit"] = alt_limit
        if ((b_conv and alt_conv and abs(boundary_limit - alt_limit) > EXHAUSTION_TOL)
                or _traces_separated(boundary_values, alt_values)):
            verdict = VERDICT_DEPENDENT

    # Rate at which a gauge shift of u moves the boundary term: Σ Δv over the
    # final window (equals −Σ ∂v by the edge-pairing identity).
    final = plan.final
    mass = sum(laplacian_apply(net, v, x) for x in vsorted(net.interior_of(final)))
    shift = None
    if boundary_limit is not None and abs(mass) > 1e-8:
        shift = boundary_limit / mass
    return GaussGreenReport(stages=stages, lhs_energy=lhs, lhs_converged=lhs_conv,
                            vertex_limit=vertex_limit, boundary_limit=boundary_limit,
                            verdict=verdict, descriptor=plan.descriptor,
                            boundary_zero_shift=shift, meta=meta)


def boundary_sum(net, u, v, plan, alt_plan=None, *, limit_tol=LIMIT_TOL):
    """Stagewise boundary sums Σ_{bd G_k} u ∂v with a limit estimate.

    With ``alt_plan`` the same sums run along a second exhaustion and the
    trace records whether the two limits disagree beyond tolerance (the
    identity's boundary term is only well defined when they do not).
    """
    def trace(p):
        out = []
        for stage, radius in zip(p.stages, p.radii):
            bd = net.boundary_of(stage)
            val = sum(u.value(x) * normal_derivative(net, stage, v, x)
                      for x in vsorted(bd))
            out.append((radius, val))
        return tuple(out)

    main = trace(plan)
    main_values = [v for _, v in main]
    limit, conv = _limit_estimate(main_values, tol=limit_tol)
    if alt_plan is None:
        return BoundarySumTrace(stages=main, limit=limit, converged=conv)
    alt = trace(alt_plan)
    alt_values = [v for _, v in alt]
    alt_limit, alt_conv = _limit_estimate(alt_values, tol=limit_tol)
    dependent = None
    if conv and alt_conv:
        dependent = abs(limit - alt_limit) > EXHAUSTION_TOL
    if not dependent and _traces_separated(main_values, alt_values):
        dependent = True
    return BoundarySumTrace(stages=main, limit=limit, converged=conv,
                            alt_stages=alt, alt_limit=alt_limit,
                            exhaustion_dependent=dependent)


def harmonic_boundary_representation(net, u, x, plan, *, harmonic_tol=1e-6):
    """Reconstruct u(x) for harmonic u as Σ_bd u ∂h_x + u(o).

    h_x is the harmonic part of the dipole kernel element at x.  Raises
    DomainError when u is not harmonic on the window interior.
    """
    res = scaled_laplacian_residual(net, u, {}, net.interior_of(u.window))
    if res > harmonic_tol:
        raise DomainError(f"function is not harmonic (scaled residual {res:.2e})")
    if x == net.origin:
        return u.value(net.origin)
    hx = harm_part(net, x, plan)
    trace = boundary_sum(net, u, hx.approximant, plan)
    value = trace.limit if trace.limit is not None else trace.stages[-1][1]
    return value + u.value(net.origin)


def balanced_check(net, u, window=None):
    """Σ_x Δu(x) over the interior of u's window.

    Near zero for combinations of dipole-kernel elements (their sources and
    sinks cancel); equal to the total injected charge for monopoles.
    """
    if window is None:
        window = net.interior_of(u.window)
    return sum(laplacian_apply(net, u, x) for x in vsorted(window))


def two_sum_identity_check(net, u, window=None):
    """(lhs, rhs) of ⟨u, Δu⟩_E = Σ_x |Δu(x)|² + |Σ_x Δu(x)|².

    Valid for u in the span of the dipole kernel; both sides are evaluated
    over the interior of u's window (the second rhs term is then the squared
    total of a balanced source, hence ≈ 0 for true kernel combinations).
    """
    if window is None:
        window = net.interior_of(u.window)
    lap = {x: laplacian_apply(net, u, x) for x in vsorted(window)}
    lap_fn = VertexFunction(lap)
    lhs = energy(net, u, lap_fn, window=window).value
    total = sum(lap.values())
    rhs = sum(val * val for val in lap.values()) + total * total
    return lhs, rhs


def ell2_converse_check(net, u, v, window=None, *, tail_tol=1e-6):
    """Residual |E(u, v) − Σ u Δv| in the summable-square regime.

    Requires u, v, Δu and Δv to be square-summable with negligible tails on
    the window: the outer half of the window must carry less than
    ``tail_tol`` of squared mass, else PreconditionError.  Certifies the
    no-boundary-term case.
    """
    if window is None:
        window = net.interior_of(u.window & v.window)
    window = frozenset(window)
    radius = max(net.distance(x) for x in window)
    inner = {x for x in window if net.distance(x) <= radius // 2}
    tail_vertices = vsorted(window - inner)
    tail = 0.0
    for x in tail_vertices:
        du, dv = laplacian_apply(net, u, x), laplacian_apply(net, v, x)
        tail += u.value(x) ** 2 + v.value(x) ** 2 + du * du + dv * dv
    if tail > tail_tol:
        raise PreconditionError(
            f"outer-window squared mass {tail:.3e} exceeds {tail_tol:.1e}; "
            "functions are not summable-square on this window")
    lhs = energy(net, u, v, window=window).value
    rhs = sum(u.value(x) * laplacian_apply(net, v, x) for x in vsorted(window))
    return abs(lhs - rhs)
