"""Transience classification and grounded-energy-space projections.

Three independent lines of evidence:

(a) monopole energies: wired regularized solves of Δw = δ_o have bounded,
    stabilizing energy exactly when a finite-energy monopole exists;
(b) Monte Carlo: the expected visits to the origin stop growing with the
    horizon (Green finiteness) and the escape probability stays positive;
(c) the grounded projection of the constant function 1: its value u_o at the
    origin is positive for transient networks and 0 in the recurrent case.

The grounded inner product is ⟨u, v⟩ = u(o)v(o) + E(u, v).  The projection of
1 off the closure of the finitely supported functions solves Δu = −u_o δ_o
self-consistently; writing u = 1 − β g with g the wired unit monopole at the
origin forces β = 1/(1 + g(o)), and the projection satisfies the parabola
relation u_o = E(u) + u_o², so (u_o, E(u)) lives on a parabola with peak
(1/2, 1/4).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IncompatibleSourceError, ResnetError
from .kernels import energy_kernel, harm_part, monopole
from .network import VertexFunction, doubling_exhaustion, vsorted
from .operators import energy
from .randomwalk import WalkConfig, green_estimate
from .solver import WIRED, solve_poisson

TRANSIENT = "transient"
RECURRENT = "recurrent"
INCONCLUSIVE = "inconclusive"

RECURRENCE_U_O_THRESHOLD = 1e-4
FIXED_POINT_TOL = 1e-8
FIXED_POINT_MAX_ITER = 100
HARM_MASS_THRESHOLD = 1e-4
GRAM_RANK_THRESHOLD = 1e-5


@dataclass(frozen=True)
class GroundedProjection:
    """The projection u of 1 off the grounded finitely-supported subspace.

    ``u_o`` is the limit value u(o) (0 on recurrent networks); ``energy`` is
    E(u) evaluated from the function values, counting the crossing edges on
    which u jumps to its exterior value 1 (the ghost grounding of the stage
    solve identifies everything beyond the window with the point at infinity,
    where u is 1).  The parabola residual |u_o − E(u) − u_o²| then checks the
    defining property of the projection through independent code paths.
    """

    u: VertexFunction
    u_o: float
    energy: float
    converged: bool
    trace: tuple          # (radius, wired_resistance, u_o_estimate)
    meta: dict = field(default_factory=dict)

    @property
    def parabola_residual(self):
        return abs(self.u_o - (self.energy + self.u_o ** 2))


@dataclass(frozen=True)
class TransienceVerdict:
    verdict: str
    criteria: dict
    evidence: dict

    def agreement(self):
        votes = [v for v in self.criteria.values() if v != INCONCLUSIVE]
        return {"votes": dict(self.criteria),
                "unanimous": len(set(votes)) <= 1}

    def to_jsonable(self):
        return {"verdict": self.verdict, "criteria": dict(self.criteria),
                "agreement": self.agreement(), "evidence": self.evidence}


def _default_plan(net, plan):
    return plan if plan is not None else doubling_exhaustion(net)


def _grounded_fixed_point(resistance, tol=FIXED_POINT_TOL,
                          max_iter=FIXED_POINT_MAX_ITER):
    """Solve β = 1 − β·R by damped fixed-point iteration.

    The undamped map diverges for R > 1, so each update is relaxed by
    1/(1 + R); convergence to 1/(1 + R) is then immediate and the iteration
    count mostly documents the self-consistency reading of the equation.
    """
    beta = 0.5
    for _ in range(max_iter):
        correction = 1.0 - beta * (1.0 + resistance)
        beta_next = beta + correction / (1.0 + resistance)
        if abs(beta_next - beta) <= tol * (1.0 + abs(beta_next)):
            return beta_next, True
        beta = beta_next
    return beta, False


def grounded_projection_of_one(net, plan=None):
    """Compute P⊥1 over exhaustion stages via wired unit-monopole solves.

    Each stage solves Δg = δ_o with the complement grounded; the stage
    projection is u = 1 − β g with β the fixed point of β = 1 − β g(o).
    Stabilizing stage resistances give the transient projection; resistances
    that keep growing certify 1 ∈ closure(span δ_x) and the projection is 0.
    """
    plan = _default_plan(net, plan)
    if net.is_finite and len(plan.final) == len(net.vertices):
        # Finite network: 1 is itself finitely supported, so P⊥1 = 0.
        zero = VertexFunction.zero(plan.final)
        return GroundedProjection(u=zero, u_o=0.0, energy=0.0, converged=True,
                                  trace=(), meta={"finite": True})
    trace = []
    g_last, stage_last = None, None
    for stage, radius in zip(plan.stages, plan.radii):
        try:
            g = solve_poisson(net, stage, {net.origin: 1.0}, WIRED).solution
        except IncompatibleSourceError:
            trace.append((radius, float("inf"), 0.0))
            continue
        resistance = g.value(net.origin)
        beta, _ = _grounded_fixed_point(resistance)
        trace.append((radius, resistance, beta))
        g_last, stage_last = g, stage
    if g_last is None:
        raise DomainError("no usable exhaustion stage")
    resistances = [r for _, r, _ in trace]
    betas = [b for _, _, b in trace]
    growing = (len(resistances) >= 3
               and resistances[-1] > 1.5 * resistances[len(resistances) // 2])
    # Stage resistances of a transient network are Cauchy; accept either a
    # tight tail or geometrically decaying increments (trees approach their
    # limit like 2^-radius, far slower than tolerance-level agreement).
    deltas = [abs(b - a) for a, b in zip(resistances, resistances[1:])]
    tight = (len(betas) >= 2
             and abs(betas[-1] - betas[-2]) <= FIXED_POINT_TOL * (1.0 + betas[-1]))
    decaying = (len(deltas) >= 2
                and deltas[-1] <= max(0.6 * deltas[-2],
                                      1e-12 * max(1.0, resistances[-1])))
    converged = tight or decaying
    if converged and not growing:
        beta = betas[-1]
        u = VertexFunction({x: 1.0 - beta * g_last.value(x)
                            for x in vsorted(stage_last)})
        e = energy(net, u, window=stage_last).value
        e += sum(c * (u.value(x) - 1.0) ** 2
                 for x, _, c in net.crossing_edges(stage_last))
        return GroundedProjection(u=u, u_o=beta, energy=e, converged=True,
                                  trace=tuple(trace))
    # Diverging wired resistance: the projection limit is the zero function.
    u_o = 0.0 if growing else betas[-1]
    return GroundedProjection(u=VertexFunction.zero(stage_last), u_o=u_o,
                              energy=0.0, converged=False, trace=tuple(trace),
                              meta={"diverging_resistance": growing,
                                    "last_beta": betas[-1]})


def _criterion_monopole(net, plan):
    try:
        element = monopole(net, net.origin, plan)
    except ResnetError as exc:
        return INCONCLUSIVE, {"error": str(exc)}
    evidence = {"stage_energies": list(element.stage_energies),
                "converged": element.converged, "diverged": element.diverged}
    if element.converged:
        return TRANSIENT, evidence
    if element.diverged:
        return RECURRENT, evidence
    return INCONCLUSIVE, evidence


def _criterion_monte_carlo(net, cfg):
    est = green_estimate(net, net.origin, net.origin, cfg)
    evidence = {"green_mean_visits": est.value, "stderr": est.stderr,
                "half_horizon_mean": est.meta.get("half_horizon_mean"),
                "flags": list(est.flags), "seed": est.seed}
    if "diverging" in est.flags:
        return RECURRENT, evidence
    mid = est.meta.get("half_horizon_mean") or 0.0
    if mid > 0 and est.value <= 1.02 * mid:
        return TRANSIENT, evidence
    return INCONCLUSIVE, evidence


def _criterion_grounded(net, plan):
    proj = grounded_projection_of_one(net, plan)
    evidence = {"u_o": proj.u_o, "energy": proj.energy,
                "converged": proj.converged,
                "parabola_residual": proj.parabola_residual if proj.converged else None,
                "trace": [list(t) for t in proj.trace]}
    if proj.converged:
        if proj.u_o > RECURRENCE_U_O_THRESHOLD:
            return TRANSIENT, evidence
        return RECURRENT, evidence
    if proj.meta.get("diverging_resistance"):
        return RECURRENT, evidence
    return INCONCLUSIVE, evidence


def classify(net, plan=None, walk_cfg=None):
    """Run the three criteria and aggregate their votes.

    Any explicit disagreement (both transient and recurrent votes) yields
    ``inconclusive`` with the full evidence attached; a verdict is never
    forced past contradicting criteria.
    """
    plan = _default_plan(net, plan)
    if walk_cfg is None:
        walk_cfg = WalkConfig(n_walks=4000, max_steps=4000, seed=0)
    criteria, evidence = {}, {}
    criteria["monopole"], evidence["monopole"] = _criterion_monopole(net, plan)
    criteria["monte_carlo"], evidence["monte_carlo"] = _criterion_monte_carlo(net, walk_cfg)
    criteria["grounded"], evidence["grounded"] = _criterion_grounded(net, plan)
    votes = set(criteria.values()) - {INCONCLUSIVE}
    if votes == {TRANSIENT}:
        verdict = TRANSIENT
    elif votes == {RECURRENT}:
        verdict = RECURRENT
    else:
        verdict = INCONCLUSIVE
    return TransienceVerdict(verdict=verdict, criteria=criteria, evidence=evidence)


def _default_probe_vertices(net, count=4):
    """Vertices adjacent to the origin, one per outgoing direction.

    Distance-1 samples keep the harmonic-mass gate sharp: the leakage energy
    of the dipole at x on a recurrent net scales with the distance of x, so
    probing farther out only blurs the threshold.
    """
    picks = [v for v in vsorted(net.ball(1)) if v != net.origin]
    if len(picks) < 2:
        try:
            picks += [v for v in vsorted(net.ball(2)) if net.distance(v) == 2]
        except ResnetError:
            pass
    return tuple(picks[:max(count, 3)])


def harm_dimension_probe(net, plan=None, samples=None):
    """Numerical dimension of span{h_x} for sample base vertices.

    Each h_x must carry real harmonic mass (energy above
    ``HARM_MASS_THRESHOLD`` relative to its dipole element) to enter the Gram
    matrix; the reported dimension is the number of Gram eigenvalues above
    ``GRAM_RANK_THRESHOLD`` relative to the largest.  Per-stage energies are
    exposed so a decaying trend (wired and free limits merging, the recurrent
    signature) is visible in the evidence.
    """
    plan = _default_plan(net, plan)
    if samples is None:
        samples = _default_probe_vertices(net)
    samples = [s for s in samples if s != net.origin]
    if not samples:
        raise DomainError("need at least one non-origin sample vertex")
    kept = []
    detail = {}
    for x in samples:
        hx = harm_part(net, x, plan)
        vx = energy_kernel(net, x, plan)
        e_h = energy(net, hx.approximant, window=plan.final).value
        e_v = max(energy(net, vx.approximant, window=plan.final).value, 1e-300)
        detail[str(x)] = {"harm_energy": e_h, "dipole_energy": e_v,
                          "stage_energies": list(hx.stage_energies)}
        if e_h > HARM_MASS_THRESHOLD * e_v:
            kept.append(hx)
    if not kept:
        return 0, detail
    gram = np.empty((len(kept), len(kept)))
    for i, hi in enumerate(kept):
        for j, hj in enumerate(kept[:i + 1]):
            val = energy(net, hi.approximant, hj.approximant,
                         window=plan.final).value
            gram[i, j] = gram[j, i] = val
    eigvals = np.linalg.eigvalsh(gram)
    top = max(eigvals.max(), 1e-300)
    rank = int((eigvals > GRAM_RANK_THRESHOLD * top).sum())
    return rank, detail


def grounded_parameter_sweep(cs, *, radius=None, family="geom_z"):
    """u_o and E(P⊥1) across conductance bases; resolves where the grounded
    energy peaks.  Returns per-c records and the argmax entry.

    Without an explicit radius each base gets a window deep enough that the
    geometric truncation r^radius sits below 1e-9 (capped at 200, floor 20).
    """
    import math

    from .models import ModelSpec, build
    from .network import doubling_exhaustion as _dx

    records = []
    for c in cs:
        c = float(c)
        if radius is None:
            r_geom = min(1.0 / c, 0.999)
            depth = int(-9.0 * math.log(10.0) / math.log(r_geom)) + 2
            use_radius = max(20, min(200, depth))
        else:
            use_radius = radius
        spec = ModelSpec(family, {"c": c})
        net = build(spec, radius=use_radius)
        proj = grounded_projection_of_one(net, _dx(net))
        records.append({"c": c, "radius": use_radius, "u_o": proj.u_o,
                        "energy": proj.energy, "converged": proj.converged,
                        "parabola_residual": proj.parabola_residual})
    best = max(records, key=lambda rec: rec["energy"])
    return {"records": records, "max_energy_c": best["c"],
            "max_energy": best["energy"], "max_u_o": best["u_o"]}
