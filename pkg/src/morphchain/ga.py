"""Genetic search over element sequences, with element-count escalation.

Chromosomes are fixed-length strings over the seven element kinds. The
half-chain is scored against the ideal anchors, with additive penalties
for self-collision during activation and for failing to form a complete
knot. The outer loop grows the element count until the best design is
feasible and matches the target well enough.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .collision import CollisionConfig, completeness_batch, sweep_collides_batch
from .fitness import FitnessWeights
from .kinematics import (
    ActivationProfile,
    ElementKind,
    Sequence,
    forward_kinematics_batch,
    reflect_nodes_batch,
)
from .target import AnchorSet, IdealCurve, arc_matched_midpoint_node, ideal_anchors, ideal_point

N_KINDS = len(ElementKind)


@dataclass(frozen=True)
class GASettings:
    population: int = 200
    generations: int = 300
    tournament_k: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1/N per gene
    elitism: int = 2
    seed: int = 1
    collision_penalty: float = 1e3
    incompleteness_penalty: float = 1e2

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament_k < 1:
            raise ValueError("tournament_k must be >= 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must lie in [0, population)")
        if self.collision_penalty < 0 or self.incompleteness_penalty < 0:
            raise ValueError("penalties must be nonnegative")


@dataclass(frozen=True)
class SynthesisContext:
    """Everything a candidate evaluation needs besides the chromosome.

    By default the trial chain is compared against the ideal anchors
    expressed relative to the curve root (the chain root is the knot base),
    and the trial midpoint node is the arc-matched one. ``target`` overrides
    the anchors entirely, for searches toward arbitrary goals.
    """

    profile: ActivationProfile = ActivationProfile()
    curve: IdealCurve = IdealCurve()
    weights: FitnessWeights = FitnessWeights()
    collision: CollisionConfig = CollisionConfig()
    target: AnchorSet | None = None
    midpoint_node: int | None = None  # None -> arc-matched default
    align_root: bool = True
    check_collision: bool = True
    check_completeness: bool = True
    n_threads: int = 1

    def resolved_target(self, n_elements: int) -> AnchorSet:
        if self.target is not None:
            return self.target
        anchors = ideal_anchors(self.curve, _active_count(n_elements))
        if not self.align_root:
            return anchors
        root = ideal_point(self.curve, 0.0)
        return AnchorSet(
            midpoint=anchors.midpoint - root,
            tip=anchors.tip - root,
            tip_phi=anchors.tip_phi,
            tip_theta=anchors.tip_theta,
        )

    def resolved_midpoint_node(self, n_elements: int) -> int:
        if self.midpoint_node is not None:
            if not 0 <= self.midpoint_node <= n_elements:
                raise ValueError("midpoint_node out of range for this chain")
            return self.midpoint_node
        return arc_matched_midpoint_node(self.curve, n_elements)


def _active_count(n_elements: int) -> int:
    """Even active-element count used by the midpoint-anchor formula,
    assuming one neutral element when the chain length is odd."""
    return n_elements if n_elements % 2 == 0 else n_elements - 1


@dataclass
class Evaluation:
    """Per-candidate scores for one population."""

    fitness: np.ndarray
    objective_y: np.ndarray
    p_error: np.ndarray
    q_error: np.ndarray
    collided: np.ndarray
    complete: np.ndarray


def _evaluate_genes(
    genes: np.ndarray, ctx: SynthesisContext, settings: GASettings
) -> Evaluation:
    n = genes.shape[1]
    target = ctx.resolved_target(n)
    midnode = ctx.resolved_midpoint_node(n)
    w = ctx.weights

    nodes, R = forward_kinematics_batch(genes, ctx.profile, 1.0)
    tips = nodes[:, -1]
    mids = nodes[:, midnode]
    d = R[:, :, 0]
    phi = np.arctan2(d[:, 1], d[:, 0])
    theta = np.arccos(np.clip(d[:, 2] / np.linalg.norm(d, axis=1), -1.0, 1.0))

    t1 = np.sum((tips - target.tip) ** 2, axis=1)
    t2 = w.w_m * np.sum((mids - target.midpoint) ** 2, axis=1)
    p_error = np.sqrt(t1 + t2)
    # elementwise form of fitness.wrap_angle
    dphi = -((-(target.tip_phi - phi) + np.pi) % (2.0 * np.pi) - np.pi)
    q_error = np.sqrt(dphi**2 + (target.tip_theta - theta) ** 2)
    y = w.c0 * p_error + w.c1 * q_error

    if ctx.check_collision:
        collided = sweep_collides_batch(genes, ctx.profile, ctx.collision)
    else:
        collided = np.zeros(len(genes), dtype=bool)
    if not ctx.check_completeness:
        complete = np.ones(len(genes), dtype=bool)
    elif n < 3:
        # too short for the loop-piercing test to be defined; never a knot
        complete = np.zeros(len(genes), dtype=bool)
    else:
        complete = completeness_batch(reflect_nodes_batch(nodes))

    fitness = (
        y
        + settings.collision_penalty * collided
        + settings.incompleteness_penalty * ~complete
    )
    return Evaluation(fitness, y, p_error, q_error, collided, complete)


def evaluate_population(
    genes: np.ndarray, ctx: SynthesisContext, settings: GASettings
) -> Evaluation:
    """Evaluate all candidates; results are independent of thread count."""
    if ctx.n_threads <= 1 or len(genes) < 2 * ctx.n_threads:
        return _evaluate_genes(genes, ctx, settings)
    chunks = np.array_split(genes, ctx.n_threads)
    with ThreadPoolExecutor(max_workers=ctx.n_threads) as pool:
        parts = list(pool.map(lambda c: _evaluate_genes(c, ctx, settings), chunks))
    return Evaluation(
        *(np.concatenate([getattr(p, f) for p in parts]) for f in
          ("fitness", "objective_y", "p_error", "q_error", "collided", "complete"))
    )


def evaluate_candidate(
    seq: Sequence, ctx: SynthesisContext, settings: GASettings = GASettings()
) -> float:
    """Penalized fitness of one sequence (lower is better)."""
    genes = np.array([[int(e) for e in seq.elements]])
    return float(_evaluate_genes(genes, ctx, settings).fitness[0])


@dataclass
class GARun:
    sequence: Sequence
    fitness: float
    objective_y: float
    p_error: float
    q_error: float
    collision_free: bool
    complete: bool
    generations: int
    history: list[tuple[int, float, float]] = field(default_factory=list)


def run_ga(n_elements: int, settings: GASettings, ctx: SynthesisContext) -> GARun:
    """Generation-synchronous GA over fixed-length chromosomes.

    Uniform random init, tournament selection, one-point crossover,
    per-gene uniform-resample mutation, elitism. All randomness comes from
    one stream seeded by (settings.seed, n_elements), so results are
    reproducible and independent of evaluation threading.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    pop, n = settings.population, n_elements
    mut = settings.mutation_rate if settings.mutation_rate is not None else 1.0 / n
    rng = np.random.default_rng([settings.seed, n_elements])

    genes = rng.integers(0, N_KINDS, size=(pop, n), dtype=np.int64)
    ev = evaluate_population(genes, ctx, settings)
    history = [(0, float(ev.fitness.min()), float(ev.fitness.mean()))]

    for gen in range(1, settings.generations + 1):
        order = np.argsort(ev.fitness, kind="stable")
        elites = genes[order[: settings.elitism]].copy()
        n_children = pop - settings.elitism

        entrants = rng.integers(0, pop, size=(2 * n_children, settings.tournament_k))
        winners = entrants[
            np.arange(2 * n_children), np.argmin(ev.fitness[entrants], axis=1)
        ]
        parents = genes[winners]
        pa, pb = parents[0::2], parents[1::2]

        children = pa.copy()
        do_cross = rng.random(n_children) < settings.crossover_rate
        if n > 1:
            cut = rng.integers(1, n, size=n_children)
            tail = (np.arange(n)[None, :] >= cut[:, None]) & do_cross[:, None]
            children[tail] = pb[tail]

        mutate = rng.random((n_children, n)) < mut
        children[mutate] = rng.integers(0, N_KINDS, size=int(mutate.sum()))

        genes = np.concatenate([elites, children], axis=0)
        ev = evaluate_population(genes, ctx, settings)
        history.append((gen, float(ev.fitness.min()), float(ev.fitness.mean())))

    best = int(np.argmin(ev.fitness))
    return GARun(
        sequence=Sequence(tuple(ElementKind(int(g)) for g in genes[best])),
        fitness=float(ev.fitness[best]),
        objective_y=float(ev.objective_y[best]),
        p_error=float(ev.p_error[best]),
        q_error=float(ev.q_error[best]),
        collision_free=not bool(ev.collided[best]),
        complete=bool(ev.complete[best]),
        generations=settings.generations,
        history=history,
    )


@dataclass
class SynthesisResult:
    sequence: Sequence
    n_elements: int
    objective_y: float
    p_error: float
    q_error: float
    complete: bool
    collision_free: bool
    generations_used: int
    success: bool
    baseline_y: float
    history: list[tuple[int, int, float, float]]  # (n, generation, best, mean)

    def __post_init__(self):
        if self.success and not (self.complete and self.collision_free):
            raise ValueError("a successful result must be complete and collision-free")

    def to_dict(self) -> dict:
        return {
            "sequence": list(self.sequence.letters),
            "n_elements": self.n_elements,
            "objective_y": self.objective_y,
            "p_error": self.p_error,
            "q_error": self.q_error,
            "complete": self.complete,
            "collision_free": self.collision_free,
            "generations_used": self.generations_used,
            "success": self.success,
            "baseline_y": self.baseline_y,
        }


def straight_chain_objective(n_elements: int, ctx: SynthesisContext) -> float:
    """Objective of the undeformed (all-neutral) chain: the search baseline."""
    genes = np.zeros((1, n_elements), dtype=np.int64)
    quiet = replace(ctx, check_collision=False, check_completeness=False)
    return float(_evaluate_genes(genes, quiet, GASettings()).objective_y[0])


def synthesize(
    settings: GASettings,
    start_n: int = 10,
    max_n: int = 20,
    ctx: SynthesisContext = SynthesisContext(),
    quality_ratio: float | None = 0.1,
) -> SynthesisResult:
    """Escalate the element count until a satisfactory design appears.

    A run terminates the escalation when its best design is complete,
    collision-free, and (when ``quality_ratio`` is set) scores no worse
    than quality_ratio times the straight-chain baseline objective at the
    same element count. Without the quality gate, minimal feasible chains
    can stop the escalation long before they resemble the target. If no
    element count up to max_n qualifies, the best attempt at max_n is
    returned with ``success=False``.
    """
    if start_n > max_n:
        raise ValueError("start_n must not exceed max_n")
    history: list[tuple[int, int, float, float]] = []
    last = None
    for n in range(start_n, max_n + 1):
        run = run_ga(n, settings, ctx)
        history.extend((n, g, b, m) for g, b, m in run.history)
        baseline = straight_chain_objective(n, ctx)
        feasible = run.complete and run.collision_free
        good = quality_ratio is None or run.objective_y <= quality_ratio * baseline
        last = (run, n, baseline)
        if feasible and good:
            return SynthesisResult(
                sequence=run.sequence,
                n_elements=n,
                objective_y=run.objective_y,
                p_error=run.p_error,
                q_error=run.q_error,
                complete=run.complete,
                collision_free=run.collision_free,
                generations_used=run.generations,
                success=True,
                baseline_y=baseline,
                history=history,
            )
    run, n, baseline = last
    return SynthesisResult(
        sequence=run.sequence,
        n_elements=n,
        objective_y=run.objective_y,
        p_error=run.p_error,
        q_error=run.q_error,
        complete=run.complete,
        collision_free=run.collision_free,
        generations_used=run.generations,
        success=False,
        baseline_y=baseline,
        history=history,
    )
