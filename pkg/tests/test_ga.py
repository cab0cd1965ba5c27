import dataclasses
from itertools import product

import numpy as np
import pytest

from morphchain.fitness import trial_anchors
from morphchain.ga import (
    GASettings,
    SynthesisContext,
    _evaluate_genes,
    evaluate_candidate,
    run_ga,
    straight_chain_objective,
    synthesize,
)
from morphchain.kinematics import ActivationProfile, ElementKind, Sequence, forward_kinematics
from morphchain.target import AnchorSet

PROFILE = ActivationProfile()


def anchors_of(letters: str, midpoint_node: int) -> AnchorSet:
    seq = Sequence.from_letters(letters)
    traj, pose = forward_kinematics(seq, PROFILE, 1.0)
    ta = trial_anchors(traj, pose, midpoint_node=midpoint_node)
    return AnchorSet(
        midpoint=ta.midpoint, tip=ta.tip, tip_phi=ta.tip_phi, tip_theta=ta.tip_theta
    )


@pytest.fixture(scope="module")
def small_ctx():
    return SynthesisContext(target=anchors_of("bfd", 2), midpoint_node=2)


def test_evaluate_candidate_penalty_arithmetic(small_ctx):
    settings = GASettings()
    # exact anchors, completeness check off -> pure objective of zero
    free_ctx = dataclasses.replace(small_ctx, check_completeness=False)
    assert evaluate_candidate(Sequence.from_letters("bfd"), free_ctx, settings) == 0.0
    # same candidate with completeness enforced: a 3-element chain cannot
    # tie a knot, so the incompleteness penalty applies in full
    f = evaluate_candidate(Sequence.from_letters("bfd"), small_ctx, settings)
    assert abs(f - settings.incompleteness_penalty) < 1e-12
    # a colliding candidate pays the collision penalty on top of its score
    curl = Sequence.from_letters("b" * 15)
    ctx15 = SynthesisContext(target=anchors_of("a" * 15, 8), midpoint_node=8)
    f15 = evaluate_candidate(curl, ctx15, settings)
    quiet = dataclasses.replace(
        ctx15, check_collision=False, check_completeness=False
    )
    y15 = evaluate_candidate(curl, quiet, settings)
    assert abs(f15 - (y15 + settings.collision_penalty + settings.incompleteness_penalty)) < 1e-9


def test_straight_chain_fitness_is_objective_plus_incompleteness():
    ctx = SynthesisContext()
    settings = GASettings()
    seq = Sequence((ElementKind.NEUTRAL,) * 13)
    f = evaluate_candidate(seq, ctx, settings)
    y = straight_chain_objective(13, ctx)
    assert abs(f - (y + settings.incompleteness_penalty)) < 1e-12


def test_ga_matches_exhaustive_enumeration(small_ctx):
    genes = np.array(list(product(range(7), repeat=3)))
    ev = _evaluate_genes(genes, small_ctx, GASettings())
    optimum = float(ev.fitness.min())
    hits = 0
    for seed in range(20):
        settings = GASettings(population=24, generations=15, seed=seed)
        run = run_ga(3, settings, small_ctx)
        hits += abs(run.fitness - optimum) < 1e-12
    assert hits >= 19


def test_run_ga_is_deterministic(small_ctx):
    settings = GASettings(population=20, generations=10, seed=123)
    a = run_ga(3, settings, small_ctx)
    b = run_ga(3, settings, small_ctx)
    assert a.sequence == b.sequence
    assert a.fitness == b.fitness
    assert a.history == b.history


def test_thread_count_does_not_change_results(small_ctx):
    settings = GASettings(population=20, generations=8, seed=5)
    runs = []
    for threads in (1, 2, 4):
        ctx = dataclasses.replace(small_ctx, n_threads=threads)
        runs.append(run_ga(3, settings, ctx))
    assert runs[0].sequence == runs[1].sequence == runs[2].sequence
    assert runs[0].fitness == runs[1].fitness == runs[2].fitness
    assert runs[0].history == runs[1].history == runs[2].history


def test_elitism_keeps_best_fitness_monotone(small_ctx):
    settings = GASettings(population=16, generations=40, seed=77)
    run = run_ga(3, settings, small_ctx)
    best = [b for _, b, _ in run.history]
    assert all(b1 <= b0 + 1e-15 for b0, b1 in zip(best, best[1:]))


def test_degenerate_population_and_zero_generations(small_ctx):
    settings = GASettings(population=2, generations=0, seed=9, elitism=1)
    run = run_ga(3, settings, small_ctx)
    assert len(run.history) == 1
    # the result is the better of the two initial random candidates
    rng = np.random.default_rng([9, 3])
    genes = rng.integers(0, 7, size=(2, 3), dtype=np.int64)
    ev = _evaluate_genes(genes, small_ctx, settings)
    assert run.fitness == float(ev.fitness.min())


def test_single_element_chain_runs():
    ctx = SynthesisContext(
        target=anchors_of("b", 1), midpoint_node=1, check_completeness=False,
        check_collision=False,
    )
    settings = GASettings(population=8, generations=3, seed=1)
    run = run_ga(1, settings, ctx)
    assert len(run.sequence) == 1


def test_synthesize_failure_outcome(small_ctx):
    # an impossible quality requirement exhausts the escalation range
    settings = GASettings(population=10, generations=3, seed=2)
    result = synthesize(
        settings, start_n=3, max_n=4, ctx=small_ctx, quality_ratio=1e-9
    )
    assert not result.success
    assert result.n_elements == 4  # best attempt at max_n
    assert len(result.sequence) == 4
    with pytest.raises(ValueError):
        synthesize(settings, start_n=5, max_n=4, ctx=small_ctx)


def test_synthesize_trivial_target_succeeds_immediately():
    # straight-chain anchors with completeness disabled: the all-neutral
    # chromosome is in the search space, so start_n succeeds with tiny y
    ctx = SynthesisContext(
        target=anchors_of("aaaa", 2), midpoint_node=2, check_completeness=False
    )
    settings = GASettings(population=40, generations=30, seed=3)
    result = synthesize(settings, start_n=4, max_n=4, ctx=ctx, quality_ratio=None)
    assert result.success
    assert result.objective_y < 1e-9
    # twists leave the node path straight, so several chromosomes achieve
    # the optimum; the found chain must still trace the straight path
    traj, _ = forward_kinematics(result.sequence, PROFILE, 1.0)
    np.testing.assert_allclose(traj.tip, [40.0, 0.0, 0.0], atol=1e-9)


def test_synthesize_is_deterministic(small_ctx):
    settings = GASettings(population=12, generations=4, seed=11)
    a = synthesize(settings, start_n=3, max_n=3, ctx=small_ctx, quality_ratio=None)
    b = synthesize(settings, start_n=3, max_n=3, ctx=small_ctx, quality_ratio=None)
    assert a.to_dict() == b.to_dict()
    assert a.history == b.history


def test_settings_validation():
    with pytest.raises(ValueError):
        GASettings(population=1)
    with pytest.raises(ValueError):
        GASettings(crossover_rate=1.5)
    with pytest.raises(ValueError):
        GASettings(elitism=10, population=10)
    with pytest.raises(ValueError):
        GASettings(mutation_rate=-0.1)


def test_context_midpoint_validation():
    ctx = SynthesisContext(midpoint_node=9)
    with pytest.raises(ValueError):
        ctx.resolved_midpoint_node(3)
