import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from basin_infer.dynamics import (
    MAX_STEPS,
    SolverConfig,
    TerminalOutcome,
    VectorFieldSpec,
    make_gradient_flow,
    make_picard_flow,
    solver_from,
)
from basin_infer.geometry import ConvexDomain, InitialSampler
from basin_infer.harness import (
    Cluster,
    OutcomeTally,
    RestartRecord,
    check_hn,
    default_eps_obs,
    empirical_basin_fractions,
    identify_outcomes,
    resolve_workers,
    run_restarts,
)
from basin_infer.problems import AffineMap, DoubleWellGradient, Rotation

LINE = ConvexDomain.box([-2.0], [2.0])
WELL_SOLVER = solver_from(LINE, make_gradient_flow(DoubleWellGradient()), SolverConfig(h=0.05))


def converged_at(*points):
    return [RestartRecord(i, np.zeros(1), TerminalOutcome(True, np.atleast_1d(float(p)), 0.0, 1))
            for i, p in enumerate(points)]


def tally_of(counts, daggers=0):
    clusters = [Cluster(np.array([float(i)]), c) for i, c in enumerate(counts)]
    return OutcomeTally(clusters, daggers, sum(counts) + daggers, 1e-3)


class TestRunRestarts:
    def test_contraction(self):
        dom = ConvexDomain.box([-1.0], [1.0])
        tol = 1e-8
        solve = solver_from(dom, make_picard_flow(AffineMap([[0.5]], [0.0])), SolverConfig(h=0.5, residual_tol=tol))
        recs = run_restarts(solve, InitialSampler(seed=1), dom, 20)
        assert len(recs) == 20
        assert all(r.outcome.converged and abs(r.outcome.point[0]) <= 10 * tol for r in recs)

    def test_double_well_balanced(self):
        tally = identify_outcomes(run_restarts(WELL_SOLVER, InitialSampler(seed=0), LINE, 1000), 1e-4)
        assert len(tally.clusters) == 2
        assert all(abs(c - 500) <= 3 * np.sqrt(1000 * 0.25) for c in tally.counts)
        assert all(abs(f - 0.5) <= 0.05 for _, f in empirical_basin_fractions(tally))

    def test_rotation_all_graveyard(self):
        ball = ConvexDomain.ball([0, 0], 2.0)
        solve = solver_from(ball, VectorFieldSpec(Rotation()), SolverConfig(h=0.05, max_steps=500))
        tally = identify_outcomes(run_restarts(solve, InitialSampler(seed=2), ball, 5), 1e-6)
        assert tally.dagger_count == 5 and not tally.clusters
        assert tally.dagger_reasons == {MAX_STEPS: 5}

    def test_index_addressing(self):
        recs = run_restarts(WELL_SOLVER, InitialSampler(seed=4), LINE, 10)
        assert [r.index for r in recs] == list(range(10))
        again = run_restarts(WELL_SOLVER, InitialSampler(seed=99), LINE, 10, base_seed=4)
        assert again == recs

    def test_schedule_independence(self):
        one = run_restarts(WELL_SOLVER, InitialSampler(seed=7), LINE, 37, workers=1)
        many = run_restarts(WELL_SOLVER, InitialSampler(seed=7), LINE, 37, workers=3)
        assert one == many

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("BASIN_INFER_WORKERS", "3")
        assert resolve_workers(None) == 3
        assert resolve_workers(2) == 2

    def test_needs_positive_n(self):
        with pytest.raises(ValueError):
            run_restarts(WELL_SOLVER, InitialSampler(), LINE, 0)

    def test_record_round_trip(self):
        rec = run_restarts(WELL_SOLVER, InitialSampler(seed=3), LINE, 1)[0]
        assert RestartRecord.from_dict(rec.to_dict()) == rec

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [100, 1000, 10_000])
    def test_fraction_consistency(self, n):
        # basin of +1 under uniform starts on [-2, 0.5] has mass 0.5 / 2.5
        sampler = InitialSampler("uniform_box", 5, (-2.0,), (0.5,))
        tally = identify_outcomes(run_restarts(WELL_SOLVER, sampler, LINE, n), 1e-4)
        right = sum(c.count for c in tally.clusters if c.representative[0] > 0)
        assert abs(right / n - 0.2) <= 3 * np.sqrt(0.2 * 0.8 / n)


class TestIdentify:
    def test_tolerance_merge(self):
        tally = identify_outcomes(converged_at(1.0000001, 0.9999999, -1.0), 1e-3)
        assert tally.counts == [2, 1]

    def test_identical(self):
        assert identify_outcomes(converged_at(*[0.25] * 8), 1e-9).counts == [8]

    def test_refinement_limit(self):
        pts = [0.0, 0.1, 0.3, 0.35]
        assert identify_outcomes(converged_at(*pts), 0.01).counts == [1, 1, 1, 1]

    def test_daggers_counted_not_merged(self):
        recs = converged_at(1.0) + [RestartRecord(1, np.zeros(1), TerminalOutcome(False, reason=MAX_STEPS))]
        tally = identify_outcomes(recs, 1e-3)
        assert tally.counts == [1] and tally.dagger_count == 1

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            identify_outcomes(converged_at(1.0), 0.0)

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=60), st.floats(1e-3, 1.0),
           st.integers(0, 5))
    def test_partition_and_separation(self, pts, eps, daggers):
        recs = converged_at(*pts) + [RestartRecord(0, np.zeros(1), TerminalOutcome(False, reason=MAX_STEPS))
                                     for _ in range(daggers)]
        tally = identify_outcomes(recs, eps)
        assert sum(tally.counts) + tally.dagger_count == tally.n == len(pts) + daggers
        reps = [c.representative[0] for c in tally.clusters]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                assert abs(reps[i] - reps[j]) > eps
        assert all(c.max_within_cluster_distance <= eps for c in tally.clusters)

    def test_tally_round_trip(self):
        tally = identify_outcomes(converged_at(1.0, 1.0, -1.0), 1e-3)
        assert OutcomeTally.from_dict(tally.to_dict()).to_dict() == tally.to_dict()

    def test_inconsistent_tally_rejected(self):
        doc = tally_of([3, 2]).to_dict()
        doc["n"] = 7
        with pytest.raises(ValueError):
            OutcomeTally.from_dict(doc)

    def test_csv(self):
        text = tally_of([2, 1]).to_csv()
        assert text.splitlines()[0] == "x0,count,fraction"
        assert len(text.splitlines()) == 3


class TestHn:
    def test_holds(self):
        rep = check_hn(tally_of([20]))
        assert rep.holds and rep.rts is not None and rep.n == 20

    def test_two_clusters(self):
        assert not check_hn(tally_of([999, 1])).holds

    def test_graveyard_breaks_hn(self):
        assert not check_hn(tally_of([19], daggers=1)).holds

    def test_fractions(self):
        fr = [f for _, f in empirical_basin_fractions(tally_of([2, 1]))]
        assert fr == pytest.approx([2 / 3, 1 / 3])
        assert [f for _, f in empirical_basin_fractions(tally_of([5]))] == [1.0]

    def test_default_eps(self):
        assert default_eps_obs(LINE) == pytest.approx(4e-6)
