import math
import time

import numpy as np
import pytest

from darkcool.core.basis import build_basis
from darkcool.core.errors import ConfigError, DimensionError, TruncationError
from darkcool.core.model import GridSpec, SimulationConfig, TrapSpec, TsepPolicy
from darkcool.core.runner import JobRunner
from darkcool.core.engine import (
    TsepSampler,
    commensurability_experiment,
    derive_seed,
    perturbed_trap_run,
    reference_config,
    run_sequence,
    sweep_order,
    sweep_point_config,
    sweep_width,
)

INITIAL_GROUND = 1.0 - math.exp(-0.25)


def test_sequence_shape_and_initial_state(small_config):
    trajectory = run_sequence(small_config)
    assert len(trajectory) == small_config.num_pulses + 1
    first = trajectory.records[0]
    assert first.pulse == 0 and first.zeta == 0.0
    assert first.ground_population == pytest.approx(INITIAL_GROUND, abs=1e-4)
    assert np.all((trajectory.zetas() >= -1e-8) & (trajectory.zetas() <= 1 + 1e-8))


def test_sequence_is_deterministic(small_config):
    first = run_sequence(small_config)
    second = run_sequence(small_config)
    np.testing.assert_array_equal(first.ground_populations(), second.ground_populations())
    np.testing.assert_array_equal(first.zetas(), second.zetas())


def test_seed_changes_the_sequence(small_config):
    first = run_sequence(small_config)
    second = run_sequence(small_config.with_changes(rng_seed=8))
    assert not np.array_equal(first.ground_populations(), second.ground_populations())


def test_zero_pulses(small_config):
    trajectory = run_sequence(small_config.with_changes(num_pulses=0))
    assert len(trajectory) == 1
    assert trajectory.final_ground_population() == pytest.approx(0.2212, abs=1e-4)


def test_hot_thermal_start():
    config = SimulationConfig(lamb_dicke=1.0, thermal_quanta=25.0, num_pulses=0)
    start = run_sequence(config).records[0]
    assert start.ground_population == pytest.approx(0.0392, abs=1e-4)
    assert start.ground_population == pytest.approx(-math.expm1(-1.0 / 25.0), abs=1e-6)


def test_no_light_keeps_populations(small_config):
    trajectory = run_sequence(small_config.with_changes(peak_pulse_area=0.0))
    np.testing.assert_allclose(trajectory.ground_populations(), INITIAL_GROUND, atol=1e-4)
    spread = trajectory.ground_populations() - trajectory.ground_populations()[0]
    assert np.abs(spread).max() < 1e-8


def test_final_state_dump(small_config):
    basis = build_basis(small_config)
    trajectory = run_sequence(small_config, basis=basis, keep_final_state=True)
    assert trajectory.final_state.violations() == []
    assert basis.grid.spacing * trajectory.final_density.sum() == pytest.approx(1.0, abs=1e-8)
    assert run_sequence(small_config, basis=basis).final_state is None


def test_invalid_config_is_rejected(small_config):
    with pytest.raises(ConfigError, match="lamb_dicke"):
        run_sequence(small_config.with_changes(lamb_dicke=0.0))


def test_basis_must_match_config(small_config):
    basis = build_basis(small_config.with_changes(basis_size=30))
    with pytest.raises(DimensionError):
        run_sequence(small_config, basis=basis)


def test_truncated_basis_is_rejected(small_config):
    with pytest.raises(TruncationError):
        run_sequence(small_config.with_changes(lamb_dicke=5.0, basis_size=30))


def test_sampler_draws():
    policy = TsepPolicy.random_uniform(0.1, 1.1)
    draws = [TsepSampler(policy, 5).draw() for _ in range(3)]
    assert draws[0] == draws[1] == draws[2]

    sampler = TsepSampler(policy, 5)
    values = np.array([sampler.draw() for _ in range(2000)])
    assert values.min() >= 0.1 and values.max() < 1.1
    assert values.mean() == pytest.approx(0.6, abs=0.03)

    fixed = TsepSampler(TsepPolicy.fixed(math.pi), 5)
    assert fixed.draw() == fixed.draw() == math.pi


def test_derive_seed():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    seeds = {derive_seed(0, index) for index in range(50)}
    assert len(seeds) == 50
    assert derive_seed(1, 0) != derive_seed(0, 0)
    assert all(0 <= seed < 2**64 for seed in seeds)


def test_empty_sweep(small_config):
    result = sweep_width(small_config, [], checkpoints=(5, 10))
    assert result.points == []
    assert list(result.rows()) == []


def test_bad_checkpoints(small_config):
    with pytest.raises(ConfigError):
        sweep_width(small_config, [4.0], checkpoints=())
    with pytest.raises(ConfigError):
        sweep_width(small_config, [4.0], checkpoints=(10, 5))


def test_width_sweep_rows(small_config):
    result = sweep_width(small_config, [6.0, 10.0], checkpoints=(5, 10))
    rows = list(result.rows())
    assert len(rows) == 4
    assert [row[:3] for row in rows] == [
        ("width", 6.0, 5),
        ("width", 6.0, 10),
        ("width", 10.0, 5),
        ("width", 10.0, 10),
    ]
    assert result.best() in result.points
    assert result.best(5) in result.points


def test_single_pair_matches_direct_run(small_config):
    checkpoints = (5, 12)
    result = sweep_order(small_config, [(2, 10.0)], checkpoints=checkpoints)
    point = result.points[0]
    direct = run_sequence(sweep_point_config(small_config, 0, 2, 10.0, checkpoints))
    assert point.exponent == 2 and point.width == 10.0
    assert point.seed == derive_seed(small_config.rng_seed, 0)
    assert point.ground_populations == pytest.approx(
        [direct.ground_population_at(c) for c in checkpoints], rel=1e-12
    )


def test_parallel_sweep_matches_serial(small_config):
    pairs = [(2, 8.0), (4, 5.0), (2, 12.0)]
    serial = sweep_order(small_config, pairs, checkpoints=(10,), jobs=1)
    parallel = sweep_order(small_config, pairs, checkpoints=(10,), jobs=3)
    assert list(serial.rows()) == list(parallel.rows())


def test_job_runner_keeps_submission_order():
    def slow_square(value):
        time.sleep(0.01 * (5 - value))
        return value * value

    assert JobRunner(1).run_all(slow_square, range(5)) == [0, 1, 4, 9, 16]
    assert JobRunner(4).run_all(slow_square, iter(range(5))) == [0, 1, 4, 9, 16]
    assert JobRunner(4).run_all(slow_square, []) == []


def test_odd_exponent_is_rejected(small_config):
    with pytest.raises(ConfigError):
        sweep_point_config(small_config, 0, 3, 4.0, (10,))


def test_commensurability_baseline_only(small_config):
    rows = commensurability_experiment(small_config, [])
    assert len(rows) == 1
    assert rows[0].policy.is_random
    assert rows[0].label == "random[0.1,1.1]"


def test_commensurability_rows(small_config):
    config = small_config.with_changes(tsep_policy=TsepPolicy.fixed(0.5))
    rows = commensurability_experiment(config, [2 * math.pi, math.pi], jobs=2)
    assert [row.policy.kind for row in rows] == ["fixed", "fixed", "random-uniform"]
    assert rows[0].policy.value == 2 * math.pi
    assert (rows[-1].policy.lo, rows[-1].policy.hi) == (0.1, 1.1)
    assert all(0.0 <= row.final_ground_population <= 1.0 for row in rows)


def test_zero_epsilon_matches_harmonic_run(small_config):
    config = small_config.with_changes(grid=GridSpec(half_width=16.0, points=2048))
    perturbed = perturbed_trap_run(config, epsilon=0.0, g=2000.0, order=1, width=10.0)
    harmonic = run_sequence(config.with_changes(doughnut_order=1, doughnut_width=10.0))
    np.testing.assert_allclose(perturbed.ground_populations(), harmonic.ground_populations(), atol=1e-12)


def test_reference_config():
    reference = reference_config(SimulationConfig(trap=TrapSpec.perturbed(), grid=GridSpec(points=30000)))
    assert reference.trap.is_harmonic
    assert (reference.lamb_dicke, reference.thermal_quanta) == (1.0, 4.0)
    assert (reference.doughnut_order, reference.doughnut_width) == (1, 10.0)
    assert reference.grid == GridSpec()


def test_reference_run_cools():
    config = reference_config(SimulationConfig()).with_changes(num_pulses=300, rng_seed=3)
    populations = run_sequence(config).ground_populations()
    assert populations[0] == pytest.approx(0.221, abs=0.01)
    assert populations[-50:].mean() > populations[:50].mean()
    assert populations[-1] > populations[0]
