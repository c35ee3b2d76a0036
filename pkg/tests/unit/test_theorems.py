import pytest

from consistency_lens.errors import ConfigurationError
from consistency_lens.harness.theorems import (
    SUITES,
    brute_force_lin,
    brute_force_sc,
    generated_traces,
    real_time_preserved,
    run_case,
    run_suites,
    sc_case,
)
from consistency_lens.spec.oracle import RegisterSpec

REGISTER = RegisterSpec()


def test_brute_force_oracles_on_examples(E1, E3, E6, E7):
    assert brute_force_sc(E1, REGISTER)
    assert not brute_force_sc(E3, REGISTER)
    assert brute_force_sc(E6, REGISTER)
    assert not brute_force_lin(E6, REGISTER)
    assert brute_force_lin(E7, REGISTER)


def test_real_time_preserved(E6):
    assert real_time_preserved(E6, (0, 1, 2, 3))
    # moving the store invocation ahead of the load return breaks real time
    assert not real_time_preserved(E6, (0, 2, 1, 3))


def test_run_case_collects_failures(E1, E3):
    result = run_case("sc", lambda E: None if E is E1 else "boom", [E1, E3])
    assert result.checked == 2
    assert result.failures == ("boom",)
    assert not result.ok


def test_generated_traces_are_reproducible():
    assert generated_traces(20, seed=1) == generated_traces(20, seed=1)


@pytest.mark.parametrize("suite, bound", [("sc", 3), ("lin", 4), ("ec", 3)])
def test_equivalence_suites_at_small_bounds(suite, bound):
    (result,) = run_suites([suite], max_events=bound)
    assert result.checked > 0
    assert result.ok, result.failures[:3]


def test_knowledge_suites_on_a_small_corpus():
    results = run_suites(["axioms", "detect"], count=40, seed=5)
    assert [r.name for r in results] == [
        "axiom-T-threads",
        "axiom-T-threads+obs",
        "axiom-4-threads",
        "axiom-4-threads+obs",
        "axiom-5-threads",
        "detect-sc",
        "detect-lin",
    ]
    for result in results:
        assert result.ok, (result.name, result.failures[:3])


def test_parallel_runs_match_serial(E1):
    serial = run_suites(["sc"], max_events=2)
    parallel = run_suites(["sc"], max_events=2, jobs=2)
    assert serial == parallel
    assert sc_case(E1) is None


def test_unknown_suite():
    with pytest.raises(ConfigurationError):
        run_suites(["queues"])


@pytest.mark.slow
@pytest.mark.parametrize("suite", SUITES)
def test_suites_at_the_acceptance_bound(suite):
    for result in run_suites([suite], jobs=4):
        assert result.ok, (result.name, result.failures[:3])
