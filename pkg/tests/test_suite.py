import pytest

from opparallel.exceptions import InputError
from opparallel.jsonio import dumps
from opparallel.suite import FAMILIES, SuiteConfig, run_case, run_suite


@pytest.mark.parametrize("family", FAMILIES)
def test_family_small_run(family):
    cfg = SuiteConfig(seed=5, cases=4, max_dim=5, families=(family,))
    rep = run_suite(cfg)
    counts = rep.families[family]
    assert counts["passed"] + counts["failed"] == 4
    assert rep.ok, rep.failures
    assert all(v >= 0 for v in rep.worst_residuals.values())


@pytest.mark.parametrize("kwargs", [
    {"cases": 0}, {"cases": -3}, {"cases": 1.5}, {"max_dim": 0}, {"max_dim": 65},
    {"seed": -1}, {"seed": 2**64}, {"families": ()}, {"families": ("random", "weird")},
])
def test_config_errors(kwargs):
    with pytest.raises(InputError):
        SuiteConfig(**kwargs)


def test_families_are_canonicalised():
    cfg = SuiteConfig(families=("schatten", "random", "random"))
    assert cfg.families == ("random", "schatten")


def test_case_is_reproducible():
    cfg = SuiteConfig(seed=11, cases=3, max_dim=4)
    assert run_case(cfg, "module", 2) == run_case(cfg, "module", 2)


def test_jobs_do_not_change_report():
    cfg = SuiteConfig(seed=9, cases=2, max_dim=4, families=("random", "module", "schatten"))
    assert dumps(run_suite(cfg, jobs=1)) == dumps(run_suite(cfg, jobs=2))
    with pytest.raises(InputError):
        run_suite(cfg, jobs=0)


def test_report_excludes_wall_time():
    rep = run_suite(SuiteConfig(seed=1, cases=1, max_dim=3, families=("normal",)))
    assert rep.wall_time > 0 and "wall_time" not in rep.to_dict()
