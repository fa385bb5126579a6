from tropbn.sweep import (
    SampleSweepConfig, SweepConfig, check_tableau, run_sweep,
)
from tropbn.graph import DEFAULT_SEPARATION
from tropbn.tableaux import Tableau
from tropbn.errors import ParameterError

import dataclasses
import pytest

def test_sample_sweep():
    cfg = SampleSweepConfig(genus=21, count=3, seed=1)
    report = run_sweep(cfg, quiet=True)
    assert report.total == 3
    assert report.verified == 3
    assert report.failures == []
    assert report.seed == 1
    data = report.to_dict()
    assert set(data) == {"total", "verified", "failures", "wall_time", "seed"}

def test_sample_sweep_independent_of_jobs():
    cfg = SampleSweepConfig(genus=22, count=4, seed=5)
    serial = run_sweep(cfg, quiet=True)
    parallel = run_sweep(dataclasses.replace(cfg, jobs=2), quiet=True)
    assert (serial.total, serial.verified, serial.failures) == \
        (parallel.total, parallel.verified, parallel.failures)

def test_empty_sample():
    report = run_sweep(SampleSweepConfig(genus=23, count=0), quiet=True)
    assert (report.total, report.verified) == (0, 0)

def test_check_single_tableau():
    t = Tableau(22, 6, 25, (
        (1, 3, 6, 9, 10, 13, 15),
        (2, 5, 7, 12, 16, 19, 20),
        (4, 8, 11, 14, 17, 21, 22),
    ))
    assert check_tableau(t, DEFAULT_SEPARATION, 0) is None

@pytest.mark.parametrize("cfg", [
    SweepConfig(genus=20),
    SweepConfig(jobs=0),
    SampleSweepConfig(count=-1),
])
def test_sweep_rejects(cfg):
    with pytest.raises(ParameterError):
        run_sweep(cfg, quiet=True)

def test_formula_block_end_regression():
    # The closed-form z′ = 15 leaves the second block without a spare function
    t = Tableau(21, 6, 24, (
        (1, 3, 4, 6, 9, 12, 16),
        (2, 5, 7, 13, 14, 15, 20),
        (8, 10, 11, 17, 18, 19, 21),
    ))
    assert check_tableau(t, DEFAULT_SEPARATION, 0) is None

def test_sample_sweep_small_has_no_failures():
    report = run_sweep(SampleSweepConfig(genus=21, count=20, seed=7), quiet=True)
    assert report.failures == []

@pytest.mark.slow
@pytest.mark.parametrize("genus", [21, 22, 23])
def test_sample_sweep_has_no_failures(genus):
    report = run_sweep(SampleSweepConfig(genus=genus, count=300, seed=7), quiet=True)
    assert report.total == 300
    assert report.failures == []
