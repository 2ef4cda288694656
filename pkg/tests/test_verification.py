"""
최적성 조건 검증 테스트
"""
from fractions import Fraction

import pytest

from app.solver import PersuasionSolver

from tests.conftest import random_instances


F = Fraction


def test_example1_passes_at_q_star(solver1):
    report = solver1.verify(grid_p=24, grid_w=8)
    assert report.passed, report.checks
    assert report.check("concavity").checked > 0
    assert report.check("q1_inequality").checked > 0
    assert report.check("monotone_w").violations == 0


def test_upper_cutoff_is_not_concave(solver1):
    report = solver1.verify(q=F(1, 2), grid_p=24, grid_w=8)
    assert not report.passed
    concavity = report.check("concavity")
    assert concavity.violations > 0
    assert concavity.worst_violation > 0
    assert concavity.location


def test_cutoff_outside_q1_is_reported(solver1):
    report = solver1.verify(q=F(3, 4), grid_p=16, grid_w=8)
    assert not report.passed
    assert report.error
    assert report.checks == []


def test_example2_passes(solver2):
    assert solver2.verify(grid_p=30, grid_w=10).passed


@pytest.mark.slow
def test_example1_default_grid(solver1):
    assert solver1.verify().passed


@pytest.mark.slow
def test_random_instances_pass():
    # q* 가 후보 사이 칸의 탐침 경계일 수 있어 아주 작은 허용 오차를 둔다
    tol = F(1, 10 ** 9)
    for problem in random_instances(25, start=100):
        solver = PersuasionSolver(problem, normalized=True)
        report = solver.verify(grid_p=40, grid_w=10, tol=tol)
        assert report.passed, (problem, report.checks)


def test_a_few_random_instances_pass():
    tol = F(1, 10 ** 9)
    for problem in random_instances(4, start=100):
        solver = PersuasionSolver(problem, normalized=True)
        report = solver.verify(grid_p=24, grid_w=6, tol=tol)
        assert report.passed, (problem, report.checks)
