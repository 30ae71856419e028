import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from curvkit.chart import MetricField


def euclidean_field(n: int) -> MetricField:
    coords = [f"x{i}" for i in range(1, n + 1)]
    return MetricField(coords, {(i, i): 1.0 for i in range(n)})


@pytest.fixture(scope="session")
def sphere2():
    return MetricField(["theta", "phi"],
                       {("theta", "theta"): "1", ("phi", "phi"): "sin(theta)^2"})


@pytest.fixture(scope="session")
def sphere3():
    return MetricField(
        ["psi", "theta", "phi"],
        {("psi", "psi"): "1",
         ("theta", "theta"): "sin(psi)^2",
         ("phi", "phi"): "sin(psi)^2 * sin(theta)^2"})


@pytest.fixture(scope="session")
def conformal4():
    coords = ["x1", "x2", "x3", "x4"]
    return MetricField(coords, {(i, i): "exp(2*x1)" for i in range(4)})


@pytest.fixture(scope="session")
def poly3():
    return MetricField(
        ["x1", "x2", "x3"],
        {("x1", "x1"): "1 + 0.1*x2^2",
         ("x2", "x2"): "1 + 0.1*x3^2",
         ("x3", "x3"): "1 + 0.1*x1^2",
         ("x1", "x2"): "0.05*x1*x3",
         ("x2", "x3"): "0.05*x2"})


@pytest.fixture(scope="session")
def euclid3():
    return euclidean_field(3)
