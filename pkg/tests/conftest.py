"""Shared fixtures and independent numerical oracles.

The finite-difference helpers here are deliberately independent of the jet
engine: central differences with one Richardson extrapolation step, used only
to cross-check jet derivatives.
"""

from __future__ import annotations

import numpy as np
import pytest

from torseform import MetricField, VectorField, eval_float, parse


# ---------------------------------------------------------------------------
# Finite-difference oracles (Richardson-extrapolated central differences)
# ---------------------------------------------------------------------------

def fd_gradient(fn, x, i, h=1e-3):
    x = np.asarray(x, dtype=float)

    def central(step):
        e = np.zeros_like(x)
        e[i] = step
        return (fn(x + e) - fn(x - e)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def fd_second(fn, x, i, j, h=1e-3):
    x = np.asarray(x, dtype=float)
    if i == j:
        def central(step):
            e = np.zeros_like(x)
            e[i] = step
            return (fn(x + e) - 2.0 * fn(x) + fn(x - e)) / step ** 2
    else:
        def central(step):
            ei = np.zeros_like(x)
            ej = np.zeros_like(x)
            ei[i] = step
            ej[j] = step
            return (fn(x + ei + ej) - fn(x + ei - ej)
                    - fn(x - ei + ej) + fn(x - ei - ej)) / (4.0 * step ** 2)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


# ---------------------------------------------------------------------------
# Random domain-safe expressions
# ---------------------------------------------------------------------------

def random_expression(rng, nvars, depth=3) -> str:
    """Expression source that is smooth and finite on [-2, 2]^nvars."""
    def leaf():
        if rng.random() < 0.6:
            return f"x{rng.integers(1, nvars + 1)}"
        return f"{rng.uniform(0.2, 2.5):.3f}"

    def build(d):
        if d == 0:
            return leaf()
        a = build(d - 1)
        b = build(d - 1)
        pick = rng.integers(0, 9)
        if pick == 0:
            return f"({a})+({b})"
        if pick == 1:
            return f"({a})-({b})"
        if pick == 2:
            return f"({a})*({b})"
        if pick == 3:
            return f"({a})/(1.5+({b})^2)"
        if pick == 4:
            return f"sin({a})" if rng.random() < 0.5 else f"cos({a})"
        if pick == 5:
            return f"tanh({a})" if rng.random() < 0.5 else f"asinh({a})"
        if pick == 6:
            return f"sqrt(1.3+({a})^2)"
        if pick == 7:
            return f"log(1.2+({a})^2)"
        return f"atan({a})"

    return build(depth)


# ---------------------------------------------------------------------------
# Small scene ingredients reused across modules
# ---------------------------------------------------------------------------

def radial_unit_field(m: int) -> VectorField:
    r = "sqrt(" + "+".join(f"x{i + 1}^2" for i in range(m)) + ")"
    return VectorField([f"x{i + 1}/{r}" for i in range(m)])


@pytest.fixture(scope="session")
def euclid3():
    return MetricField.euclidean(3)


@pytest.fixture(scope="session")
def euclid4():
    return MetricField.euclidean(4)


@pytest.fixture(scope="session")
def sphere_chart():
    """Round unit sphere chart metric dθ² + sin²θ dφ²."""
    return MetricField([["1"], ["0", "sin(x1)^2"]])


@pytest.fixture(scope="session")
def warped_chart():
    """Warped 2-metric ds² + e^{2s} dt²."""
    return MetricField([["1"], ["0", "exp(2*x1)"]])


@pytest.fixture(scope="session")
def polar_chart():
    """Flat plane in polar coordinates dr² + r² dθ²."""
    return MetricField([["1"], ["0", "x1^2"]])


def eval_src(src: str, point) -> float:
    names = [f"x{i + 1}" for i in range(len(point))]
    return eval_float(parse(src), dict(zip(names, map(float, point))))
