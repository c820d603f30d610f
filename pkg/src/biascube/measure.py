"""Calculus for real functions on the cube under biased product measures.

The measure with bias p puts weight p**w(x) * (1-p)**(n-w(x)) on each point x,
where w is the Hamming weight. All logarithms are natural.

Two first-order operators act along a coordinate i:

* the discrete gradient, f(x with x_i=1) - f(x with x_i=0), constant on each
  fiber, and
* the centering operator, f minus its one-coordinate fiber mean; on the upper
  point of a fiber it equals (1-p) times the gradient and on the lower point
  -p times the gradient.

The Dirichlet energy is the sum over coordinates of the integrated squared
centering operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .booleans import BooleanFunction, is_monotone, popcounts

TWO_PASS_VARIANCE_MAX_ARITY = 20


@dataclass(frozen=True)
class Bias:
    """Bernoulli parameter, strictly inside (0,1). Endpoints are rejected."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or not 0.0 < p < 1.0:
            raise ValueError(f"bias must lie strictly in (0,1), got {self.p!r}")
        object.__setattr__(self, "p", p)


def bias_value(p) -> float:
    """Accept a Bias or bare float, returning the validated float."""
    if isinstance(p, Bias):
        return p.p
    return Bias(p).p


@dataclass(eq=False)
class CubeFunction:
    """A real-valued function on {0,1}^n, stored densely."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if self.n < 1:
            raise ValueError("arity must be at least 1")
        if values.shape != (1 << self.n,):
            raise ValueError(f"values length {values.shape} does not match 2**{self.n}")
        if not np.isfinite(values).all():
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", np.ascontiguousarray(values))

    @classmethod
    def from_boolean(cls, f: BooleanFunction) -> "CubeFunction":
        return cls(f.n, f.table.astype(np.float64))


def _as_values(g) -> tuple[int, np.ndarray]:
    if isinstance(g, BooleanFunction):
        return g.n, g.table.astype(np.float64)
    if isinstance(g, CubeFunction):
        return g.n, g.values
    raise TypeError(f"expected a BooleanFunction or CubeFunction, got {type(g).__name__}")


def point_weight(n: int, p, x: int) -> float:
    """Measure of a single point."""
    p = bias_value(p)
    w = bin(x).count("1")
    return p**w * (1.0 - p) ** (n - w)


def weights(n: int, p) -> np.ndarray:
    """Dense weight vector over all 2**n points."""
    p = bias_value(p)
    k = np.arange(n + 1, dtype=np.float64)
    by_weight = p**k * (1.0 - p) ** (n - k)
    return by_weight[popcounts(n)]


def expectation(g, p) -> float:
    n, v = _as_values(g)
    return float(weights(n, p) @ v)


def variance(g, p) -> float:
    """Variance; two-pass below 2**20 entries, the moment formula above."""
    n, v = _as_values(g)
    w = weights(n, p)
    mean = float(w @ v)
    if n <= TWO_PASS_VARIANCE_MAX_ARITY:
        var = float(w @ (v - mean) ** 2)
    else:
        var = float(w @ (v * v)) - mean * mean
    return max(var, 0.0)


def entropy(g, p) -> float:
    """Entropy functional: int g log g - (int g) log(int g), with 0 log 0 = 0."""
    n, v = _as_values(g)
    if (v < 0).any():
        raise ValueError("entropy requires a nonnegative function")
    w = weights(n, p)
    mean = float(w @ v)
    pos = v > 0
    integrand = float(w[pos] @ (v[pos] * np.log(v[pos])))
    if mean <= 0.0:
        return 0.0
    return integrand - mean * np.log(mean)


# raw-array fiber helpers; the public wrappers below add the CubeFunction skin


def _fiber_split(values: np.ndarray, n: int, i: int):
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range for arity {n}")
    b = i - 1
    r = values.reshape(1 << (n - 1 - b), 2, 1 << b)
    return r[:, 0, :], r[:, 1, :]


def _fill_fibers(n: int, i: int, lower_vals, upper_vals) -> np.ndarray:
    b = i - 1
    out = np.empty((1 << (n - 1 - b), 2, 1 << b), dtype=np.float64)
    out[:, 0, :] = lower_vals
    out[:, 1, :] = upper_vals
    return out.reshape(-1)


def _gradient(values: np.ndarray, n: int, i: int) -> np.ndarray:
    lower, upper = _fiber_split(values, n, i)
    diff = upper - lower
    return _fill_fibers(n, i, diff, diff)


def _average(values: np.ndarray, n: int, p: float, i: int) -> np.ndarray:
    lower, upper = _fiber_split(values, n, i)
    mean = (1.0 - p) * lower + p * upper
    return _fill_fibers(n, i, mean, mean)


def _center(values: np.ndarray, n: int, p: float, i: int) -> np.ndarray:
    lower, upper = _fiber_split(values, n, i)
    mean = (1.0 - p) * lower + p * upper
    return _fill_fibers(n, i, lower - mean, upper - mean)


def coordinate_gradient(g, i: int) -> CubeFunction:
    """Discrete gradient along coordinate i, constant on each fiber."""
    n, v = _as_values(g)
    return CubeFunction(n, _gradient(v, n, i))


def coordinate_average(g, p, i: int) -> CubeFunction:
    """One-coordinate fiber mean, constant on each fiber."""
    n, v = _as_values(g)
    return CubeFunction(n, _average(v, n, bias_value(p), i))


def coordinate_center(g, p, i: int) -> CubeFunction:
    """g minus its fiber mean along coordinate i."""
    n, v = _as_values(g)
    return CubeFunction(n, _center(v, n, bias_value(p), i))


def coordinate_center_case_form(g, p, i: int) -> CubeFunction:
    """Centering operator in case form: (1-p)*gradient on the upper point of
    each fiber, -p*gradient on the lower point. Agrees with
    ``coordinate_center`` to machine tolerance."""
    n, v = _as_values(g)
    p = bias_value(p)
    lower, upper = _fiber_split(v, n, i)
    diff = upper - lower
    return CubeFunction(n, _fill_fibers(n, i, -p * diff, (1.0 - p) * diff))


def generator_apply(g, p) -> CubeFunction:
    """Markov generator: minus the sum of the coordinate centering operators."""
    n, v = _as_values(g)
    p = bias_value(p)
    acc = np.zeros_like(v)
    for i in range(1, n + 1):
        acc -= _center(v, n, p, i)
    return CubeFunction(n, acc)


def dirichlet_energy(g, p) -> float:
    """Sum over coordinates of the integrated squared centering operator."""
    n, v = _as_values(g)
    p = bias_value(p)
    w = weights(n, p)
    total = 0.0
    for i in range(1, n + 1):
        centered = _center(v, n, p, i)
        total += float(w @ (centered * centered))
    return total


def moment_identity(f, p, i: int, alpha: float) -> tuple[float, float]:
    """Both sides of the gradient moment identity, evaluated independently.

    Left: integrated |centering|**alpha. Right: the bias factor
    p(1-p)**alpha + (1-p)p**alpha times the integrated |gradient|**alpha.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n, v = _as_values(f)
    p = bias_value(p)
    w = weights(n, p)
    lhs = float(w @ np.abs(_center(v, n, p, i)) ** alpha)
    factor = p * (1.0 - p) ** alpha + (1.0 - p) * p**alpha
    rhs = factor * float(w @ np.abs(_gradient(v, n, i)) ** alpha)
    return lhs, rhs


def center_projection_sides(f, g, p, i: int) -> tuple[float, float]:
    """Both sides of the self-adjointness identity for the centering operator.

    The i-th centering is an orthogonal projection, so pairing f against the
    centered g equals pairing the two centered functions. Returned as
    (lhs, rhs) for the caller to compare.
    """
    n, fv = _as_values(f)
    ng, gv = _as_values(g)
    if n != ng:
        raise ValueError("arity mismatch")
    p = bias_value(p)
    w = weights(n, p)
    cg = _center(gv, n, p, i)
    lhs = float(w @ (fv * cg))
    rhs = float(w @ (_center(fv, n, p, i) * cg))
    return lhs, rhs


def influence(f: BooleanFunction, p, i: int) -> float:
    """Probability, over the remaining coordinates, that coordinate i is pivotal."""
    return float(influences(f, p)[i - 1])


def influences(f: BooleanFunction, p) -> np.ndarray:
    """All coordinate influences of a Boolean function.

    Computed by definition: a fiber scan weighted by the product measure on
    the remaining n-1 coordinates.
    """
    if not isinstance(f, BooleanFunction):
        raise TypeError("influences are defined for Boolean functions")
    p = bias_value(p)
    return _kernels.batch_influences(f.table[None, :], f.n, weights(f.n - 1, p))[0]


def expectation_derivative(g, p) -> float:
    """d/dp of the expectation: the sum of integrated coordinate gradients."""
    n, v = _as_values(g)
    w = weights(n, p)
    total = 0.0
    for i in range(1, n + 1):
        total += float(w @ _gradient(v, n, i))
    return total


def energy_derivative_sides(f: BooleanFunction, p) -> tuple[float, float]:
    """For monotone Boolean f: (d/dp expectation, energy / (p(1-p))).

    The two agree; both sides are computed independently so the identity can
    be asserted by callers.
    """
    if not isinstance(f, BooleanFunction):
        raise TypeError("energy_derivative_sides is defined for Boolean functions")
    if not is_monotone(f):
        raise ValueError("requires a monotone function (no negative gradients)")
    p = bias_value(p)
    lhs = expectation_derivative(f, p)
    rhs = dirichlet_energy(f, p) / (p * (1.0 - p))
    return lhs, rhs


def random_cube_function(n: int, rng: np.random.Generator, positive: bool = False) -> CubeFunction:
    """Seeded random real function; lognormal values when positive is set."""
    values = rng.normal(size=1 << n)
    if positive:
        values = np.exp(values)
    return CubeFunction(n, values)
