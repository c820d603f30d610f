"""Sharp-threshold constants and the inequality checks built on them.

Everything is evaluated in double precision straight from the defining
formulas; the exponents 2 + 4/e, 5 + 4/e, 3 + 4/e are computed at runtime,
never hand-rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ._kernels import batch_influences
from .booleans import (
    BooleanFunction,
    FamilySpec,
    PermutationGenerators,
    build_family,
    family_symmetry,
    is_fully_symmetric,
    is_invariant,
    is_monotone,
    is_transitive,
)
from .measure import (
    CubeFunction,
    _as_values,
    bias_value,
    dirichlet_energy,
    entropy,
    expectation,
    expectation_derivative,
    influences,
    variance,
    weights,
)
from .reports import BoundReport, checked
from .threshold import supremum_on_interval, threshold_width

SERIES_SWITCH = 1e-7

_LOG_ENVELOPE_C = (2.0 + 4.0 / math.e) - (5.0 + 4.0 / math.e) * math.log(2.0)
_ENVELOPE_POWER = 3.0 + 4.0 / math.e

# Families that are monotone by construction, at any arity.
_MONOTONE_KINDS = frozenset(
    {"dictator", "and_all", "or_all", "majority", "tribes", "cyclic_run"}
)


def log_sobolev_constant(p) -> float:
    """Optimal constant of the one-coordinate log-Sobolev inequality.

    log((1-p)/p)/(1-2p), with the removable singularity at p = 1/2 filled
    by its limit 2. Below the switch threshold the direct quotient loses
    digits to 0/0 cancellation, so an even Taylor series in u = 1-2p takes
    over; the two branches agree to well under 1e-9 at the switch point.
    """
    pv = bias_value(p)
    u = 1.0 - 2.0 * pv
    if abs(u) < SERIES_SWITCH:
        uu = u * u
        return 2.0 * (1.0 + uu / 3.0 + uu * uu / 5.0)
    return math.log1p(u / pv) / u


def scaled_log_sobolev_constant(p) -> float:
    """p(1-p) times the log-Sobolev constant; capped at 1/2, cap hit only at 1/2."""
    pv = bias_value(p)
    return pv * (1.0 - pv) * log_sobolev_constant(pv)


def _constant_grid(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    u = 1.0 - 2.0 * p
    out = np.empty_like(p)
    near = np.abs(u) < SERIES_SWITCH
    if near.any():
        uu = u[near] ** 2
        out[near] = 2.0 * (1.0 + uu / 3.0 + uu * uu / 5.0)
    far = ~near
    out[far] = np.log1p(u[far] / p[far]) / u[far]
    return out


@dataclass(frozen=True)
class RateValue:
    """One evaluation of the rate sequence, with both max-branch terms kept."""

    n: int
    envelope_term: float
    double_log_term: float
    value: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "envelope_term": self.envelope_term,
            "double_log_term": self.double_log_term,
            "value": self.value,
        }


def rate_value(n: int) -> RateValue:
    """Rate sequence log n - max(envelope term, 2 log log n).

    The envelope term is log of (e^(2+4/e)/2^(5+4/e)) * (log(n/(log n)^2))^(3+4/e).
    Natural logarithms throughout. Positive for every n >= 2 (the scan below
    checks this rather than assuming it), and asymptotically equivalent to
    log n.
    """
    if n < 2:
        raise ValueError("rate sequence is defined for n >= 2")
    ln = math.log(n)
    envelope = _LOG_ENVELOPE_C + _ENVELOPE_POWER * math.log(math.log(n / (ln * ln)))
    double_log = 2.0 * math.log(ln)
    return RateValue(n, envelope, double_log, ln - max(envelope, double_log))


def _rate_terms(ns: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ln = np.log(ns)
    envelope = _LOG_ENVELOPE_C + _ENVELOPE_POWER * np.log(np.log(ns / (ln * ln)))
    double_log = 2.0 * np.log(ln)
    return ln, envelope, double_log


def scan_rate_positive(n_max: int) -> BoundReport:
    """Exhaustively check rate > 0 on [2, n_max]; reports the minimum."""
    if n_max < 2:
        raise ValueError("scan needs n_max >= 2")
    ns = np.arange(2, n_max + 1, dtype=np.float64)
    ln, envelope, double_log = _rate_terms(ns)
    values = ln - np.maximum(envelope, double_log)
    worst = int(values.argmin())
    min_value = float(values[worst])
    return BoundReport(
        "rate_positive_scan",
        lhs=min_value,
        rhs=0.0,
        passed=bool(min_value > 0.0),
        orientation="ge",
        tol=0.0,
        context={"n_max": int(n_max), "argmin_n": int(ns[worst])},
    )


def scan_rate_crossover(n_max: int, expected_first_n: int = 275) -> tuple[int | None, BoundReport]:
    """Find where the envelope term takes over the max, scanning every n.

    Returns the smallest n from which envelope >= 2 log log n holds all the
    way to n_max, plus a report comparing it against ``expected_first_n``.
    A mismatch is flagged in the context, not failed: the report passes iff
    a stable crossover exists at all. Monotonicity of the difference is not
    assumed anywhere; the scan is exhaustive.
    """
    if n_max < 275:
        raise ValueError("crossover scan needs n_max >= 275")
    ns = np.arange(2, n_max + 1, dtype=np.float64)
    _, envelope, double_log = _rate_terms(ns)
    diff = envelope - double_log
    ok = diff >= 0.0

    def first_stable(mask: np.ndarray) -> int | None:
        if not mask[-1]:
            return None
        false_idx = np.flatnonzero(~mask)
        return 2 if false_idx.size == 0 else int(false_idx[-1]) + 3

    stable_n = first_stable(ok)
    # Same scan with the additive constant dropped from the envelope term.
    constant_free = first_stable((envelope - _LOG_ENVELOPE_C) - double_log >= 0.0)

    first_true = int(np.flatnonzero(ok)[0]) + 2 if ok.any() else None
    tail_min = float(diff[stable_n - 2 :].min()) if stable_n is not None else float(diff.max())
    report = BoundReport(
        "rate_crossover_scan",
        lhs=tail_min,
        rhs=0.0,
        passed=stable_n is not None,
        orientation="ge",
        tol=0.0,
        context={
            "n_max": int(n_max),
            "expected_first_n": int(expected_first_n),
            "first_stable_n": stable_n,
            "first_true_n": first_true,
            "matches_expected": stable_n == expected_first_n,
            "constant_free_first_n": constant_free,
        },
    )
    return stable_n, report


def scan_constant_floor(points: int = 10001) -> BoundReport:
    """log-Sobolev constant >= 2 on an interior grid of (0,1)."""
    grid = np.arange(1, points + 1, dtype=np.float64) / (points + 1.0)
    vals = _constant_grid(grid)
    worst = int(vals.argmin())
    return BoundReport(
        "log_sobolev_constant_floor",
        lhs=float(vals[worst]),
        rhs=2.0,
        passed=bool(vals[worst] >= 2.0),
        orientation="ge",
        tol=0.0,
        context={"points": int(points), "argmin_p": float(grid[worst])},
    )


@lru_cache(maxsize=8)
def scan_scaled_constant_cap(points: int = 10001) -> BoundReport:
    """p(1-p) c(p) <= 1/2 on the grid, equality only at p = 1/2."""
    grid = np.arange(1, points + 1, dtype=np.float64) / (points + 1.0)
    vals = grid * (1.0 - grid) * _constant_grid(grid)
    worst = int(vals.argmax())
    eq = grid[np.abs(vals - 0.5) <= 1e-12]
    passed = bool(vals[worst] <= 0.5) and eq.size == 1 and float(eq[0]) == 0.5
    return BoundReport(
        "scaled_constant_cap",
        lhs=float(vals[worst]),
        rhs=0.5,
        passed=passed,
        orientation="le",
        tol=1e-12,
        context={
            "points": int(points),
            "argmax_p": float(grid[worst]),
            "equality_points": [float(x) for x in eq],
        },
    )


def _squared(g) -> CubeFunction:
    n, v = _as_values(g)
    return CubeFunction(n, v * v)


def log_sobolev_check(g, p, tol: float = 1e-12) -> BoundReport:
    """Ent(g^2) <= c(p) * Dirichlet energy of g, the form the variance
    decomposition argument actually consumes."""
    pv = bias_value(p)
    lhs = entropy(_squared(g), pv)
    rhs = log_sobolev_constant(pv) * dirichlet_energy(g, pv)
    n, _ = _as_values(g)
    return checked("log_sobolev_squared", lhs, rhs, "le", tol, n=n, p=pv)


def log_sobolev_literal_record(g, p) -> dict:
    """Entropy of g itself (not g^2) against c(p) times the energy.

    Recorded for evidence only, never asserted: whether the inequality in
    this literal form holds for every nonnegative g is left open here. The
    squared form above is the one the package guarantees.
    """
    n, v = _as_values(g)
    if (v < 0).any():
        raise ValueError("literal form needs a nonnegative function")
    pv = bias_value(p)
    lhs = entropy(g, pv)
    rhs = log_sobolev_constant(pv) * dirichlet_energy(g, pv)
    return {
        "n": n,
        "p": pv,
        "lhs": lhs,
        "rhs": rhs,
        "holds": bool(lhs <= rhs + 1e-12),
    }


def _two_point_ratio(y: float, p: float) -> float:
    # Ent(g^2) / energy(g) on {0,1} with g(0) = 1, g(1) = y > 0.
    # Writing s = y^2 - 1, the entropy is p*phi(s) - phi(p*s) with
    # phi(x) = (1+x)log(1+x). Near y = 1 that difference cancels to
    # O(s^2) while each term is O(s), so the direct form is hopeless
    # there; expanding phi gives a series in s whose k-th coefficient
    # is (1 - p^(k-1))/(k(k+1)), used below the switch point.
    s = (y - 1.0) * (y + 1.0)
    q = 1.0 - p
    if abs(s) < 1e-3:
        acc = q / 2.0
        sign, sk = -1.0, s
        for k in range(2, 7):
            acc += sign * (1.0 - p**k) * sk / (k * (k + 1.0))
            sign, sk = -sign, sk * s
        return (y + 1.0) ** 2 * acc / q
    ent = p * (1.0 + s) * math.log1p(s) - (1.0 + p * s) * math.log1p(p * s)
    return ent / (p * q * (y - 1.0) ** 2)


def log_sobolev_tightness_two_point(p) -> float:
    """Best Ent(g^2)/energy ratio found on the two-point space.

    One free parameter after normalization: g(0) = 1, g(1) = y. A log grid
    over y plus a golden-section refinement around the grid argmax. The
    result approaches the log-Sobolev constant from below; at p = 1/2 the
    optimum sits in the y -> 1 limit, so the grid carries near-1 points.
    """
    pv = bias_value(p)
    ys = np.exp(np.linspace(math.log(1e-4), math.log(1e4), 2049))
    near_one = [1.0 - 10.0**-k for k in range(1, 7)]
    near_one += [1.0 + 10.0**-k for k in range(1, 7)]
    ys = np.unique(np.concatenate([ys, [1.0], near_one]))
    ratios = np.array([_two_point_ratio(float(y), pv) for y in ys])
    best = int(ratios.argmax())
    sup = float(ratios[best])

    lo = math.log(ys[max(best - 1, 0)])
    hi = math.log(ys[min(best + 1, len(ys) - 1)])
    refined = supremum_on_interval(
        lambda t: _two_point_ratio(math.exp(t), pv), lo, hi, grid_points=64
    )
    return max(sup, refined)


def poincare_check(g, p, tol: float = 1e-12) -> BoundReport:
    """Variance <= Dirichlet energy."""
    pv = bias_value(p)
    n, _ = _as_values(g)
    return checked("poincare", variance(g, pv), dirichlet_energy(g, pv), "le", tol, n=n, p=pv)


def max_influence_bound_check(f: BooleanFunction, p, tol: float = 1e-12) -> BoundReport:
    """Largest influence >= Var(f) * rate / (n p(1-p) c(p)).

    The context carries the two internal quantities the proof pivots on:
    the summed and the largest squared centered-difference norms, which for
    Boolean f are p(1-p) times total and maximal influence.
    """
    if f.n < 2:
        raise ValueError("influence bound needs arity at least 2")
    pv = bias_value(p)
    infl = influences(f, pv)
    lhs = float(infl.max())
    var = variance(f, pv)
    rate = rate_value(f.n)
    rhs = var * rate.value / (f.n * pv * (1.0 - pv) * log_sobolev_constant(pv))
    pq = pv * (1.0 - pv)
    return checked(
        "max_influence_lower_bound",
        lhs,
        rhs,
        "ge",
        tol,
        n=f.n,
        p=pv,
        variance=var,
        rate=rate.value,
        center_norm_sq_sum=pq * float(infl.sum()),
        center_norm_sq_max=pq * lhs,
    )


def max_influence_bound_scan(tables, n: int, p, tol: float = 1e-12) -> BoundReport:
    """Same bound checked over a whole batch of Boolean tables at once.

    ``tables`` is a (count, 2**n) 0/1 array. The report's lhs/rhs are the
    worst instance's; the context counts failures.
    """
    if n < 2:
        raise ValueError("influence bound needs arity at least 2")
    pv = bias_value(p)
    tables = np.ascontiguousarray(np.asarray(tables, dtype=np.uint8))
    infl = batch_influences(tables, n, weights(n - 1, pv))
    lhs = infl.max(axis=1)
    mu = tables.astype(np.float64) @ weights(n, pv)
    var = np.maximum(mu - mu * mu, 0.0)  # E f^2 = E f for 0/1 values
    scale = rate_value(n).value / (n * pv * (1.0 - pv) * log_sobolev_constant(pv))
    rhs = var * scale
    slack = lhs - rhs
    worst = int(slack.argmin())
    failures = int((slack < -tol).sum())
    return BoundReport(
        "max_influence_lower_bound_scan",
        lhs=float(lhs[worst]),
        rhs=float(rhs[worst]),
        passed=failures == 0,
        orientation="ge",
        tol=tol,
        context={
            "n": int(n),
            "p": pv,
            "count": int(tables.shape[0]),
            "failures": failures,
            "worst_index": worst,
        },
    )


def _check_set_hypotheses(A: BooleanFunction, gens: PermutationGenerators | None) -> None:
    if A.n < 2:
        raise ValueError("the bound needs arity at least 2")
    if A.is_constant():
        raise ValueError("hypothesis failed: the set is trivial")
    if not is_monotone(A):
        raise ValueError("hypothesis failed: the set is not monotone")
    if gens is None:
        if not is_fully_symmetric(A):
            raise ValueError(
                "hypothesis failed: not invariant under all coordinate "
                "permutations and no generators were supplied"
            )
    else:
        if not is_invariant(A, gens):
            raise ValueError("hypothesis failed: not invariant under the supplied generators")
        if not is_transitive(gens):
            raise ValueError("hypothesis failed: the supplied generators do not act transitively")


def derivative_bound_check(
    A: BooleanFunction,
    p,
    gens: PermutationGenerators | None = None,
    tol: float = 1e-12,
) -> BoundReport:
    """Russo derivative >= rate/(p(1-p)c(p)) * mu(1-mu) for symmetric monotone sets.

    Without ``gens`` the set must be invariant under every coordinate
    permutation; with ``gens`` it must be invariant under them and the
    generated group must act transitively on coordinates. A failed
    hypothesis raises and names itself: the bound is simply not claimed
    there.
    """
    _check_set_hypotheses(A, gens)
    pv = bias_value(p)
    mu = expectation(A, pv)
    lhs = expectation_derivative(A, pv)
    rate = rate_value(A.n)
    rhs = rate.value / (pv * (1.0 - pv) * log_sobolev_constant(pv)) * mu * (1.0 - mu)
    return checked(
        "derivative_lower_bound", lhs, rhs, "ge", tol, n=A.n, p=pv, mu=mu, rate=rate.value
    )


def derivative_bound_rhs(n: int, p, mu: float) -> float:
    """Right-hand side of the derivative bound, for sweep output."""
    pv = bias_value(p)
    return rate_value(n).value / (pv * (1.0 - pv) * log_sobolev_constant(pv)) * mu * (1.0 - mu)


def width_bound_check(
    target,
    eps: float,
    gens: PermutationGenerators | None = None,
    tol: float = 1e-9,
) -> tuple[BoundReport, BoundReport]:
    """Threshold width against its two closed-form ceilings.

    The tighter one multiplies 2 log((1-eps)/eps)/rate by the supremum of
    p(1-p)c(p) over the bracket the threshold itself occupies. Integrating
    the derivative bound from p(eps) to p(1-eps) turns the log-odds of each
    endpoint into that combined log term, with the supremum pulled out of
    the integral; the factor 2 is log((1-eps)^2/eps^2) collapsing. The
    simpler ceiling is log((1-eps)/eps)/rate outright, which follows from
    the first via the 1/2 cap on p(1-p)c(p), so tight <= plain always. That
    cap is re-asserted on a grid and folded into the first report.
    Hypotheses are as in derivative_bound_check; a FamilySpec brings its
    own symmetry evidence, so closed-form families work above the dense
    arity cap.
    """
    if isinstance(target, FamilySpec):
        if gens is not None:
            _check_set_hypotheses(build_family(target), gens)
        else:
            if target.kind not in _MONOTONE_KINDS:
                raise ValueError("hypothesis failed: the family is not monotone")
            mode, _ = family_symmetry(target)
            if mode is None:
                raise ValueError(
                    "hypothesis failed: the family carries no transitive symmetry"
                )
        n = target.arity
    elif isinstance(target, BooleanFunction):
        _check_set_hypotheses(target, gens)
        n = target.n
    else:
        raise TypeError(f"expected a BooleanFunction or FamilySpec, got {type(target).__name__}")

    result = threshold_width(target, eps)
    rate = rate_value(n).value
    log_odds = math.log((1.0 - eps) / eps)
    sup_scaled = supremum_on_interval(
        scaled_log_sobolev_constant, result.p_low, result.p_high
    )
    cap = scan_scaled_constant_cap()

    shared = {
        "n": int(n),
        "eps": float(eps),
        "rate": rate,
        "p_low": result.p_low,
        "p_high": result.p_high,
    }
    tight = checked(
        "width_scaled_constant_bound",
        result.width,
        2.0 * sup_scaled * log_odds / rate,
        "le",
        tol,
        sup_scaled_constant=sup_scaled,
        scaled_cap_ok=cap.passed,
        # A quarter of the asserted bound circulates in print; it fails on
        # small disjunctions, so it is recorded here but never asserted.
        quarter_variant_rhs=sup_scaled * log_odds / (2.0 * rate),
        quarter_variant_holds=bool(
            result.width <= sup_scaled * log_odds / (2.0 * rate) + tol
        ),
        **shared,
    )
    if not cap.passed:
        tight = replace(tight, passed=False)
    plain = checked("width_rate_bound", result.width, log_odds / rate, "le", tol, **shared)
    return tight, plain


def prior_constants_table() -> tuple[dict, ...]:
    """Published constants for the width-versus-log n phenomenon.

    C multiplies log(1/eps)/log n in two-sided forms, C' the one-sided
    log((1-eps)/eps)/log n form. The last row is this package's bound with
    the rate sequence replaced by its log n asymptotic: coefficient exactly
    one. Documentation output only; nothing here is asserted.
    """
    return (
        {"source": "Talagrand 1994", "c": 120.0, "c_prime": None},
        {"source": "via Friedgut-Kalai", "c": 5.66, "c_prime": 7.03},
        {"source": "via BKS 2003", "c": None, "c_prime": 3.0},
        {"source": "rate bound here, asymptotically", "c": None, "c_prime": 1.0},
    )
