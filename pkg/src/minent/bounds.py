"""Additive approximation bounds for the greedy coupling solvers.

After sorting every marginal in decreasing order, the pointwise minimum
``p_min`` is what the two-phase solver consumes in its sweep phase; what
remains of marginal j is the residual vector ``l_j``. All residuals share
the same total ``T``, and the coupling entropy achieved by the solver sits
within an additive ``slack`` of the unknown optimum:

    slack = 1 - (m - 1) * T * log2(1/T) + sum_j h(l_j) - max_j h(l_j)

with ``h`` the extended entropy and ``T log2(1/T) = 0`` at ``T = 0``. For
two marginals this reduces to ``1 - T*log2(1/T) + min(h(l_1), h(l_2))``
and ``T`` coincides with the total variation distance between the sorted
marginals. The slack is also valid over ``max_j H(X_j)``, which is itself
a lower bound on the optimum, so a report brackets the achieved entropy
without knowing the optimum.

The module also provides the scaled outer product of the residuals, whose
entropy meets the independence bound with equality; that identity is what
caps the second phase's entropy contribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .core import (
    EPS_SUM,
    EPS_ZERO,
    DimensionError,
    DomainError,
    Marginal,
    ResidualVector,
    extended_entropy,
    sort_decreasing,
    total_variation_sorted,
)


@dataclass(frozen=True)
class BoundReport:
    """Approximation bracket for a set of marginals.

    ``lower_bound`` is ``max_j H(X_j)``; ``upper_bound`` is
    ``lower_bound + slack``. ``achieved`` is a solver's coupling entropy
    when one was run. ``residual_entropies[j]`` is ``h(l_j)`` and every
    residual totals ``residual_total``.
    """

    m: int
    sorted_marginals: tuple[Marginal, ...]
    pointwise_min: ResidualVector
    residuals: tuple[ResidualVector, ...]
    residual_total: float
    residual_entropies: tuple[float, ...]
    lower_bound: float
    slack: float
    upper_bound: float
    achieved: float | None = None

    def to_dict(self) -> dict:
        out = {
            "m": self.m,
            "sorted_marginals": [list(p.probs) for p in self.sorted_marginals],
            "pointwise_min": list(self.pointwise_min.masses),
            "residuals": [list(r.masses) for r in self.residuals],
            "residual_total": float(self.residual_total),
            "residual_entropies": [float(h) for h in self.residual_entropies],
            "lower_bound": float(self.lower_bound),
            "slack": float(self.slack),
            "upper_bound": float(self.upper_bound),
            "achieved": None if self.achieved is None else float(self.achieved),
        }
        return out


def _entropy_of_spread(t: float) -> float:
    """t * log2(1/t), extended by continuity to 0 at t = 0."""
    if t <= 0.0:
        return 0.0
    return -t * math.log2(t)


def bound_report(
    marginals: Sequence[Marginal | Iterable[float]],
    achieved: float | None = None,
) -> BoundReport:
    """Compute the additive approximation bracket for the given marginals.

    ``achieved`` (a solver's coupling entropy) is carried through into the
    report when supplied.
    """
    ms = [p if isinstance(p, Marginal) else Marginal.of(p) for p in marginals]
    if len(ms) < 2:
        raise DomainError("need at least two marginals for a bound report")
    n = len(ms[0])
    if any(len(p) != n for p in ms):
        raise DimensionError(f"marginal lengths differ: {[len(p) for p in ms]}")
    m = len(ms)
    sorted_ms = tuple(sort_decreasing(p)[0] for p in ms)
    arr = np.array([p.probs for p in sorted_ms], dtype=float)
    pmin = arr.min(axis=0)
    residuals = tuple(
        ResidualVector.of(arr[j] - pmin) for j in range(m)
    )
    total = residuals[0].total
    spread = max(r.total for r in residuals) - min(r.total for r in residuals)
    if spread > EPS_SUM:
        raise RuntimeError(f"residual totals diverged by {spread!r}")
    if m == 2:
        tv = total_variation_sorted(ms[0], ms[1])
        if abs(total - tv) > EPS_SUM:
            raise RuntimeError(
                f"residual total {total!r} disagrees with total variation {tv!r}"
            )
    h_res = tuple(extended_entropy(r) for r in residuals)
    lower = max(extended_entropy(p) for p in sorted_ms)
    slack = (
        1.0
        - (m - 1) * _entropy_of_spread(total)
        + math.fsum(h_res)
        - max(h_res)
    )
    return BoundReport(
        m=m,
        sorted_marginals=sorted_ms,
        pointwise_min=ResidualVector.of(pmin),
        residuals=residuals,
        residual_total=total,
        residual_entropies=h_res,
        lower_bound=lower,
        slack=slack,
        upper_bound=lower + slack,
        achieved=achieved,
    )


def _coerce_residuals(
    residuals: Sequence[ResidualVector | Iterable[float]],
) -> tuple[ResidualVector, ...]:
    rs = tuple(
        r if isinstance(r, ResidualVector) else ResidualVector.of(r)
        for r in residuals
    )
    if len(rs) < 2:
        raise DomainError("need at least two residual vectors")
    n = len(rs[0])
    if any(len(r) != n for r in rs):
        raise DimensionError(f"residual lengths differ: {[len(r) for r in rs]}")
    total = rs[0].total
    for r in rs[1:]:
        if abs(r.total - total) > EPS_SUM:
            raise DomainError(
                f"residual totals differ: {r.total!r} vs {total!r}"
            )
    return rs


def outer_product_coupling(
    residuals: Sequence[ResidualVector | Iterable[float]],
) -> dict[tuple[int, ...], float]:
    """Scaled outer product of residuals sharing a common total T.

    Returns the tensor ``R(i_1..i_m) = prod_j l_j(i_j) / T**(m-1)`` as a
    sparse map with 1-based index tuples; its axis-j marginal is exactly
    ``l_j``. A zero total is degenerate and yields an empty map.
    """
    rs = _coerce_residuals(residuals)
    total = rs[0].total
    if total <= EPS_ZERO:
        return {}
    m = len(rs)
    scale = total ** (m - 1)
    supports = [
        [(i, v) for i, v in enumerate(r.masses) if v > 0.0] for r in rs
    ]
    out: dict[tuple[int, ...], float] = {}
    for combo in product(*supports):
        mass = 1.0
        for _, v in combo:
            mass *= v
        out[tuple(i + 1 for i, _ in combo)] = mass / scale
    return out


def outer_product_entropy_identity(
    residuals: Sequence[ResidualVector | Iterable[float]],
) -> tuple[float, float]:
    """Both sides of the outer-product entropy identity.

    Returns ``(lhs, rhs)`` where ``lhs`` is the extended entropy of the
    scaled outer product and ``rhs = sum_j h(l_j) + (m-1)*T*log2(T)``. The
    two agree up to rounding; the identity is the equality case of the
    independence bound on the second phase's entropy contribution.
    """
    rs = _coerce_residuals(residuals)
    total = rs[0].total
    lhs = extended_entropy(outer_product_coupling(rs))
    if total <= EPS_ZERO:
        return lhs, 0.0
    m = len(rs)
    rhs = math.fsum(extended_entropy(r) for r in rs) + (m - 1) * total * math.log2(
        total
    )
    return lhs, rhs


def special_family(
    n: int, alpha: float
) -> tuple[Marginal, Marginal, float, float]:
    """The uniform-versus-two-level family with closed-form entropies.

    The first marginal is uniform over n states (n even); the second puts
    ``alpha/n`` on the first half of the states and ``(2-alpha)/n`` on the
    rest, for ``1 < alpha < 2``. Returns both marginals plus the predicted
    two-phase coupling entropy

        log2(n) - ((alpha-1)/2) log2(alpha-1) - ((2-alpha)/2) log2(2-alpha)

    and the second marginal's entropy

        log2(n) - (alpha/2) log2(alpha) - ((2-alpha)/2) log2(2-alpha).

    The gap between them stays below one bit for the whole family even
    though the slack term ``min_j h(l_j)`` grows like log2(n), which makes
    this family the standard looseness exhibit for the additive bound.
    """
    if n < 2 or n % 2 != 0:
        raise DomainError(f"n must be even and at least 2, got {n}")
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie strictly between 1 and 2, got {alpha}")
    uniform = Marginal.of([1.0 / n] * n)
    half = n // 2
    skewed = Marginal.of([alpha / n] * half + [(2.0 - alpha) / n] * half)
    log_n = math.log2(n)
    predicted_coupling = (
        log_n
        - (alpha - 1.0) / 2.0 * math.log2(alpha - 1.0)
        - (2.0 - alpha) / 2.0 * math.log2(2.0 - alpha)
    )
    predicted_second = (
        log_n
        - alpha / 2.0 * math.log2(alpha)
        - (2.0 - alpha) / 2.0 * math.log2(2.0 - alpha)
    )
    return uniform, skewed, predicted_coupling, predicted_second
