"""Local-optimality certificates for greedy couplings.

Every positive assignment in a solver trace contributes one linear
equation over a stacked vector of per-axis witness values: the equation
says the witnesses at the chosen states must add up to ``log2(mass) + 1``.
Because each step exhausts at least one (axis, state) slot that no later
step touches, every row of the resulting 0/1 matrix owns a column whose
last 1 sits in that row, which makes the rows linearly independent and the
system solvable.

A solution turns into a certificate: each stored mass must equal
``2 ** (-1 + sum of witnesses at its indices)``, i.e. the coupling's
nonzero masses factor as a product of per-axis terms. Feasible points with
that product structure satisfy the stationarity (KKT) conditions of
entropy minimization over the coupling polytope, and entropy being concave
they are local minima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import DimensionError, DomainError, SparseCoupling
from .greedy import GreedyStep, GreedyTrace

# Residual and mass-reconstruction tolerance for certificates. Looser than
# the marginal tolerances: masses near EPS_ZERO carry large-magnitude logs
# that amplify rounding in the solve.
EPS_CERT = 1e-8


class CertificationError(RuntimeError):
    """The coupling could not be certified as a local optimum.

    Signals either a tampered coupling/trace pair or numerically
    degenerate input. Diagnostics that were computed before the failure
    are attached when available.
    """

    def __init__(
        self,
        message: str,
        *,
        residual_norm: float | None = None,
        max_reconstruction_error: float | None = None,
        witness: tuple[tuple[float, ...], ...] | None = None,
    ) -> None:
        super().__init__(message)
        self.residual_norm = residual_norm
        self.max_reconstruction_error = max_reconstruction_error
        self.witness = witness


@dataclass(frozen=True)
class CertificateSystem:
    """The linear system built from a trace: one row per positive step.

    ``matrix`` is 0/1 with shape (steps, n*m); the row for a step has ones
    exactly at the flattened (axis, state) slots of its chosen tuple,
    column ``(axis - 1) * n + state - 1``. ``rhs[j]`` is
    ``log2(mass_j) + 1``.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    n: int
    m: int
    tuples: tuple[tuple[int, ...], ...]

    @property
    def num_rows(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class Certificate:
    """Witness vectors proving a coupling's masses factor per axis.

    ``u`` holds one witness vector per axis; ``witnesses`` maps every
    stored cell to its reconstructed mass ``2 ** (-1 + sum of u at the
    cell's states)``. Construction enforces that both the system residual
    and the worst reconstruction error are within ``EPS_CERT``.
    """

    u: tuple[tuple[float, ...], ...]
    residual_norm: float
    witnesses: Mapping[tuple[int, ...], float]
    max_reconstruction_error: float

    def __post_init__(self) -> None:
        if self.residual_norm > EPS_CERT:
            raise DomainError(
                f"certificate residual {self.residual_norm!r} exceeds {EPS_CERT}"
            )
        if self.max_reconstruction_error > EPS_CERT:
            raise DomainError(
                f"reconstruction error {self.max_reconstruction_error!r} exceeds {EPS_CERT}"
            )
        object.__setattr__(self, "witnesses", dict(self.witnesses))

    def factor_vectors(self) -> tuple[tuple[float, ...], ...]:
        """Per-axis factors v_k(i) = 2**(u_k(i) - 1/m).

        Multiplying the factors at a cell's states reproduces its mass,
        an equivalent restatement of the product form.
        """
        m = len(self.u)
        return tuple(
            tuple(2.0 ** (val - 1.0 / m) for val in vec) for vec in self.u
        )

    def to_dict(self) -> dict:
        return {
            "u": [list(vec) for vec in self.u],
            "residual_norm": float(self.residual_norm),
            "max_reconstruction_error": float(self.max_reconstruction_error),
        }


def build_system(
    trace: GreedyTrace | tuple[GreedyStep, ...], n: int, m: int
) -> CertificateSystem:
    """Assemble the witness system for a trace of positive-mass steps.

    The caller must drop zero-mass sweep rounds first (see
    ``GreedyTrace.positive_steps``); a zero or negative mass here is a
    domain error since its log is undefined.
    """
    steps = trace.steps if isinstance(trace, GreedyTrace) else tuple(trace)
    if not steps:
        raise DomainError("cannot build a system from an empty trace")
    matrix = np.zeros((len(steps), n * m), dtype=float)
    rhs = np.empty(len(steps), dtype=float)
    tuples = []
    for row, step in enumerate(steps):
        if step.mass <= 0.0:
            raise DomainError(
                f"step {step.iteration} has non-positive mass {step.mass!r}"
            )
        if len(step.chosen_tuple) != m:
            raise DimensionError(
                f"step tuple {step.chosen_tuple} does not have {m} axes"
            )
        for axis, state in enumerate(step.chosen_tuple):
            if not 1 <= state <= n:
                raise DimensionError(f"state {state} out of range 1..{n}")
            matrix[row, axis * n + state - 1] = 1.0
        rhs[row] = math.log2(step.mass) + 1.0
        tuples.append(step.chosen_tuple)
    return CertificateSystem(matrix, rhs, n, m, tuple(tuples))


def check_last_one_property(system: CertificateSystem) -> bool:
    """True when every row owns a column whose final 1 sits in that row.

    This is the structural consequence of greedy assignment (each step
    permanently exhausts some slot) and implies the rows are linearly
    independent, hence the system is consistent for any right-hand side.
    """
    matrix = system.matrix
    rows = matrix.shape[0]
    for j in range(rows):
        cols = np.flatnonzero(matrix[j])
        if cols.size == 0:
            return False
        if j == rows - 1:
            continue
        if not any(not matrix[j + 1 :, k].any() for k in cols):
            return False
    return True


def _trace_matches_coupling(
    steps: tuple[GreedyStep, ...], coupling: SparseCoupling
) -> bool:
    if len(steps) != coupling.num_entries:
        return False
    for step in steps:
        mass = coupling.entries.get(step.chosen_tuple)
        if mass is None or abs(mass - step.mass) > 1e-12:
            return False
    return True


def certify_local_optimum(
    coupling: SparseCoupling, trace: GreedyTrace
) -> Certificate:
    """Certify a solver output as a local optimum of entropy minimization.

    Solves the witness system by least squares (the system is consistent
    and under- or exactly determined, so the residual is pure rounding)
    and verifies that the witnesses reconstruct every stored mass. Raises
    :class:`CertificationError` when the trace does not match the
    coupling, the structural column property fails, the system residual
    exceeds ``EPS_CERT`` relative to the right-hand side, or any mass
    reconstructs outside ``EPS_CERT``.
    """
    positive = trace.positive_steps()
    if not positive:
        raise CertificationError("trace has no positive-mass steps")
    if not _trace_matches_coupling(positive, coupling):
        raise CertificationError("trace does not match the coupling's entries")
    cards = set(coupling.cardinalities)
    if len(cards) != 1:
        raise DimensionError("certification requires equal cardinalities per axis")
    n = cards.pop()
    m = coupling.num_vars
    system = build_system(positive, n, m)
    if not check_last_one_property(system):
        raise CertificationError(
            "trace lacks the exhausted-slot structure; rows may be dependent"
        )
    solution, *_ = np.linalg.lstsq(system.matrix, system.rhs, rcond=None)
    raw_residual = float(np.linalg.norm(system.matrix @ solution - system.rhs))
    residual = raw_residual / max(1.0, float(np.linalg.norm(system.rhs)))
    witness = tuple(
        tuple(float(v) for v in solution[axis * n : (axis + 1) * n])
        for axis in range(m)
    )
    if residual > EPS_CERT:
        raise CertificationError(
            f"witness system residual {residual:.3e} exceeds {EPS_CERT}",
            residual_norm=residual,
            witness=witness,
        )
    witnesses: dict[tuple[int, ...], float] = {}
    worst = 0.0
    for tup, mass in coupling.entries.items():
        exponent = -1.0 + sum(witness[axis][state - 1] for axis, state in enumerate(tup))
        rebuilt = 2.0 ** exponent
        witnesses[tup] = rebuilt
        worst = max(worst, abs(rebuilt - mass))
    if worst > EPS_CERT:
        raise CertificationError(
            f"mass reconstruction error {worst:.3e} exceeds {EPS_CERT}",
            residual_norm=residual,
            max_reconstruction_error=worst,
            witness=witness,
        )
    return Certificate(witness, residual, witnesses, worst)
