"""Brute-force stationary solve on K and the truncated joint distribution.

``solve_theta_exact`` is the oracle every other route is checked against:
it solves the balance equations of the reduced generator directly by
linear algebra and verifies its own residual.  ``solve_pi_truncated``
assembles the product-form joint distribution on a finite queue window.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ErgodicityError, PreconditionError, ReducibilityError, SolverError
from .generator import ReducedGenerator, build_reduced_generator
from .model import InventoryState, NetworkConfig

__all__ = ["ThetaMeasure", "PiWindow", "solve_theta_exact", "solve_pi_truncated"]

# Residual tolerance relative to the largest rate magnitude, and the
# positivity floor below which a solve is declared failed.
RESIDUAL_RTOL = 1e-12
POSITIVITY_FLOOR = 1e-14

PROVENANCES = ("exact", "closed_form", "recursive", "empirical")


@dataclass(frozen=True)
class ThetaMeasure:
    """A positive measure on the canonical inventory state space.

    ``weights[i]`` belongs to ``states[i]``.  Analytic provenances carry
    strictly positive weights; empirical measures may put zero mass on
    states a finite run never visited.
    """

    states: tuple[InventoryState, ...]
    weights: np.ndarray
    normalized: bool
    provenance: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if w.shape != (len(self.states),):
            raise ValueError("one weight per state required")
        if not np.all(np.isfinite(w)):
            raise SolverError("non-finite weights")
        if self.provenance == "empirical":
            if w.min() < 0:
                raise SolverError("empirical weights must be non-negative")
        elif w.min() <= 0:
            raise SolverError("stationary weights must be strictly positive")
        if self.normalized and abs(w.sum() - 1.0) > 1e-12:
            raise SolverError("normalized measure must sum to one")

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {s.k: float(w) for s, w in zip(self.states, self.weights)}

    def weight_of(self, k) -> float:
        key = k.k if isinstance(k, InventoryState) else tuple(k)
        for s, w in zip(self.states, self.weights):
            if s.k == key:
                return float(w)
        raise KeyError(key)


def _diagnose_failure(gen: ReducedGenerator, detail: str) -> Exception:
    # Distinguish a reducible chain (null space dimension > 1) from a
    # plain numerical breakdown.
    off = gen.rates.copy()
    np.fill_diagonal(off, 0.0)
    rows, cols = np.nonzero(off > 0)
    graph = coo_matrix((off[rows, cols], (rows, cols)), shape=off.shape)
    ncomp, _ = connected_components(graph, directed=True, connection="strong")
    if ncomp != 1:
        return ReducibilityError(
            f"stationary solve failed: {ncomp} strongly connected components, "
            "null space dimension exceeds one"
        )
    return SolverError(f"stationary solve failed: {detail}")


def solve_theta_exact(gen: ReducedGenerator) -> ThetaMeasure:
    """Solve ``theta . Q_red = 0``, normalize, and verify the residual.

    One balance equation of an irreducible generator is a linear
    combination (with all-nonzero coefficients) of the others, so the last
    one is replaced by the normalization constraint and the square system
    is LU-solved.  The residual is then checked against the *full*
    generator at ``1e-12`` relative to the largest rate, and every weight
    must clear the positivity floor; on failure the generator graph is
    examined to raise the precise error.
    """
    Q = gen.rates
    n = gen.size
    M = Q.T.copy()
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        theta = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise _diagnose_failure(gen, f"anchored system singular ({exc})") from exc

    total = theta.sum()
    if not np.isfinite(total) or total <= 0:
        raise _diagnose_failure(gen, "normalization is singular")
    theta = theta / total

    scale = max(np.abs(Q).max(), 1.0)
    residual = np.abs(theta @ Q).max()
    if residual > RESIDUAL_RTOL * scale:
        raise _diagnose_failure(
            gen, f"balance residual {residual:.3e} exceeds {RESIDUAL_RTOL * scale:.3e}"
        )
    if theta.min() <= POSITIVITY_FLOOR:
        raise _diagnose_failure(
            gen, f"weight {theta.min():.3e} at or below positivity floor"
        )
    return ThetaMeasure(states=gen.states, weights=theta, normalized=True, provenance="exact")


@dataclass(frozen=True)
class PiWindow:
    """Product-form joint distribution on a finite queue window.

    ``pi[n_1, ..., n_J, s]`` is the stationary probability of queue vector
    ``n`` and inventory state ``states[s]``; ``window_mass`` is the total
    probability the window captures (computed analytically from the
    geometric queue tails, so it is exact, not a sum of the array).
    """

    states: tuple[InventoryState, ...]
    caps: tuple[int, ...]
    pi: np.ndarray
    window_mass: float
    theta: ThetaMeasure
    queue_weights: tuple[np.ndarray, ...] = field(repr=False, default=())


def solve_pi_truncated(config: NetworkConfig, n_max) -> PiWindow:
    """Joint stationary probabilities for all ``n <= n_max`` componentwise.

    ``n_max`` may be a single cap applied to every location or one cap per
    location.  Requires an ergodic configuration.
    """
    from .analysis import ergodicity_check, queue_marginal

    report = ergodicity_check(config)
    if not report.ergodic:
        bad = [d.location for d in report.per_location if not d.ergodic]
        raise ErgodicityError(f"configuration is not ergodic (locations {bad})")

    if np.isscalar(n_max):
        caps = (int(n_max),) * config.J
    else:
        caps = tuple(int(x) for x in n_max)
        if len(caps) != config.J:
            raise PreconditionError("one queue cap per location required")
    if any(c < 0 for c in caps):
        raise PreconditionError("queue caps must be non-negative")

    theta = solve_theta_exact(build_reduced_generator(config))
    marginals = [queue_marginal(config, j) for j in range(1, config.J + 1)]

    xi_vecs = [np.array([m.xi(n) for n in range(cap + 1)]) for m, cap in zip(marginals, caps)]
    queue_part = xi_vecs[0]
    for vec in xi_vecs[1:]:
        queue_part = np.multiply.outer(queue_part, vec)
    pi = np.multiply.outer(queue_part, theta.weights)

    window_mass = 1.0
    for m, cap in zip(marginals, caps):
        window_mass *= m.cdf(cap)

    return PiWindow(
        states=theta.states,
        caps=caps,
        pi=pi,
        window_mass=float(window_mass),
        theta=theta,
        queue_weights=tuple(xi_vecs),
    )
