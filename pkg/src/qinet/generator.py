"""Transition structure: reduced generator on K and the full joint dynamics.

The inventory-replenishment subsystem alone is a finite continuous-time
Markov chain on the state space K.  Its generator ("reduced generator")
has two transition families:

* consumption  ``k -> k - e_i + e_{J+1}`` at rate ``lam_i`` while ``k_i > 0``,
* replenishment ``k -> k + e_i - e_{J+1}`` at rate ``nu * p_i(k)`` while
  ``k_i < b_i``,

plus, when the two-location transfer channel is enabled, lateral moves
``k -> k - e_i + e_j`` at rate ``beta`` whenever ``k_i - k_j >= 2``.

``full_transitions`` exposes the complete joint dynamics (queues included)
for the event-driven simulator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, ReducibilityError
from .model import (
    FullState,
    InventoryState,
    NetworkConfig,
    enumerate_inventory_states,
    routing_probs,
)

__all__ = ["ReducedGenerator", "build_reduced_generator", "full_transitions"]

# Conservativeness tolerance for row sums, relative to the largest rate.
ROW_SUM_RTOL = 1e-12


@dataclass(frozen=True)
class ReducedGenerator:
    """Dense rate matrix over the canonical inventory state space.

    ``rates[r, c]`` is the transition rate from ``states[r]`` to
    ``states[c]``; diagonal entries are the negated row sums.  Strong
    connectivity of the positive-rate graph is verified by
    :func:`build_reduced_generator`, not here, so that solver error paths
    stay testable on hand-built instances.
    """

    states: tuple[InventoryState, ...]
    rates: np.ndarray
    index: dict[tuple[int, ...], int] = field(repr=False, default=None)

    def __post_init__(self):
        n = len(self.states)
        if self.rates.shape != (n, n):
            raise ConfigError("rate matrix shape must match the state count")
        off = self.rates.copy()
        np.fill_diagonal(off, 0.0)
        if off.min() < 0:
            raise ConfigError("off-diagonal rates must be non-negative")
        if not np.all(np.isfinite(self.rates)):
            raise ConfigError("rates must be finite")
        scale = max(np.abs(self.rates).max(), 1.0)
        rows = np.abs(self.rates.sum(axis=1))
        if rows.max() > ROW_SUM_RTOL * scale:
            raise ConfigError("generator rows must sum to zero")
        if self.index is None:
            object.__setattr__(
                self, "index", {s.k: i for i, s in enumerate(self.states)}
            )

    @property
    def size(self) -> int:
        return len(self.states)

    def index_of(self, k) -> int:
        key = k.k if isinstance(k, InventoryState) else tuple(k)
        return self.index[key]


def _transition_arrays(config: NetworkConfig, levels: np.ndarray):
    """COO arrays (rows, cols, rates) of all off-diagonal transitions.

    ``levels`` holds the on-hand part of every canonical state, one row per
    state; the lexicographic order makes the target index of a unit move
    plain stride arithmetic.
    """
    b = np.asarray(config.b)
    J = config.J
    strides = np.ones(J, dtype=np.int64)
    for j in range(J - 2, -1, -1):
        strides[j] = strides[j + 1] * (b[j + 1] + 1)
    idx = levels @ strides

    deficits = b[None, :] - levels
    top = deficits.max(axis=1)
    winners = deficits == top[:, None]
    probs = winners / winners.sum(axis=1, keepdims=True)

    rows, cols, rates = [], [], []
    for i in range(J):
        down = levels[:, i] > 0
        rows.append(idx[down])
        cols.append(idx[down] - strides[i])
        rates.append(np.full(int(down.sum()), config.lam[i]))

        up = deficits[:, i] > 0
        active = up & (probs[:, i] > 0)
        rows.append(idx[active])
        cols.append(idx[active] + strides[i])
        rates.append(config.nu * probs[active, i])

    if config.has_transfer:
        # Two homogeneous locations only (enforced by NetworkConfig): the
        # channel drains the richer location while the gap is >= 2.
        beta = config.transfer_beta
        for i, j in ((0, 1), (1, 0)):
            gap = levels[:, i] - levels[:, j] >= 2
            rows.append(idx[gap])
            cols.append(idx[gap] - strides[i] + strides[j])
            rates.append(np.full(int(gap.sum()), beta))

    return np.concatenate(rows), np.concatenate(cols), np.concatenate(rates)


def _assert_strongly_connected(n: int, rows, cols, rates) -> None:
    graph = coo_matrix((rates, (rows, cols)), shape=(n, n))
    ncomp, _ = connected_components(graph, directed=True, connection="strong")
    if ncomp != 1:
        raise ReducibilityError(
            f"transition graph splits into {ncomp} strongly connected components; "
            "the policy/config pair does not define an irreducible chain on K"
        )


def build_reduced_generator(config: NetworkConfig) -> ReducedGenerator:
    """Build and verify the reduced generator for ``config``.

    Raises :class:`ReducibilityError` if the positive-rate graph is not
    strongly connected (cannot happen for valid configs, but it is checked,
    not assumed).
    """
    states = enumerate_inventory_states(config.b)
    levels = np.array([s.on_hand for s in states], dtype=np.int64)
    n = len(states)
    rows, cols, rates = _transition_arrays(config, levels)
    _assert_strongly_connected(n, rows, cols, rates)

    Q = np.zeros((n, n))
    np.add.at(Q, (rows, cols), rates)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return ReducedGenerator(states=states, rates=Q)


def full_transitions(config: NetworkConfig, s: FullState) -> list[tuple[FullState, float]]:
    """Positive-rate transitions out of a joint state ``(n, k)``.

    Three families: arrivals (admitted only while local stock is on hand,
    otherwise the customer is lost), services (need a customer and a unit
    of stock; completing one consumes the unit and places a supplier
    order), and replenishments routed by deficit priority.  The transfer
    family is appended when the channel is enabled.
    """
    s.k.validate(config.b)
    J = config.J
    n, k = s.n, s.k.k
    out: list[tuple[FullState, float]] = []

    for i in range(J):
        if k[i] > 0:
            target = FullState(n[:i] + (n[i] + 1,) + n[i + 1:], s.k)
            out.append((target, config.lam[i]))

    for i in range(J):
        if n[i] > 0 and k[i] > 0:
            new_k = list(k)
            new_k[i] -= 1
            new_k[-1] += 1
            target = FullState(
                n[:i] + (n[i] - 1,) + n[i + 1:], InventoryState(tuple(new_k))
            )
            out.append((target, config.mu[i].rate(n[i])))

    probs = routing_probs(s.k, config.b)
    for i in range(J):
        if k[i] < config.b[i] and probs[i] > 0:
            new_k = list(k)
            new_k[i] += 1
            new_k[-1] -= 1
            out.append((FullState(n, InventoryState(tuple(new_k))), config.nu * probs[i]))

    if config.has_transfer:
        for i, j in ((0, 1), (1, 0)):
            if k[i] - k[j] >= 2:
                new_k = list(k)
                new_k[i] -= 1
                new_k[j] += 1
                out.append((FullState(n, InventoryState(tuple(new_k))), config.transfer_beta))

    return out
