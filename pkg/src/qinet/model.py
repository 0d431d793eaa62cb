"""Network parameters, inventory state space and the replenishment routing policy.

A network has J > 1 locations, each a single-server make-to-order queue fed
from a local inventory, plus one shared supplier (treated as workstation
J+1) that rebuilds the inventories one item at a time.  Inventory at
location j is run under a base-stock policy with level ``b[j]``: every
consumed item immediately places one replenishment order, so on-hand stock
plus outstanding orders is constant.

The supplier routes each finished item to the location(s) with the largest
inventory deficit ``b_j - k_j`` (strict priority, ties split uniformly).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ConfigError, PreconditionError

__all__ = [
    "ServiceRateProfile",
    "NetworkConfig",
    "InventoryState",
    "FullState",
    "enumerate_inventory_states",
    "routing_prob",
    "routing_probs",
]


@dataclass(frozen=True)
class ServiceRateProfile:
    """Queue-length dependent service rates with an eventually constant tail.

    ``rate(n)`` is ``head[n-1]`` for ``1 <= n <= len(head)`` and ``tail``
    for every larger n, so the profile is total on n >= 1.  The constant
    tail is what makes the stability check and the queue normalization
    constant computable in closed form.
    """

    head: tuple[float, ...]
    tail: float

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(float(r) for r in self.head))
        object.__setattr__(self, "tail", float(self.tail))
        if any(r <= 0 for r in self.head) or self.tail <= 0:
            raise ConfigError("service rates must be strictly positive")

    @classmethod
    def constant(cls, rate: float) -> "ServiceRateProfile":
        return cls(head=(), tail=rate)

    def rate(self, n: int) -> float:
        """Service intensity with n >= 1 customers present."""
        if n < 1:
            raise ValueError(f"service rate undefined for n={n}")
        if n <= len(self.head):
            return self.head[n - 1]
        return self.tail


@dataclass(frozen=True)
class NetworkConfig:
    """All model parameters of one network instance.

    Parameters
    ----------
    lam : arrival rate per location (Poisson demand), strictly positive.
    mu : one :class:`ServiceRateProfile` per location.
    b : base-stock level per location, each >= 1.
    nu : service rate of the shared supplier, strictly positive.
    transfer_beta : optional lateral transfer rate between two locations,
        active while their stock levels differ by at least two.  Only
        meaningful for the two-location homogeneous extension, hence the
        J == 2, b1 == b2, lam1 == lam2 restriction.
    """

    lam: tuple[float, ...]
    mu: tuple[ServiceRateProfile, ...]
    b: tuple[int, ...]
    nu: float
    transfer_beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(float(x) for x in self.lam))
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "nu", float(self.nu))
        J = len(self.b)
        if J <= 1:
            raise ConfigError("a network needs J > 1 locations")
        if len(self.lam) != J or len(self.mu) != J:
            raise ConfigError("lam, mu and b must all have length J")
        if any(x <= 0 for x in self.lam):
            raise ConfigError("arrival rates must be strictly positive")
        if not all(isinstance(p, ServiceRateProfile) for p in self.mu):
            raise ConfigError("mu entries must be ServiceRateProfile instances")
        if any(x < 1 for x in self.b):
            raise ConfigError("base-stock levels must be >= 1")
        if self.nu <= 0:
            raise ConfigError("supplier rate nu must be strictly positive")
        if self.transfer_beta is not None:
            object.__setattr__(self, "transfer_beta", float(self.transfer_beta))
            if self.transfer_beta < 0:
                raise ConfigError("transfer_beta must be non-negative")
            if J != 2 or self.b[0] != self.b[1] or self.lam[0] != self.lam[1]:
                raise ConfigError(
                    "transfer channel requires two homogeneous locations "
                    "(J == 2, equal base stocks, equal arrival rates)"
                )

    @property
    def J(self) -> int:
        return len(self.b)

    @property
    def has_transfer(self) -> bool:
        return self.transfer_beta is not None and self.transfer_beta > 0

    def is_homogeneous(self) -> bool:
        """Equal base stocks and equal arrival rates (service rates are free)."""
        return len(set(self.b)) == 1 and len(set(self.lam)) == 1


@dataclass(frozen=True)
class InventoryState:
    """Joint inventory/supplier state ``(k_1, ..., k_J, k_{J+1})``.

    The last coordinate counts outstanding replenishment orders at the
    supplier and is redundant: ``k_{J+1} = sum_j (b_j - k_j)``.  It is kept
    explicit because the dynamics read more directly off it.
    """

    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if any(x < 0 for x in self.k):
            raise ConfigError("inventory coordinates must be non-negative")

    @classmethod
    def from_on_hand(cls, on_hand, b) -> "InventoryState":
        on_hand = tuple(int(x) for x in on_hand)
        b = tuple(int(x) for x in b)
        if len(on_hand) != len(b):
            raise ConfigError("on_hand and b must have equal length")
        if any(not 0 <= k <= bj for k, bj in zip(on_hand, b)):
            raise ConfigError("on-hand levels must satisfy 0 <= k_j <= b_j")
        return cls(on_hand + (sum(b) - sum(on_hand),))

    @property
    def on_hand(self) -> tuple[int, ...]:
        return self.k[:-1]

    @property
    def outstanding(self) -> int:
        return self.k[-1]

    def validate(self, b) -> None:
        b = tuple(b)
        if len(self.k) != len(b) + 1:
            raise ConfigError("state length must be J + 1")
        if any(not 0 <= kj <= bj for kj, bj in zip(self.on_hand, b)):
            raise ConfigError("0 <= k_j <= b_j violated")
        if self.outstanding != sum(b) - sum(self.on_hand):
            raise ConfigError("supplier coordinate must equal the total deficit")


@dataclass(frozen=True)
class FullState:
    """Joint state: queue lengths ``n`` plus inventory state ``k``."""

    n: tuple[int, ...]
    k: InventoryState

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if any(x < 0 for x in self.n):
            raise ConfigError("queue lengths must be non-negative")
        if len(self.n) != len(self.k.k) - 1:
            raise ConfigError("queue vector length must match the location count")


def enumerate_inventory_states(b) -> tuple[InventoryState, ...]:
    """All inventory states for base-stock vector b, in canonical order.

    Canonical order is lexicographic on ``(k_1, ..., k_J)``; every matrix
    and measure in the package indexes the state space this way.  Returns
    exactly ``prod_j (b_j + 1)`` states.
    """
    b = tuple(int(x) for x in b)
    if not b or any(x < 1 for x in b):
        raise ConfigError("base-stock levels must be a non-empty list of integers >= 1")
    total = sum(b)
    states = []
    for on_hand in itertools.product(*(range(bj + 1) for bj in b)):
        states.append(InventoryState(on_hand + (total - sum(on_hand),)))
    return tuple(states)


def _argmax_deficit(on_hand, b) -> list[int]:
    deficits = [bj - kj for kj, bj in zip(on_hand, b)]
    top = max(deficits)
    return [j for j, d in enumerate(deficits) if d == top]


def routing_prob(k: InventoryState, i: int, b) -> float:
    """Probability that a finished item is routed to location i (1-based).

    The item goes to the location(s) with the largest deficit ``b_j - k_j``;
    a tie among m locations gives each probability 1/m.  When every
    inventory is full the deficits tie at zero and the uniform value 1/J is
    returned; transitions guard replenishment with ``k_i < b_i``, so that
    value never multiplies a positive rate.
    """
    b = tuple(int(x) for x in b)
    if not 1 <= i <= len(b):
        raise PreconditionError(f"location index {i} out of range 1..{len(b)}")
    k.validate(b)
    winners = _argmax_deficit(k.on_hand, b)
    if (i - 1) not in winners:
        return 0.0
    return 1.0 / len(winners)


def routing_probs(k: InventoryState, b) -> tuple[float, ...]:
    """Routing probabilities for all locations at once (sums to one)."""
    b = tuple(int(x) for x in b)
    k.validate(b)
    winners = _argmax_deficit(k.on_hand, b)
    p = 1.0 / len(winners)
    return tuple(p if j in winners else 0.0 for j in range(len(b)))
