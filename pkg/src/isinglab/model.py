"""Ising models with arbitrary couplings and the exact small-system oracle.

Conventions fixed here and used everywhere else in the package:

* Couplings are stored once per unordered pair {i, j} with weight
  ``w_ij`` equal to the *total* double-sum contribution of that pair, so the
  energy is ``H(sigma) = -sum_{i<j} w_ij sigma_i sigma_j``.  Input entries are
  treated as ordered-pair contributions and symmetrized on construction
  (``w_ij = v_ij + v_ji``, duplicates summed).
* The Dobrushin row sum of site i is ``sum_j |w_ij|`` and the margin is
  ``alpha = 1 - max_i sum_j |w_ij|``.  A margin <= 0 is reported, not raised.
* Configurations are length-N vectors with entries in {-1, +1}.  Configuration
  k of an enumeration maps site i to bit i of k, with bit value 1 meaning
  spin +1.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    SelfCouplingError,
    TooLargeError,
)

#: Largest N for which full enumeration (2^N states) is attempted by default.
ENUMERATION_CAP = 20


def as_spins(spins, n_sites: int) -> np.ndarray:
    """Validate and coerce a configuration to an int8 vector of +-1."""
    arr = np.asarray(spins)
    if arr.shape != (n_sites,):
        raise DimensionMismatchError(
            f"configuration has shape {arr.shape}, expected ({n_sites},)"
        )
    out = arr.astype(np.int8, copy=False)
    if not np.all(np.abs(out) == 1):
        raise DimensionMismatchError("configuration entries must be exactly +-1")
    return out


@dataclass(frozen=True)
class IsingModel:
    """Immutable spin system: site count plus canonical pair couplings.

    ``couplings`` maps each unordered pair (i, j) with i < j to its total
    double-sum weight.  Instances are safe to share across threads.
    """

    n_sites: int
    couplings: tuple[tuple[int, int, float], ...]
    label: str = ""

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix W with W[i, j] = w_ij, zero diagonal."""
        w = np.zeros((self.n_sites, self.n_sites))
        for i, j, v in self.couplings:
            w[i, j] = v
            w[j, i] = v
        return w

    @cached_property
    def csr_adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, weights) of the symmetric adjacency, CSR layout."""
        n = self.n_sites
        counts = np.zeros(n + 1, dtype=np.int64)
        for i, j, _ in self.couplings:
            counts[i + 1] += 1
            counts[j + 1] += 1
        indptr = np.cumsum(counts)
        indices = np.zeros(max(indptr[-1], 1), dtype=np.int64)
        weights = np.zeros(max(indptr[-1], 1), dtype=np.float64)
        cursor = indptr[:-1].copy()
        for i, j, v in self.couplings:
            indices[cursor[i]] = j
            weights[cursor[i]] = v
            cursor[i] += 1
            indices[cursor[j]] = i
            weights[cursor[j]] = v
            cursor[j] += 1
        return indptr, indices[: indptr[-1]], weights[: indptr[-1]]

    @cached_property
    def row_abs_sums(self) -> np.ndarray:
        sums = np.zeros(self.n_sites)
        for i, j, v in self.couplings:
            sums[i] += abs(v)
            sums[j] += abs(v)
        return sums

    @cached_property
    def digest(self) -> str:
        """Hash binding derived artifacts to the model's physics (label excluded)."""
        h = hashlib.sha256()
        h.update(f"ising-model/1|n={self.n_sites}".encode())
        for i, j, v in self.couplings:
            h.update(f"|{i},{j},{float(v).hex()}".encode())
        return h.hexdigest()[:16]

    @property
    def n_edges(self) -> int:
        return len(self.couplings)

    def edge_set(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.couplings]


def build_model(
    n: int, coupling_entries: Iterable[tuple[int, int, float]], label: str = ""
) -> IsingModel:
    """Symmetrize ordered-pair coupling contributions into a canonical model.

    Entries (i, j, v) and (j, i, v') are summed into one unordered weight
    w_ij = v + v', so the double-sum Hamiltonian of the input is preserved.
    Pairs whose total weight is exactly zero are dropped (they are non-edges).
    """
    if n < 1:
        raise IndexOutOfRangeError(f"n_sites must be >= 1, got {n}")
    acc: dict[tuple[int, int], float] = {}
    for i, j, v in coupling_entries:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRangeError(f"pair ({i}, {j}) out of range for n={n}")
        if i == j:
            raise SelfCouplingError(f"self-coupling at site {i}")
        key = (i, j) if i < j else (j, i)
        acc[key] = acc.get(key, 0.0) + float(v)
    couplings = tuple(
        (i, j, v) for (i, j), v in sorted(acc.items()) if v != 0.0
    )
    return IsingModel(n_sites=n, couplings=couplings, label=label)


def dobrushin_margin(model: IsingModel) -> float:
    """1 minus the largest Dobrushin row sum; may be <= 0 (condition fails)."""
    if model.n_edges == 0:
        return 1.0
    return 1.0 - float(model.row_abs_sums.max())


def energy(model: IsingModel, spins) -> float:
    """H(sigma) = -sum_{i<j} w_ij sigma_i sigma_j."""
    s = as_spins(spins, model.n_sites)
    total = 0.0
    for i, j, v in model.couplings:
        total += v * s[i] * s[j]
    return -total


def local_field(model: IsingModel, spins, i: int) -> float:
    """Field h_i = sum_j w_ij sigma_j, the coefficient of sigma_i in -H.

    Flipping site i changes the energy by 2 * h_i * sigma_i, and the heat-bath
    conditional is P(sigma_i = +1 | rest) = (1 + tanh(h_i)) / 2.
    """
    s = as_spins(spins, model.n_sites)
    if not 0 <= i < model.n_sites:
        raise IndexOutOfRangeError(f"site {i} out of range for n={model.n_sites}")
    indptr, indices, weights = model.csr_adjacency
    lo, hi = indptr[i], indptr[i + 1]
    return float(np.dot(weights[lo:hi], s[indices[lo:hi]]))


def conditional_plus_probability(model: IsingModel, spins, i: int) -> float:
    """Heat-bath probability that site i resamples to +1 given the rest."""
    return 0.5 * (1.0 + math.tanh(local_field(model, spins, i)))


@dataclass(frozen=True)
class ExactSummary:
    """Brute-force enumeration output for small systems.

    ``probabilities[k]`` is the stationary probability of the configuration
    whose spins are the bits of k (bit value 1 = spin +1).
    """

    n_sites: int
    log_partition: float
    probabilities: np.ndarray = field(repr=False)
    model_digest: str = ""


def negated_energies(model: IsingModel) -> np.ndarray:
    """-H over all 2^N configurations, indexed by bit encoding."""
    n = model.n_sites
    states = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n)
    for i, j, v in model.couplings:
        disagree = ((states >> i) ^ (states >> j)) & 1
        out += v * (1 - 2 * disagree)
    return out


def exact_enumerate(model: IsingModel, cap: int = ENUMERATION_CAP) -> ExactSummary:
    """Enumerate all configurations; probabilities proportional to exp(-H)."""
    n = model.n_sites
    if n > cap:
        raise TooLargeError(n, cap)
    neg_h = negated_energies(model)
    shift = neg_h.max()
    weights = np.exp(neg_h - shift)
    total = weights.sum()
    log_z = float(shift + np.log(total))
    return ExactSummary(
        n_sites=n,
        log_partition=log_z,
        probabilities=weights / total,
        model_digest=model.digest,
    )


def character_values(n_sites: int, sites: Sequence[int]) -> np.ndarray:
    """prod_{i in sites} sigma_i over all 2^N configurations (int8 vector)."""
    states = np.arange(1 << n_sites, dtype=np.int64)
    parity = np.zeros(1 << n_sites, dtype=np.int64)
    for i in sites:
        parity ^= (states >> i) & 1
    return (1 - 2 * parity).astype(np.int8)


def exact_moment(summary: ExactSummary, sites: Iterable[int]) -> float:
    """E_pi[prod_{i in sites} sigma_i]; the empty product is 1."""
    site_list = list(sites)
    if len(set(site_list)) != len(site_list):
        raise IndexOutOfRangeError(f"sites must be distinct, got {site_list}")
    for i in site_list:
        if not 0 <= i < summary.n_sites:
            raise IndexOutOfRangeError(
                f"site {i} out of range for n={summary.n_sites}"
            )
    if not site_list:
        return 1.0
    chars = character_values(summary.n_sites, site_list)
    return float(np.dot(summary.probabilities, chars))


def ferromagnetic_counterpart(model: IsingModel) -> IsingModel:
    """Same sparsity pattern with every coupling replaced by |w_ij|."""
    return IsingModel(
        n_sites=model.n_sites,
        couplings=tuple((i, j, abs(v)) for i, j, v in model.couplings),
        label=model.label,
    )


def all_configurations(n_sites: int) -> np.ndarray:
    """(2^N, N) int8 matrix of all configurations in bit-encoding order."""
    states = np.arange(1 << n_sites, dtype=np.int64)
    bits = (states[:, None] >> np.arange(n_sites)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


def spins_to_index(spins) -> int:
    """Inverse of the bit encoding: configuration -> integer index."""
    arr = np.asarray(spins)
    bits = (arr > 0).astype(np.int64)
    return int(np.dot(bits, 1 << np.arange(arr.shape[-1], dtype=np.int64)))
