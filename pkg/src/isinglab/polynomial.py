"""Sparse multilinear polynomial statistics on the hypercube.

A polynomial is stored in canonical multilinear form: a map from strictly
increasing tuples of distinct site indices to real coefficients, the empty
tuple holding the constant term.  Repeated indices are reduced pairwise on
construction (sigma_i^2 = 1).  Under this storage the per-position tensor
slices of a symmetric coefficient tensor coincide, so slicing takes only the
site index; the positional multiplicity is absorbed into calibration
constants downstream.
"""

from __future__ import annotations

import hashlib
import math
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySetError,
    IndexOutOfRangeError,
    InvalidParameterError,
)
from .model import as_spins


class MultilinearPolynomial:
    """Immutable canonical multilinear polynomial on N spins."""

    def __init__(self, n_sites: int, terms: Mapping[tuple[int, ...], float]):
        # Constructor trusts canonical input; use `canonicalize` for raw terms.
        self.n_sites = n_sites
        self._terms = MappingProxyType(dict(terms))

    @property
    def terms(self) -> Mapping[tuple[int, ...], float]:
        return self._terms

    @cached_property
    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    @cached_property
    def infinity_norm(self) -> float:
        """Max |coefficient| over non-constant terms."""
        return max((abs(v) for k, v in self._terms.items() if k), default=0.0)

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"multilinear-poly/1|n={self.n_sites}".encode())
        for key in sorted(self._terms):
            coef = float(self._terms[key])
            h.update(f"|{','.join(map(str, key))}:{coef.hex()}".encode())
        return h.hexdigest()[:16]

    def evaluate(self, spins) -> float:
        s = as_spins(spins, self.n_sites)
        total = 0.0
        for key, coef in self._terms.items():
            prod = coef
            for i in key:
                prod *= s[i]
            total += prod
        return total

    def values(self, samples: np.ndarray) -> np.ndarray:
        """Evaluate on every row of a (k, N) matrix of +-1 spins."""
        samples = np.asarray(samples)
        if samples.ndim != 2 or samples.shape[1] != self.n_sites:
            raise DimensionMismatchError(
                f"samples have shape {samples.shape}, expected (k, {self.n_sites})"
            )
        out = np.zeros(samples.shape[0])
        for key, coef in self._terms.items():
            if not key:
                out += coef
                continue
            prod = samples[:, key[0]].astype(np.float64)
            for i in key[1:]:
                prod = prod * samples[:, i]
            out += coef * prod
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultilinearPolynomial)
            and self.n_sites == other.n_sites
            and dict(self._terms) == dict(other._terms)
        )

    def __repr__(self) -> str:
        return (
            f"MultilinearPolynomial(n_sites={self.n_sites}, "
            f"degree={self.degree}, n_terms={len(self._terms)})"
        )


def canonicalize(
    raw_terms: Iterable[tuple[Sequence[int], float]], n: int
) -> MultilinearPolynomial:
    """Reduce raw (index tuple, coefficient) records to canonical form.

    Repeated indices inside a tuple cancel pairwise, tuples are sorted, like
    terms merge, and exact-zero coefficients are dropped.  Evaluation is
    preserved pointwise.
    """
    acc: dict[tuple[int, ...], float] = {}
    for indices, coef in raw_terms:
        counts: dict[int, int] = {}
        for i in indices:
            i = int(i)
            if not 0 <= i < n:
                raise IndexOutOfRangeError(f"index {i} out of range for n={n}")
            counts[i] = counts.get(i, 0) + 1
        key = tuple(sorted(i for i, c in counts.items() if c % 2 == 1))
        acc[key] = acc.get(key, 0.0) + float(coef)
    return MultilinearPolynomial(
        n, {k: v for k, v in sorted(acc.items()) if v != 0.0}
    )


def evaluate(f: MultilinearPolynomial, spins) -> float:
    return f.evaluate(spins)


def discrete_gradient(f: MultilinearPolynomial, site: int) -> MultilinearPolynomial:
    """Polynomial g with g(s) = f(s) - f(s^site): the terms containing the
    site, doubled (all other terms cancel under the flip)."""
    if not 0 <= site < f.n_sites:
        raise IndexOutOfRangeError(f"site {site} out of range for n={f.n_sites}")
    return MultilinearPolynomial(
        f.n_sites,
        {key: 2.0 * coef for key, coef in f.terms.items() if site in key},
    )


def slice_polynomial(
    f: MultilinearPolynomial, site: int, position: Optional[int] = None
) -> MultilinearPolynomial:
    """Delete `site` from every term containing it (degree drops by one).

    Canonical storage makes all tensor-position slices identical, so
    `position` is validated when given but does not select anything.
    """
    if not 0 <= site < f.n_sites:
        raise IndexOutOfRangeError(f"site {site} out of range for n={f.n_sites}")
    if position is not None and not 1 <= position <= max(f.degree, 1):
        raise IndexOutOfRangeError(
            f"position {position} out of range for degree {f.degree}"
        )
    terms: dict[tuple[int, ...], float] = {}
    for key, coef in f.terms.items():
        if site in key:
            terms[tuple(i for i in key if i != site)] = coef
    return MultilinearPolynomial(f.n_sites, terms)


def slice_values(f: MultilinearPolynomial, spins) -> np.ndarray:
    """Vector of slice evaluations at one configuration, one entry per site.

    Entry l equals slice_polynomial(f, l) evaluated at the configuration;
    computed in one pass using that deleting site l from a term multiplies
    its value by sigma_l.
    """
    s = as_spins(spins, f.n_sites)
    out = np.zeros(f.n_sites)
    for key, coef in f.terms.items():
        if not key:
            continue
        prod = coef
        for i in key:
            prod *= s[i]
        for i in key:
            out[i] += prod * s[i]
    return out


def s_b_membership(f: MultilinearPolynomial, spins, b: float) -> bool:
    """True iff every site slice is at most b * N^((d-1)/2) in magnitude."""
    if b <= 0:
        raise InvalidParameterError(f"b must be > 0, got {b}")
    if not f.terms:
        return True
    d = max(f.degree, 1)
    threshold = b * f.n_sites ** ((d - 1) / 2.0)
    return bool(np.max(np.abs(slice_values(f, spins))) <= threshold)


def _check_state_table(states, n_sites: int) -> np.ndarray:
    arr = np.asarray(states, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptySetError("configuration set must be a nonempty 1-d index array")
    if arr.min() < 0 or arr.max() >= (1 << n_sites):
        raise IndexOutOfRangeError("state index out of range")
    return arr


def lipschitz_constant_on(f_values, states, n_sites: int) -> float:
    """Max |f(s) - f(s')| over Hamming-distance-1 pairs inside the set.

    `states` are configuration indices (bit encoding), `f_values` the aligned
    function values.  Returns 0 when the set has no adjacent pair.
    """
    arr = _check_state_table(states, n_sites)
    vals = np.asarray(f_values, dtype=np.float64)
    if vals.shape != arr.shape:
        raise DimensionMismatchError("f_values and states must align")
    lookup = {int(s): float(v) for s, v in zip(arr, vals)}
    best = 0.0
    for s, v in lookup.items():
        for i in range(n_sites):
            t = s ^ (1 << i)
            if t > s and t in lookup:
                best = max(best, abs(v - lookup[t]))
    return best


def _components(states: set[int], n_sites: int) -> list[set[int]]:
    """Connected components of the set in the hypercube graph."""
    remaining = set(states)
    comps = []
    while remaining:
        root = remaining.pop()
        comp = {root}
        frontier = [root]
        while frontier:
            s = frontier.pop()
            for i in range(n_sites):
                t = s ^ (1 << i)
                if t in remaining:
                    remaining.remove(t)
                    comp.add(t)
                    frontier.append(t)
        comps.append(comp)
    return comps


def mcshane_whitney_extend(f_values, states, n_sites: int, b: float) -> np.ndarray:
    """Minimal Lipschitz extension to the full hypercube.

    Returns the table f~(eta) = min_{s in set} [f(s) + 2 b d_H(eta, s)] over
    all 2^N configurations — b in l1 units, i.e. a per-flip budget of 2b.
    f~ agrees with f on the set provided f satisfies that global bound on the
    set, and is then b-Lipschitz (l1) everywhere.

    b = 0 is admitted only when f is constant on every hypercube-connected
    component of the set; the b = 0 formula is ill-posed otherwise.
    """
    arr = _check_state_table(states, n_sites)
    vals = np.asarray(f_values, dtype=np.float64)
    if vals.shape != arr.shape:
        raise DimensionMismatchError("f_values and states must align")
    if b < 0:
        raise InvalidParameterError(f"b must be >= 0, got {b}")
    if b == 0:
        lookup = dict(zip((int(s) for s in arr), vals))
        for comp in _components(set(lookup), n_sites):
            comp_vals = {lookup[s] for s in comp}
            if len(comp_vals) > 1:
                raise InvalidParameterError(
                    "b = 0 requires f constant on each component of the set"
                )
    size = 1 << n_sites
    all_states = np.arange(size, dtype=np.int64)
    out = np.full(size, np.inf)
    for s, v in zip(arr, vals):
        dist = np.bitwise_count(all_states ^ s).astype(np.float64)
        np.minimum(out, v + 2.0 * b * dist, out=out)
    return out
