"""Heat-bath Glauber dynamics: sampling, exact kernel operations, contraction.

Distance units: for +-1 vectors the l1 distance counts 2 per differing
coordinate.  Contraction quantities are returned in both units — raw l1 and
Hamming (flip counts) — to keep the factor of 2 explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import _kernels
from ._rng import SplitMix64
from .errors import (
    EmptyBatchError,
    IndexOutOfRangeError,
    InvalidParameterError,
    TooLargeError,
)
from .model import (
    ExactSummary,
    IsingModel,
    as_spins,
    exact_enumerate,
    local_field,
)

#: Largest N for which dense/sparse 2^N-state kernel operations are attempted.
MATRIX_CAP = 14

BATCH_FORMAT_VERSION = 1


def default_burn_in(n_sites: int, constant: float = 10.0) -> int:
    """ceil(constant * N * (log N)^2); the mixing-time scale of the chain."""
    if n_sites <= 1:
        return 0
    return math.ceil(constant * n_sites * math.log(n_sites) ** 2)


@dataclass
class GlauberChain:
    """Single trajectory of the heat-bath chain.

    The same (model, seed, stream, initial state) always reproduces the same
    trajectory, and matches row `stream` of `sample` for the same seed.
    """

    model: IsingModel
    seed: int
    stream: int = 0
    state: np.ndarray | None = None
    steps_taken: int = 0
    rng: SplitMix64 = field(init=False)

    def __post_init__(self):
        self.rng = SplitMix64(self.seed, self.stream)
        if self.state is None:
            spins = np.empty(self.model.n_sites, np.int8)
            for i in range(self.model.n_sites):
                spins[i] = 1 if self.rng.next_float() < 0.5 else -1
            self.state = spins
        else:
            self.state = as_spins(self.state, self.model.n_sites).copy()


def glauber_step(chain: GlauberChain) -> GlauberChain:
    """One heat-bath update; consumes exactly two draws (site, then spin)."""
    n = chain.model.n_sites
    site = chain.rng.next_below(n)
    h = local_field(chain.model, chain.state, site)
    q_plus = 0.5 * (1.0 + math.tanh(h))
    chain.state[site] = 1 if chain.rng.next_float() < q_plus else -1
    chain.steps_taken += 1
    return chain


@dataclass(frozen=True)
class BatchProvenance:
    model_digest: str
    seed: int
    burn_in: int
    thinning: int
    mode: str  # "independent" | "thinned" | "exact"
    version: int = BATCH_FORMAT_VERSION


@dataclass(frozen=True)
class SampleBatch:
    """k configurations (rows) plus full sampling provenance."""

    samples: np.ndarray = field(repr=False)
    provenance: BatchProvenance

    @property
    def k(self) -> int:
        return self.samples.shape[0]

    @property
    def n_sites(self) -> int:
        return self.samples.shape[1]


def sample(
    model: IsingModel,
    k: int,
    burn_in: Optional[int] = None,
    thinning: int = 0,
    seed: int = 0,
    mode: str = "independent",
) -> SampleBatch:
    """Draw k configurations by Glauber dynamics.

    Default mode runs k independent chains (stream c for row c), each from a
    fresh uniform configuration, for `burn_in` steps, recording one row per
    chain — the rows are independent by construction.  The alternative
    "thinned" mode records every `thinning` steps of one chain after burn-in
    (cheaper, correlated rows) and is flagged in the provenance.
    """
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    if burn_in is None:
        burn_in = default_burn_in(model.n_sites)
    if burn_in < 0:
        raise InvalidParameterError(f"burn_in must be >= 0, got {burn_in}")
    indptr, indices, weights = model.csr_adjacency
    out = np.empty((k, model.n_sites), np.int8)
    if mode == "independent":
        _kernels.run_independent_chains(
            indptr, indices, weights, model.n_sites, k, burn_in, seed, out
        )
        thinning = 0
    elif mode == "thinned":
        if thinning < 1:
            raise InvalidParameterError("thinned mode needs thinning >= 1")
        _kernels.run_thinned_chain(
            indptr, indices, weights, model.n_sites, k, burn_in, thinning, seed, out
        )
    else:
        raise InvalidParameterError(f"unknown sampling mode {mode!r}")
    return SampleBatch(
        samples=out,
        provenance=BatchProvenance(
            model_digest=model.digest,
            seed=seed,
            burn_in=burn_in,
            thinning=thinning,
            mode=mode,
        ),
    )


def exact_sample(summary: ExactSummary, k: int, seed: int = 0) -> SampleBatch:
    """k i.i.d. configurations drawn from the enumerated distribution.

    Inverse-CDF sampling over the 2^N table: exact i.i.d. rows for small
    systems, used where the independence of rows is itself under test.
    """
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    cdf = np.cumsum(summary.probabilities)
    rng = SplitMix64(seed, 0)
    u = np.array([rng.next_float() for _ in range(k)])
    states = np.searchsorted(cdf, u, side="right")
    states = np.minimum(states, len(cdf) - 1)
    bits = (states[:, None] >> np.arange(summary.n_sites)[None, :]) & 1
    return SampleBatch(
        samples=(2 * bits - 1).astype(np.int8),
        provenance=BatchProvenance(
            model_digest=summary.model_digest,
            seed=seed,
            burn_in=0,
            thinning=0,
            mode="exact",
        ),
    )


def _kernel_entries(model: IsingModel):
    """COO parts of the heat-bath kernel: (rows, cols, probs) off-diagonal.

    For each state s and site i, the chain moves to s with bit i flipped with
    probability (1/N) * P(new spin = flipped value | rest).
    """
    n = model.n_sites
    size = 1 << n
    states = np.arange(size, dtype=np.int64)
    w = model.weight_matrix
    rows = np.empty(size * n, dtype=np.int64)
    cols = np.empty(size * n, dtype=np.int64)
    probs = np.empty(size * n, dtype=np.float64)
    for i in range(n):
        h = np.zeros(size)
        for j in np.flatnonzero(w[i]):
            h += w[i, j] * (2 * ((states >> j) & 1) - 1)
        q_plus = 0.5 * (1.0 + np.tanh(h))
        bit = (states >> i) & 1
        flip_prob = np.where(bit == 1, 1.0 - q_plus, q_plus) / n
        rows[i * size : (i + 1) * size] = states
        cols[i * size : (i + 1) * size] = states ^ (1 << i)
        probs[i * size : (i + 1) * size] = flip_prob
    return rows, cols, probs


def transition_matrix(model: IsingModel, cap: int = MATRIX_CAP):
    """Sparse 2^N x 2^N heat-bath kernel (CSR); rows sum to 1."""
    n = model.n_sites
    if n > cap:
        raise TooLargeError(n, cap)
    size = 1 << n
    rows, cols, probs = _kernel_entries(model)
    off = scipy.sparse.coo_matrix((probs, (rows, cols)), shape=(size, size))
    off = off.tocsr()
    diag = 1.0 - np.asarray(off.sum(axis=1)).ravel()
    return off + scipy.sparse.diags(diag, format="csr")


def spectral_gap(model: IsingModel, cap: int = MATRIX_CAP) -> float:
    """1 - lambda_2 of the kernel, via the symmetrized form D^1/2 P D^-1/2."""
    n = model.n_sites
    if n > cap:
        raise TooLargeError(n, cap)
    size = 1 << n
    pi = exact_enumerate(model, cap=max(cap, n)).probabilities
    sqrt_pi = np.sqrt(pi)
    rows, cols, probs = _kernel_entries(model)
    sym_vals = probs * sqrt_pi[rows] / sqrt_pi[cols]
    sym = scipy.sparse.coo_matrix((sym_vals, (rows, cols)), shape=(size, size)).tocsr()
    off_row_sums = np.asarray(
        scipy.sparse.coo_matrix((probs, (rows, cols)), shape=(size, size))
        .tocsr()
        .sum(axis=1)
    ).ravel()
    diag = 1.0 - off_row_sums
    sym = sym + scipy.sparse.diags(diag, format="csr")
    # Symmetrize exactly against round-off so eigensolvers see a symmetric op.
    sym = (sym + sym.T) * 0.5
    if size <= 512:
        eigvals = np.linalg.eigvalsh(sym.toarray())
        lam2 = eigvals[-2]
    else:
        v0 = np.full(size, 1.0 / math.sqrt(size))
        vals = scipy.sparse.linalg.eigsh(
            sym, k=2, which="LA", v0=v0, return_eigenvectors=False
        )
        lam2 = np.sort(vals)[0]
    return float(max(1.0 - lam2, 0.0))


def dirichlet_form(model: IsingModel, f_values, cap: int = MATRIX_CAP) -> float:
    """E(f,f) = 1/2 sum_{s,s'} pi(s) P(s,s') (f(s)-f(s'))^2."""
    n = model.n_sites
    if n > cap:
        raise TooLargeError(n, cap)
    f = np.asarray(f_values, dtype=np.float64)
    if f.shape != (1 << n,):
        raise InvalidParameterError(
            f"f table has shape {f.shape}, expected ({1 << n},)"
        )
    pi = exact_enumerate(model, cap=max(cap, n)).probabilities
    rows, cols, probs = _kernel_entries(model)
    return float(0.5 * np.sum(pi[rows] * probs * (f[rows] - f[cols]) ** 2))


class ContractionValue(NamedTuple):
    """Expected one-step distance from a Hamming-1 pair, in both units."""

    l1: float
    hamming: float


def one_step_contraction(model: IsingModel, spins, j: int) -> ContractionValue:
    """Exact E||X_1 - X_1'||_1 under the synchronous coupling from (s, s^j).

    Both chains pick the same site and share the uniform: updating j
    coalesces; updating i != j leaves the pair differing at j and creates a
    new disagreement at i with probability |q_i(s) - q_i(s^j)|.
    """
    s = as_spins(spins, model.n_sites)
    n = model.n_sites
    if not 0 <= j < n:
        raise IndexOutOfRangeError(f"site {j} out of range for n={n}")
    w = model.weight_matrix
    h = w @ s.astype(np.float64)
    h_flipped = h - 2.0 * s[j] * w[:, j]
    dq = 0.5 * np.abs(np.tanh(h) - np.tanh(h_flipped))
    dq[j] = 0.0
    l1 = 2.0 * (n - 1) / n + (2.0 / n) * float(dq.sum())
    return ContractionValue(l1=l1, hamming=l1 / 2.0)


def exhaustive_contraction(model: IsingModel, cap: int = MATRIX_CAP) -> float:
    """Max over all (configuration, site) of the one-step Hamming contraction."""
    n = model.n_sites
    if n > cap:
        raise TooLargeError(n, cap)
    w = model.weight_matrix
    configs = np.arange(1 << n, dtype=np.int64)
    spins = (2 * ((configs[:, None] >> np.arange(n)[None, :]) & 1) - 1).astype(
        np.float64
    )
    fields = spins @ w.T  # (2^n, n): h_i for every configuration
    tanh_fields = np.tanh(fields)
    worst = 0.0
    for j in range(n):
        flipped = fields - 2.0 * spins[:, j : j + 1] * w[j][None, :]
        dq = 0.5 * np.abs(tanh_fields - np.tanh(flipped))
        dq[:, j] = 0.0
        val = 2.0 * (n - 1) / n + (2.0 / n) * dq.sum(axis=1)
        worst = max(worst, float(val.max()))
    return worst / 2.0


def estimate_contraction(model: IsingModel, trials: int, seed: int = 0) -> float:
    """Sampled lower bound on the worst-case one-step Hamming contraction.

    Configurations come from the chain after its default burn-in; the flipped
    site is uniform per trial.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    batch = sample(model, trials, seed=seed)
    site_rng = SplitMix64(seed, trials)  # separate stream from the chains
    best = 0.0
    for row in batch.samples:
        j = site_rng.next_below(model.n_sites)
        best = max(best, one_step_contraction(model, row, j).hamming)
    return best
