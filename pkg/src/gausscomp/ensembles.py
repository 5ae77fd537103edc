r"""Independent-sum random matrix models and their Gaussian proxies.

Every constructor returns a :class:`SummandEnsemble` describing a random
self-adjoint (or rectangular) matrix ``Y = sum_i W_i`` with independent
summands. The ensemble records the declared one-sided summand bounds

* ``r_plus``  with ``lambda_max(W_i - E W_i) <= r_plus``,
* ``r_minus`` with ``lambda_min(W_i - E W_i) >= -r_minus``,
* ``r_pm``    with ``||W_i - E W_i|| <= r_pm``,

and a :class:`~gausscomp.gaussian.GaussianModel` with the same mean and
variance function as ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import gaussian as gm
from .core import as_hermitian, eig_extremes, spectral_norm
from .rng import as_generator

__all__ = [
    "SummandEnsemble",
    "PauliWord",
    "SparseSketch",
    "wigner_rademacher",
    "rademacher_covariance",
    "rademacher_rect",
    "permutation_graph",
    "pauli_model",
    "countsketch",
    "sparsestack",
    "subspace_gram",
    "sparsestack_embedding",
    "isotropic_covariance",
    "rademacher_vectors",
    "gaussian_vectors",
    "estimate_beta2",
    "householder_complement",
    "compress_complement",
]

# largest summand stack (in scalars) that per-summand access will materialize
_MAX_SUMMAND_ENTRIES = 20_000_000


@dataclass(eq=False)
class SummandEnsemble:
    """A random matrix ``Y = sum_i W_i`` with declared summand bounds.

    Attributes
    ----------
    kind : str
        Model tag, e.g. ``"wigner_rademacher"``.
    params : dict
        Constructor parameters.
    dim : int
        Dimension of the self-adjoint matrix ``Y`` (``d1 + d2`` for rectangular
        models, which are described through their dilation).
    mean : ndarray
        ``E Y`` (of the dilation for rectangular models).
    sampler : callable
        ``sampler(rng) -> Y``; a dense array, or a ``LinearOperator`` for
        matrix-free models.
    summand_sampler : callable or None
        ``summand_sampler(rng) -> (n, d, d)`` stack of summands whose sum is a
        draw of ``Y`` (dilated for rectangular models).
    summand_mean : ndarray or None
        Common expectation ``E W_i`` of the summands.
    proxy : GaussianModel or None
        Gaussian model with the mean and variance function of ``Y``.
    dominating_proxy : GaussianModel or None
        Gaussian model used by bound evaluators when it differs from `proxy`.
    compressed : SummandEnsemble or None
        Restriction to an invariant subspace (graph models only).
    """

    kind: str
    params: dict
    dim: int
    mean: np.ndarray
    sampler: Callable
    proxy: gm.GaussianModel | None = None
    summand_sampler: Callable | None = None
    summand_mean: np.ndarray | None = None
    n_summands: int | None = None
    r_plus: float | None = None
    r_minus: float | None = None
    r_pm: float | None = None
    field: str = "real"
    rect_shape: tuple | None = None
    dominating_proxy: gm.GaussianModel | None = None
    compressed: "SummandEnsemble | None" = None
    metadata: dict = dc_field(default_factory=dict)
    statistics: tuple = ("lambda_max", "lambda_min", "norm")

    @property
    def is_rect(self) -> bool:
        return self.rect_shape is not None

    @property
    def bound_proxy(self) -> gm.GaussianModel | None:
        return self.dominating_proxy if self.dominating_proxy is not None else self.proxy

    def sample(self, rng):
        return self.sampler(as_generator(rng))

    def summands(self, rng) -> np.ndarray:
        if self.summand_sampler is None:
            raise ValueError(f"{self.kind} ensemble has no per-summand access")
        return self.summand_sampler(as_generator(rng))

    def statistic(self, y, name: str) -> float:
        """Evaluate a spectral statistic on one realization `y`."""
        if name not in self.statistics:
            raise ValueError(f"statistic {name!r} does not apply to a {self.kind} ensemble")
        if name == "norm":
            if isinstance(y, spla.LinearOperator):
                lo, hi = eig_extremes(y)
                return max(-lo, hi)
            y = np.asarray(y)
            if y.shape[0] != y.shape[1]:
                return spectral_norm(y)
            lo, hi = eig_extremes(y)
            return max(-lo, hi)
        if name == "lambda_2":
            if self.kind == "permutation_graph":
                return eig_extremes(compress_complement(y))[1]
            return float(np.linalg.eigvalsh(as_hermitian(y))[-2])
        lo, hi = eig_extremes(y)
        return hi if name == "lambda_max" else lo

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "params": dict(self.params),
            "field": self.field,
            "declared_bounds": {"r_plus": self.r_plus, "r_minus": self.r_minus, "r_pm": self.r_pm},
        }
        if self.is_rect:
            out["rows"], out["cols"] = self.rect_shape
        else:
            out["dim"] = self.dim
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out


def _summand_budget(n, d):
    return n * d * d <= _MAX_SUMMAND_ENTRIES


# ---------------------------------------------------------------------- Wigner


def wigner_rademacher(d: int) -> SummandEnsemble:
    """Symmetric matrix with iid Rademacher entries above a zero diagonal."""
    if d < 2:
        raise ValueError("wigner_rademacher needs d >= 2")
    iu, ju = np.triu_indices(d, 1)
    m = len(iu)

    def sampler(rng):
        y = np.zeros((d, d))
        y[iu, ju] = rng.choice((-1.0, 1.0), size=m)
        return y + y.T

    def summands(rng):
        eps = rng.choice((-1.0, 1.0), size=m)
        out = np.zeros((m, d, d))
        idx = np.arange(m)
        out[idx, iu, ju] = eps
        out[idx, ju, iu] = eps
        return out

    return SummandEnsemble(
        kind="wigner_rademacher",
        params={"d": d},
        dim=d,
        mean=np.zeros((d, d)),
        sampler=sampler,
        summand_sampler=summands if _summand_budget(m, d) else None,
        summand_mean=np.zeros((d, d)),
        n_summands=m,
        r_plus=1.0,
        r_minus=1.0,
        r_pm=1.0,
        proxy=gm.offdiag_wigner(d),
    )


# ---------------------------------------------------------------------- covariance


def rademacher_vectors(rng, size: int, d: int) -> np.ndarray:
    return rng.choice((-1.0, 1.0), size=(size, d))


def gaussian_vectors(rng, size: int, d: int) -> np.ndarray:
    return rng.standard_normal((size, d))


def isotropic_covariance(vector_sampler, d: int, n: int, beta: float | None = None, *,
                         proxy: gm.GaussianModel | None = None, kind: str = "isotropic_covariance",
                         r_plus: float | None = None) -> SummandEnsemble:
    """Sample covariance ``(1/n) sum_i w_i w_i^T`` of iid isotropic vectors.

    `vector_sampler(rng, size, d)` must return a ``(size, d)`` array of
    centered vectors with identity second moment. The summands ``w w^T / n``
    are psd, so ``r_minus = 1/n``. `beta` is the user's fourth-moment constant
    ``Var <w, a>^2 <= beta^2``; it is recorded but not certified.
    """
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")

    def sampler(rng):
        w = np.asarray(vector_sampler(rng, n, d), dtype=float)
        return w.T @ w / n

    def summands(rng):
        w = np.asarray(vector_sampler(rng, n, d), dtype=float)
        return np.einsum("ij,ik->ijk", w, w) / n

    if proxy is None and vector_sampler is gaussian_vectors:
        proxy = gm.shift(gm.scale(gm.goe(d), 1 / math.sqrt(n)), np.eye(d))
    meta = {}
    if beta is not None:
        meta["beta"] = float(beta)
        meta["sigma_star2_upper"] = float(beta) ** 2 / n
        meta["phi_upper"] = math.sqrt(12 * float(beta) ** 2 * d / n)
    return SummandEnsemble(
        kind=kind,
        params={"d": d, "n": n},
        dim=d,
        mean=np.eye(d),
        sampler=sampler,
        summand_sampler=summands if _summand_budget(n, d) else None,
        summand_mean=np.eye(d) / n,
        n_summands=n,
        r_minus=1.0 / n,
        r_plus=r_plus,
        proxy=proxy,
        metadata=meta,
    )


def rademacher_covariance(d: int, n: int) -> SummandEnsemble:
    """Sample covariance of ``n`` iid Rademacher vectors in ``R^d``.

    The proxy is ``I + n^{-1/2}`` times the zero-diagonal Gaussian Wigner matrix.
    """
    if n < d:
        raise ValueError(f"need n >= d, got d={d}, n={n}")
    proxy = gm.shift(gm.scale(gm.offdiag_wigner(d), 1 / math.sqrt(n)), np.eye(d))
    ens = isotropic_covariance(rademacher_vectors, d, n, beta=math.sqrt(2) if d > 1 else 0.0,
                               proxy=proxy, kind="rademacher_covariance", r_plus=(d - 1) / n)
    return ens


def estimate_beta2(vector_sampler, d: int, rng=None, *, n_samples: int = 20000,
                   n_dirs: int = 32) -> float:
    """Empirical ``max_a Var <w, a>^2`` over coordinate and random unit directions."""
    rng = as_generator(rng)
    w = np.asarray(vector_sampler(rng, n_samples, d), dtype=float)
    dirs = rng.standard_normal((d, n_dirs))
    dirs /= np.linalg.norm(dirs, axis=0)
    dirs = np.hstack([np.eye(d), dirs])
    proj = (w @ dirs) ** 2
    return float(proj.var(axis=0, ddof=1).max())


# ---------------------------------------------------------------------- rectangular


def rademacher_rect(d: int, n: int) -> SummandEnsemble:
    """``d x n`` matrix with iid entries ``+-n^{-1/2}``, described by its dilation."""
    if n < d:
        raise ValueError(f"need n >= d, got d={d}, n={n}")
    c = 1 / math.sqrt(n)

    def sampler(rng):
        return c * rng.choice((-1.0, 1.0), size=(d, n))

    def summands(rng):
        eps = c * rng.choice((-1.0, 1.0), size=d * n)
        j, k = np.divmod(np.arange(d * n), n)
        out = np.zeros((d * n, d + n, d + n))
        idx = np.arange(d * n)
        out[idx, j, d + k] = eps
        out[idx, d + k, j] = eps
        return out

    return SummandEnsemble(
        kind="rademacher_rect",
        params={"d": d, "n": n},
        dim=d + n,
        mean=np.zeros((d + n, d + n)),
        sampler=sampler,
        summand_sampler=summands if _summand_budget(d * n, d + n) else None,
        summand_mean=np.zeros((d + n, d + n)),
        n_summands=d * n,
        r_pm=c,
        r_plus=c,
        r_minus=c,
        rect_shape=(d, n),
        proxy=gm.scale(gm.iid_rect(d, n), c),
        statistics=("norm",),
    )


# ---------------------------------------------------------------------- graphs


def householder_complement(n: int) -> np.ndarray:
    """Unit vector ``v`` such that ``I - 2 v v^T`` maps ``e_1`` to ``1/sqrt(n)``.

    Columns ``2..n`` of the reflector are an orthonormal basis of the
    complement of the all-ones vector.
    """
    v = -np.full(n, 1 / math.sqrt(n))
    v[0] += 1.0
    nv = np.linalg.norm(v)
    if nv == 0:
        return v
    return v / nv


def compress_complement(y: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """Compression of `y` to the complement of the all-ones vector, ``(HYH)[1:, 1:]``."""
    y = np.asarray(y, dtype=float)
    if v is None:
        v = householder_complement(y.shape[0])
    yv = y @ v
    vy = v @ y
    c = v @ yv
    out = y - 2 * np.outer(v, vy) - 2 * np.outer(yv, v) + 4 * c * np.outer(v, v)
    out = out[1:, 1:]
    return (out + out.T) / 2


def _perm_sum(rng, n, half):
    y = np.zeros((n, n))
    rows = np.arange(n)
    for _ in range(half):
        p = rng.permutation(n)
        np.add.at(y, (rows, p), 1.0)
    return y + y.T


def permutation_graph(n: int, degree: int) -> SummandEnsemble:
    """Permutation model ``Y = sum_{i <= degree/2} (Pi_i + Pi_i^T)``.

    ``compressed`` is the restriction ``Y_perp`` to the complement of the
    all-ones vector, realized in the Householder basis; its top eigenvalue is
    ``lambda_2(Y)``.
    """
    if degree % 2:
        raise ValueError("degree must be even")
    if not 2 <= degree <= n:
        raise ValueError(f"need 2 <= degree <= n, got degree={degree}, n={n}")
    half = degree // 2
    v = householder_complement(n)

    def sampler(rng):
        return _perm_sum(rng, n, half)

    def summands(rng):
        return np.stack([_perm_sum(rng, n, 1) for _ in range(half)])

    def sampler_perp(rng):
        return compress_complement(_perm_sum(rng, n, half), v)

    def summands_perp(rng):
        return np.stack([compress_complement(_perm_sum(rng, n, 1), v) for _ in range(half)])

    inner = gm.scale(gm.goe(n - 1), math.sqrt(degree / (n - 1))) if n > 1 else None
    budget = _summand_budget(half, n)
    perp = SummandEnsemble(
        kind="permutation_graph_perp",
        params={"n": n, "degree": degree},
        dim=n - 1,
        mean=np.zeros((n - 1, n - 1)),
        sampler=sampler_perp,
        summand_sampler=summands_perp if budget else None,
        summand_mean=np.zeros((n - 1, n - 1)),
        n_summands=half,
        r_plus=2.0,
        r_minus=2.0,
        proxy=inner,
    )
    full_proxy = None
    if inner is not None:
        reflector = np.eye(n) - 2 * np.outer(v, v)
        full_proxy = gm.shift(gm.embed(inner, reflector[:, 1:]),
                              np.full((n, n), degree / n))
    return SummandEnsemble(
        kind="permutation_graph",
        params={"n": n, "degree": degree},
        dim=n,
        mean=np.full((n, n), degree / n),
        sampler=sampler,
        summand_sampler=summands if budget else None,
        summand_mean=np.full((n, n), 2.0 / n),
        n_summands=half,
        r_plus=2.0,
        r_minus=2.0,
        proxy=full_proxy,
        compressed=perp,
        statistics=("lambda_max", "lambda_min", "lambda_2", "norm"),
    )


# ---------------------------------------------------------------------- Pauli

_PAULI = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]]),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)


class PauliWord:
    """Tensor product of single-qubit Pauli matrices.

    Letters are ``0=I, 1=X, 2=Y, 3=Z``; the first letter acts on the most
    significant bit of the basis index. The word maps the basis state
    ``|b>`` to ``i^{#Y} (-1)^{popcount(b & z_mask)} |b XOR x_mask>``.
    """

    __slots__ = ("n_qubits", "letters", "x_mask", "z_mask", "global_phase")

    def __init__(self, letters):
        letters = tuple(int(c) for c in letters)
        if not letters or any(c not in _PAULI for c in letters):
            raise ValueError("letters must be a nonempty sequence over {0, 1, 2, 3}")
        self.n_qubits = len(letters)
        self.letters = letters
        x = z = 0
        for c in letters:
            x = (x << 1) | (c in (1, 2))
            z = (z << 1) | (c in (2, 3))
        self.x_mask, self.z_mask = x, z
        self.global_phase = 1j ** (sum(c == 2 for c in letters) % 4)

    @classmethod
    def from_masks(cls, n_qubits: int, x_mask: int, z_mask: int) -> "PauliWord":
        letters = []
        for q in range(n_qubits - 1, -1, -1):
            xb, zb = (x_mask >> q) & 1, (z_mask >> q) & 1
            letters.append({(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}[(xb, zb)])
        return cls(letters)

    def __repr__(self):
        return "PauliWord(" + "".join("IXYZ"[c] for c in self.letters) + ")"

    def phases(self) -> np.ndarray:
        b = np.arange(2 ** self.n_qubits)
        return self.global_phase * (1 - 2 * (_popcount(b & self.z_mask) & 1))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec)
        out = np.zeros(vec.shape, dtype=complex)
        b = np.arange(2 ** self.n_qubits)
        out[b ^ self.x_mask] = (self.phases() * vec.T).T
        return out

    def matrix(self) -> np.ndarray:
        n = 2 ** self.n_qubits
        out = np.zeros((n, n), dtype=complex)
        b = np.arange(n)
        out[b ^ self.x_mask, b] = self.phases()
        return out


def _pauli_terms(rng, n_qubits, k):
    n = 2 ** n_qubits
    x = rng.integers(0, n, size=k)
    z = rng.integers(0, n, size=k)
    eps = rng.choice((-1.0, 1.0), size=k)
    coef = eps / math.sqrt(k) * (1j ** (_popcount(x & z) % 4))
    return x, z, coef


def _pauli_dense(n_qubits, x, z, coef):
    n = 2 ** n_qubits
    b = np.arange(n)
    y = np.zeros((n, n), dtype=complex)
    for xi, zi, ci in zip(x, z, coef):
        y[b ^ xi, b] += ci * (1 - 2 * (_popcount(b & zi) & 1))
    return y


class _PauliOperator(spla.LinearOperator):
    def __init__(self, n_qubits, x, z, coef):
        n = 2 ** n_qubits
        super().__init__(dtype=complex, shape=(n, n))
        b = np.arange(n)
        self._terms = [(b ^ xi, ci * (1 - 2 * (_popcount(b & zi) & 1)))
                       for xi, zi, ci in zip(x, z, coef)]

    def _matvec(self, v):
        v = np.asarray(v).reshape(-1)
        out = np.zeros(self.shape[0], dtype=complex)
        for perm, ph in self._terms:
            out[perm] += ph * v
        return out

    def _adjoint(self):
        return self


def pauli_model(n_qubits: int, k: int, *, dense_limit: int = 10) -> SummandEnsemble:
    """Random Pauli model ``Y = k^{-1/2} sum_i eps_i H_{J_i}``.

    Words are uniform over all ``4^n`` Pauli strings and ``eps_i`` are
    Rademacher signs. Realizations are dense for ``n_qubits <= dense_limit``
    and matrix-free ``LinearOperator`` objects beyond that.
    """
    if not 1 <= n_qubits <= 14:
        raise ValueError("n_qubits must lie in [1, 14]")
    if k < 1:
        raise ValueError("k must be positive")
    n = 2 ** n_qubits

    def sampler(rng):
        terms = _pauli_terms(rng, n_qubits, k)
        if n_qubits <= dense_limit:
            return _pauli_dense(n_qubits, *terms)
        return _PauliOperator(n_qubits, *terms)

    def summands(rng):
        x, z, coef = _pauli_terms(rng, n_qubits, k)
        return np.stack([_pauli_dense(n_qubits, [xi], [zi], [ci])
                         for xi, zi, ci in zip(x, z, coef)])

    r = 1 / math.sqrt(k)
    return SummandEnsemble(
        kind="pauli",
        params={"n_qubits": n_qubits, "k": k},
        dim=n,
        mean=np.zeros((n, n)),
        sampler=sampler,
        summand_sampler=summands if _summand_budget(k, n) else None,
        summand_mean=np.zeros((n, n)),
        n_summands=k,
        r_plus=r,
        r_minus=r,
        r_pm=r,
        field="complex",
        proxy=gm.scale(gm.gue(n), 1 / math.sqrt(n)),
    )


# ---------------------------------------------------------------------- sketches


@dataclass(frozen=True, eq=False)
class SparseSketch:
    """Stack of ``zeta`` CountSketch blocks, each ``b x n``, scaled by ``zeta^{-1/2}``.

    ``row_index[j, c]`` is the row (within block ``j``) of the nonzero in
    column ``c``; ``values[j, c]`` is its value.
    """

    b: int
    zeta: int
    n: int
    row_index: np.ndarray
    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.b * self.zeta, self.n)

    def tocsr(self) -> sp.csr_matrix:
        rows = (self.row_index + self.b * np.arange(self.zeta)[:, None]).ravel()
        cols = np.tile(np.arange(self.n), self.zeta)
        return sp.csr_matrix((self.values.ravel(), (rows, cols)), shape=self.shape)

    def toarray(self) -> np.ndarray:
        return self.tocsr().toarray()

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.tocsr() @ u

    def to_json(self) -> dict:
        rows = (self.row_index + self.b * np.arange(self.zeta)[:, None]).ravel()
        cols = np.tile(np.arange(self.n), self.zeta)
        vals = self.values.ravel()
        return {
            "rows": self.shape[0],
            "cols": self.shape[1],
            "triplets": [[int(i), int(j), float(np.real(v)), float(np.imag(v))]
                         for i, j, v in zip(rows, cols, vals)],
        }


def _signs(rng, size, fld):
    if fld == "complex":
        return np.exp(2j * np.pi * rng.random(size))
    if fld == "real":
        return rng.choice((-1.0, 1.0), size=size)
    raise ValueError(f"unknown field {fld!r}")


def sparsestack(b: int, zeta: int, n: int, rng, field: str = "complex") -> SparseSketch:
    """SparseStack: ``zeta`` iid CountSketches of size ``b x n`` stacked, scaled by ``zeta^{-1/2}``.

    Steinhaus entries (uniform on the unit circle) by default; ``field='real'``
    uses random signs.
    """
    if min(b, zeta, n) < 1:
        raise ValueError("b, zeta and n must be positive")
    rng = as_generator(rng)
    rows = rng.integers(0, b, size=(zeta, n))
    vals = _signs(rng, (zeta, n), field) / math.sqrt(zeta)
    return SparseSketch(b, zeta, n, rows, vals)


def countsketch(b: int, n: int, rng, field: str = "complex") -> SparseSketch:
    """CountSketch: one unit-modulus entry per column, at a uniform row."""
    return sparsestack(b, 1, n, rng, field)


def subspace_gram(phi, u) -> tuple[np.ndarray, float]:
    """``W = U* Phi* Phi U`` and its smallest eigenvalue ``sigma_min(Phi U)^2``."""
    u = np.asarray(u)
    d = u.shape[1]
    if np.linalg.norm(u.conj().T @ u - np.eye(d), 2) > 1e-10:
        raise ValueError("U must have orthonormal columns")
    pu = phi.apply(u) if isinstance(phi, SparseSketch) else np.asarray(phi) @ u
    w = pu.conj().T @ pu
    w = (w + w.conj().T) / 2
    return w, eig_extremes(w)[0]


def sparsestack_embedding(u, b: int, zeta: int, field: str = "complex") -> SummandEnsemble:
    """Ensemble of ``Y = U* Phi* Phi U`` for a SparseStack ``Phi`` and fixed orthonormal `U`.

    ``Y`` is a sum of ``zeta`` iid psd summands, one per CountSketch block, each
    with mean ``I/zeta``, so ``r_minus = 1/zeta``. The dominating proxy is
    ``I + k^{-1/2}`` times a GUE matrix.
    """
    u = np.asarray(u)
    n, d = u.shape
    if np.linalg.norm(u.conj().T @ u - np.eye(d), 2) > 1e-10:
        raise ValueError("U must have orthonormal columns")
    k = b * zeta

    def sampler(rng):
        return subspace_gram(sparsestack(b, zeta, n, rng, field), u)[0]

    def summands(rng):
        pu = sparsestack(b, zeta, n, rng, field).apply(u).reshape(zeta, b, d)
        return np.einsum("jri,jrk->jik", pu.conj(), pu)

    dom = gm.shift(gm.scale(gm.gue(d), 1 / math.sqrt(k)), np.eye(d))
    return SummandEnsemble(
        kind="sparsestack_embedding",
        params={"n": n, "d": d, "b": b, "zeta": zeta, "k": k},
        dim=d,
        mean=np.eye(d),
        sampler=sampler,
        summand_sampler=summands,
        summand_mean=np.eye(d) / zeta,
        n_summands=zeta,
        r_minus=1.0 / zeta,
        field=field,
        dominating_proxy=dom,
        metadata={"zeta": zeta, "b": b, "k": k},
    )
