"""Self-adjoint and rectangular matrix containers, extreme eigenvalues, dilation.

Most routines in the package work on plain :class:`numpy.ndarray` objects.
:class:`SymMatrix` and :class:`RectMatrix` are thin immutable wrappers used at
API boundaries and for JSON round-trips; every function here accepts either a
wrapper or an array.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

__all__ = [
    "SymMatrix",
    "RectMatrix",
    "as_hermitian",
    "eig_extremes",
    "spectrum",
    "dilate",
    "spectral_norm",
    "inner",
    "field_of",
    "DENSE_LIMIT",
]

#: Largest dimension handled by a dense eigensolve.
DENSE_LIMIT = 4096

_ASYM_TOL = 1e-12


def field_of(a) -> str:
    return "complex" if np.iscomplexobj(a) else "real"


def _check_finite(a):
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")


def as_hermitian(a, *, check: bool = True) -> np.ndarray:
    """Return ``(A + A*)/2`` as a fresh array.

    Raises ``ValueError`` when the asymmetry of `a` exceeds ``1e-12`` of its
    Frobenius norm, or when `a` is not square or has non-finite entries.
    """
    if isinstance(a, SymMatrix):
        return a.entries
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.iscomplexobj(a):
        a = a.astype(float, copy=False)
    _check_finite(a)
    ah = a.conj().T
    if check:
        scale = np.linalg.norm(a)
        if np.linalg.norm(a - ah) > _ASYM_TOL * max(scale, 1.0):
            raise ValueError("matrix is not self-adjoint")
    return (a + ah) / 2


class SymMatrix:
    """Immutable dense self-adjoint matrix over the reals or complexes.

    The entries are symmetrized at construction, so the stored array is exactly
    self-adjoint and its diagonal is real.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = as_hermitian(entries)
        if np.iscomplexobj(a):
            a[np.diag_indices_from(a)] = a.diagonal().real
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def field(self) -> str:
        return field_of(self._a)

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self):
        return f"SymMatrix(dim={self.dim}, field={self.field!r})"

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.dim, self._a.tobytes()))

    def to_json(self) -> dict:
        return {"dim": self.dim, "field": self.field, "entries": _encode_entries(self._a)}

    @classmethod
    def from_json(cls, obj: dict) -> "SymMatrix":
        d = int(obj["dim"])
        return cls(_decode_entries(obj["entries"], obj["field"], (d, d)))


class RectMatrix:
    """Immutable dense ``d1 x d2`` matrix."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=complex if np.iscomplexobj(entries) else float)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        _check_finite(a)
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def field(self) -> str:
        return field_of(self._a)

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self):
        return f"RectMatrix(rows={self.rows}, cols={self.cols}, field={self.field!r})"

    def __eq__(self, other):
        return isinstance(other, RectMatrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "field": self.field,
            "entries": _encode_entries(self._a),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RectMatrix":
        shape = (int(obj["rows"]), int(obj["cols"]))
        return cls(_decode_entries(obj["entries"], obj["field"], shape))


def _encode_entries(a: np.ndarray) -> list:
    flat = a.ravel()
    if np.iscomplexobj(a):
        return [[float(z.real), float(z.imag)] for z in flat]
    return [float(x) for x in flat]


def _decode_entries(entries, field, shape) -> np.ndarray:
    if field == "complex":
        arr = np.asarray(entries, dtype=float).reshape(-1, 2)
        out = arr[:, 0] + 1j * arr[:, 1]
    elif field == "real":
        out = np.asarray(entries, dtype=float)
    else:
        raise ValueError(f"unknown field tag {field!r}")
    return out.reshape(shape)


def _raw(a):
    if isinstance(a, (SymMatrix, RectMatrix)):
        return a.entries
    return a


def spectrum(a) -> np.ndarray:
    """Eigenvalues of a self-adjoint matrix, sorted in descending order."""
    a = as_hermitian(_raw(a))
    return np.linalg.eigvalsh(a)[::-1]


def _lanczos_extremes(op, dim, tol, maxiter):
    # ARPACK is an implicitly restarted Lanczos iteration
    kw = dict(k=1, tol=tol, maxiter=maxiter, return_eigenvectors=False)
    lo = spla.eigsh(op, which="SA", **kw)[0]
    hi = spla.eigsh(op, which="LA", **kw)[0]
    return float(lo), float(hi)


def eig_extremes(a, *, tol: float = 1e-8, maxiter: int | None = None) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a self-adjoint matrix or operator.

    Dense input up to :data:`DENSE_LIMIT` uses a full symmetric eigensolve.
    Larger dense input and :class:`scipy.sparse.linalg.LinearOperator`
    instances use a Lanczos iteration with relative tolerance `tol` and at most
    ``10 * d`` iterations by default.
    """
    if isinstance(a, spla.LinearOperator):
        d = a.shape[0]
        if d <= 2:
            dense = a @ np.eye(d)
            return eig_extremes(dense)
        return _lanczos_extremes(a, d, tol, maxiter or 10 * d)
    a = as_hermitian(_raw(a))
    d = a.shape[0]
    if d <= DENSE_LIMIT:
        ev = np.linalg.eigvalsh(a)
        return float(ev[0]), float(ev[-1])
    return _lanczos_extremes(a, d, tol, maxiter or 10 * d)


def dilate(a) -> np.ndarray:
    """Self-adjoint dilation ``[[0, A], [A*, 0]]`` of a rectangular matrix."""
    a = np.asarray(_raw(a))
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    d1, d2 = a.shape
    out = np.zeros((d1 + d2, d1 + d2), dtype=a.dtype if np.iscomplexobj(a) else float)
    out[:d1, d1:] = a
    out[d1:, :d1] = a.conj().T
    return out


def spectral_norm(a) -> float:
    """Spectral norm, computed as the top eigenvalue of the dilation."""
    a = np.asarray(_raw(a))
    d1, d2 = a.shape
    if min(d1, d2) == 0:
        return 0.0
    if d1 + d2 <= 64:
        return eig_extremes(dilate(a))[1]
    # lambda_max(dilate(A))^2 is the top eigenvalue of the smaller Gram matrix
    gram = a @ a.conj().T if d1 <= d2 else a.conj().T @ a
    return float(np.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))


def inner(a, m) -> float:
    """Real trace inner product ``Re Tr(A* M)``."""
    return float(np.vdot(np.asarray(_raw(a)), np.asarray(_raw(m))).real)
