r"""Gaussian self-adjoint matrices as finite Gaussian series.

A :class:`GaussianModel` realizes

.. math::  Z = \Delta + \sum_k \gamma_k A_k, \qquad \gamma_k \sim N(0, 1) \text{ iid},

so its variance function is :math:`M \mapsto \sum_k \langle A_k, M\rangle^2`.
The standard ensembles (GOE, GUE, the zero-diagonal Wigner series, rectangular
iid matrices) are stored by structure tag: their coefficient lists are never
materialized unless asked for, they sample in :math:`O(d^2)`, and their
statistics are available in closed form.

Rectangular models are stored through their self-adjoint dilation, so every
statistic reported for them is the statistic of the dilation. With the real
trace inner product on rectangular matrices these agree with the rectangular
definitions, e.g. ``iid_rect(d1, d2)`` has ``sigma2 = max(d1, d2)``,
``sigma_star2 = 1`` and ``w = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import SymMatrix, RectMatrix, as_hermitian, dilate
from .rng import as_generator

__all__ = [
    "GaussianModel",
    "GaussianStats",
    "WeakVariance",
    "goe",
    "gue",
    "offdiag_wigner",
    "iid_rect",
    "generic",
    "scale",
    "shift",
    "direct_sum",
    "embed",
    "sample",
    "variance",
    "matrix_variance",
    "weak_variance",
    "interaction_energy",
    "fluctuation_mc",
    "khinchin_bounds",
    "intrinsic_freeness_upper",
    "empirical_proxy",
    "covariance_proxy",
    "gaussian_stats",
]

# refuse to materialize coefficient stacks larger than this many scalars
_MAX_COEFF_ENTRIES = 50_000_000

CLOSED_FORM = "closed_form"
COMPUTED_EXACT = "computed_exact"
MC_ESTIMATE = "mc_estimate"
LOWER_BOUND = "lower_bound"

_TAGGED = ("goe", "gue", "offdiag", "iid_rect")


class GaussianModel:
    """Gaussian self-adjoint matrix ``mean + sum_k gamma_k A_k``.

    Use the constructors :func:`goe`, :func:`gue`, :func:`offdiag_wigner`,
    :func:`iid_rect`, :func:`generic`, :func:`embed` and :func:`direct_sum`
    rather than calling this class directly.

    Attributes
    ----------
    kind : str
        One of ``goe``, ``gue``, ``offdiag``, ``iid_rect``, ``embed``,
        ``direct_sum`` or ``generic``.
    scale : float
        Common factor ``c`` multiplying every coefficient of a tagged model.
    rect_shape : tuple or None
        ``(d1, d2)`` when the model is the dilation of a rectangular matrix.
    """

    def __init__(self, kind, dim, mean=None, *, scale=1.0, coeffs=None,
                 parts=(), basis=None, rect_shape=None, field="real"):
        self.kind = kind
        self.dim = int(dim)
        self.scale = float(scale)
        self.parts = tuple(parts)
        self.basis = basis
        self.rect_shape = rect_shape
        if mean is None:
            mean = np.zeros((self.dim, self.dim))
        self.mean = as_hermitian(mean)
        if self.mean.shape != (self.dim, self.dim):
            raise ValueError(f"mean has shape {self.mean.shape}, expected {(self.dim, self.dim)}")
        self.mean.setflags(write=False)
        self._coeffs = None
        if coeffs is not None:
            coeffs = np.asarray(coeffs)
            if coeffs.ndim != 3 or coeffs.shape[1:] != (self.dim, self.dim):
                raise ValueError(f"coefficient stack has shape {coeffs.shape}")
            if not np.iscomplexobj(coeffs):
                coeffs = coeffs.astype(float)
            herm = np.swapaxes(coeffs.conj(), 1, 2)
            if np.linalg.norm(coeffs - herm) > 1e-12 * max(np.linalg.norm(coeffs), 1.0):
                raise ValueError("coefficients must be self-adjoint")
            coeffs = (coeffs + herm) / 2
            coeffs.setflags(write=False)
            self._coeffs = coeffs
        if np.iscomplexobj(self.mean) or field == "complex":
            self.field = "complex"
        else:
            self.field = "real"

    def __repr__(self):
        extra = f", rect_shape={self.rect_shape}" if self.rect_shape else ""
        return f"GaussianModel(kind={self.kind!r}, dim={self.dim}, scale={self.scale:g}{extra})"

    @property
    def is_rect(self) -> bool:
        return self.rect_shape is not None

    @property
    def n_coeffs(self) -> int:
        d, k = self.dim, self.kind
        if k == "goe":
            return d * (d + 1) // 2 if self.scale else 0
        if k == "gue":
            return d * d if self.scale else 0
        if k == "offdiag":
            return d * (d - 1) // 2 if self.scale else 0
        if k == "iid_rect":
            return self.rect_shape[0] * self.rect_shape[1] if self.scale else 0
        if k == "embed":
            return self.parts[0].n_coeffs
        if k == "direct_sum":
            return sum(p.n_coeffs for p in self.parts)
        return self._coeffs.shape[0]

    # ------------------------------------------------------------------ coefficients

    def coefficients(self) -> np.ndarray:
        """Materialize the coefficient stack, shape ``(m, d, d)``."""
        if self._coeffs is not None:
            return self._coeffs
        m, d = self.n_coeffs, self.dim
        if m * d * d > _MAX_COEFF_ENTRIES:
            raise MemoryError(f"{m} coefficients of dimension {d} is too many to materialize")
        dtype = complex if self.field == "complex" else float
        out = np.zeros((m, d, d), dtype=dtype)
        c = self.scale
        if m == 0:
            pass
        elif self.kind == "goe":
            iu, ju = np.triu_indices(d)
            idx = np.arange(len(iu))
            off = iu != ju
            out[idx, iu, ju] = np.where(off, c, c * math.sqrt(2))
            out[idx, ju, iu] = np.where(off, c, c * math.sqrt(2))
        elif self.kind == "offdiag":
            iu, ju = np.triu_indices(d, 1)
            idx = np.arange(len(iu))
            out[idx, iu, ju] = c
            out[idx, ju, iu] = c
        elif self.kind == "gue":
            r = 0
            for j in range(d):
                out[r, j, j] = c
                r += 1
            s = c / math.sqrt(2)
            for j in range(d):
                for k in range(j + 1, d):
                    out[r, j, k] = out[r, k, j] = s
                    out[r + 1, j, k] = 1j * s
                    out[r + 1, k, j] = -1j * s
                    r += 2
        elif self.kind == "iid_rect":
            d1, d2 = self.rect_shape
            j, k = np.divmod(np.arange(d1 * d2), d2)
            out[np.arange(m), j, d1 + k] = c
            out[np.arange(m), d1 + k, j] = c
        elif self.kind == "embed":
            q = self.basis
            inner = self.parts[0].coefficients()
            out = np.einsum("ij,mjk,lk->mil", q, inner, q.conj())
        elif self.kind == "direct_sum":
            a, b = self.parts
            out[: a.n_coeffs, : a.dim, : a.dim] = a.coefficients()
            out[a.n_coeffs:, a.dim:, a.dim:] = b.coefficients()
        out.setflags(write=False)
        self._coeffs = out
        return out

    # ------------------------------------------------------------------ sampling

    def sample_centered(self, rng, size=None) -> np.ndarray:
        """Draw ``Z - E Z``; shape ``(d, d)`` or ``(size, d, d)``."""
        rng = as_generator(rng)
        shape = () if size is None else (int(size),)
        d, c, k = self.dim, self.scale, self.kind
        if k == "goe":
            g = rng.standard_normal(shape + (d, d))
            return c * (g + np.swapaxes(g, -1, -2)) / math.sqrt(2)
        if k == "offdiag":
            g = np.triu(rng.standard_normal(shape + (d, d)), 1)
            return c * (g + np.swapaxes(g, -1, -2))
        if k == "gue":
            g = rng.standard_normal(shape + (d, d)) + 1j * rng.standard_normal(shape + (d, d))
            return c * (g + np.swapaxes(g.conj(), -1, -2)) / 2
        if k == "iid_rect":
            d1, d2 = self.rect_shape
            x = c * rng.standard_normal(shape + (d1, d2))
            out = np.zeros(shape + (d, d))
            out[..., :d1, d1:] = x
            out[..., d1:, :d1] = np.swapaxes(x, -1, -2)
            return out
        if k == "embed":
            inner = self.parts[0].sample_centered(rng, size)
            q = self.basis
            return q @ inner @ q.conj().T
        if k == "direct_sum":
            a, b = self.parts
            xa = a.sample_centered(rng, size)
            xb = b.sample_centered(rng, size)
            dtype = complex if self.field == "complex" else float
            out = np.zeros(shape + (d, d), dtype=dtype)
            out[..., : a.dim, : a.dim] = xa
            out[..., a.dim:, a.dim:] = xb
            return out
        coeffs = self._coeffs
        if coeffs.shape[0] == 0:
            return np.zeros(shape + (d, d), dtype=coeffs.dtype)
        g = rng.standard_normal(shape + (coeffs.shape[0],))
        return np.tensordot(g, coeffs, axes=(-1, 0))

    def sample(self, rng, size=None) -> np.ndarray:
        return self.mean + self.sample_centered(rng, size)

    def sample_rect(self, rng) -> np.ndarray:
        """Draw the rectangular matrix whose dilation this model describes."""
        if not self.is_rect:
            raise ValueError("model is not a rectangular dilation")
        d1 = self.rect_shape[0]
        return self.sample(rng)[:d1, d1:]

    # ------------------------------------------------------------------ serialization

    def to_json(self) -> dict:
        obj = {"mean": SymMatrix(self.mean).to_json(), "structure_tag": {"kind": self.kind}}
        tag = obj["structure_tag"]
        if self.kind in _TAGGED:
            tag.update(dim=self.dim, scale=self.scale)
            if self.is_rect:
                tag.update(rows=self.rect_shape[0], cols=self.rect_shape[1])
            obj["coeffs"] = []
        elif self.kind == "embed":
            tag.update(inner=self.parts[0].to_json(), basis=RectMatrix(self.basis).to_json())
            obj["coeffs"] = []
        elif self.kind == "direct_sum":
            tag.update(parts=[p.to_json() for p in self.parts])
            obj["coeffs"] = []
        else:
            obj["coeffs"] = [SymMatrix(a).to_json() for a in self._coeffs]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "GaussianModel":
        mean = SymMatrix.from_json(obj["mean"]).entries
        tag = obj["structure_tag"]
        kind = tag["kind"]
        if kind == "goe":
            m = goe(tag["dim"])
        elif kind == "gue":
            m = gue(tag["dim"])
        elif kind == "offdiag":
            m = offdiag_wigner(tag["dim"])
        elif kind == "iid_rect":
            m = iid_rect(tag["rows"], tag["cols"])
        elif kind == "embed":
            return shift(embed(cls.from_json(tag["inner"]),
                               RectMatrix.from_json(tag["basis"]).entries), mean, replace=True)
        elif kind == "direct_sum":
            a, b = (cls.from_json(p) for p in tag["parts"])
            return shift(direct_sum(a, b), mean, replace=True)
        else:
            coeffs = [SymMatrix.from_json(a).entries for a in obj["coeffs"]]
            d = mean.shape[0]
            stack = np.array(coeffs) if coeffs else np.zeros((0, d, d))
            return generic(mean, stack)
        return shift(scale(m, tag["scale"]), mean, replace=True)


# ---------------------------------------------------------------------- constructors


def goe(d: int) -> GaussianModel:
    """GOE: iid N(0,1) entries above the diagonal, N(0,2) on it."""
    return GaussianModel("goe", d)


def gue(d: int) -> GaussianModel:
    """GUE: iid complex standard normal entries above the diagonal, N(0,1) on it."""
    return GaussianModel("gue", d, field="complex")


def offdiag_wigner(d: int) -> GaussianModel:
    """Zero-diagonal Wigner series ``sum_{j<k} gamma_jk (E_jk + E_kj)``."""
    return GaussianModel("offdiag", d)


def iid_rect(d1: int, d2: int) -> GaussianModel:
    """Dilation of a ``d1 x d2`` matrix with iid N(0,1) entries."""
    return GaussianModel("iid_rect", d1 + d2, rect_shape=(int(d1), int(d2)))


def generic(mean, coeffs) -> GaussianModel:
    """Model from an explicit mean and coefficient stack of shape ``(m, d, d)``."""
    mean = as_hermitian(mean)
    coeffs = np.asarray(coeffs)
    if coeffs.size == 0:
        coeffs = np.zeros((0,) + mean.shape, dtype=mean.dtype)
    fld = "complex" if np.iscomplexobj(coeffs) else "real"
    return GaussianModel("generic", mean.shape[0], mean, coeffs=coeffs, field=fld)


def _clone(model, **changes):
    kw = dict(scale=model.scale, parts=model.parts, basis=model.basis,
              rect_shape=model.rect_shape, field=model.field)
    kw.update(changes)
    mean = kw.pop("mean", model.mean)
    coeffs = kw.pop("coeffs", model._coeffs if model.kind == "generic" else None)
    return GaussianModel(model.kind, model.dim, mean, coeffs=coeffs, **kw)


def scale(model: GaussianModel, c: float) -> GaussianModel:
    """Multiply every coefficient by `c`; the mean is unchanged."""
    c = float(c)
    if model.kind in _TAGGED:
        return _clone(model, scale=model.scale * c)
    if model.kind == "embed":
        return _clone(model, parts=(scale(model.parts[0], c),))
    if model.kind == "direct_sum":
        return _clone(model, parts=tuple(scale(p, c) for p in model.parts))
    return _clone(model, coeffs=c * model._coeffs)


def shift(model: GaussianModel, delta, *, replace: bool = False) -> GaussianModel:
    """Add `delta` to the mean (or replace the mean when ``replace=True``)."""
    delta = as_hermitian(delta)
    if delta.shape != model.mean.shape:
        raise ValueError("shift has the wrong shape")
    mean = delta if replace else model.mean + delta
    return _clone(model, mean=mean)


def direct_sum(a: GaussianModel, b: GaussianModel) -> GaussianModel:
    """Block-diagonal model ``Z_a (+) Z_b`` with independent blocks."""
    d = a.dim + b.dim
    cplx = "complex" if "complex" in (a.field, b.field) else "real"
    mean = np.zeros((d, d), dtype=complex if cplx == "complex" else float)
    mean[: a.dim, : a.dim] = a.mean
    mean[a.dim:, a.dim:] = b.mean
    return GaussianModel("direct_sum", d, mean, parts=(a, b), field=cplx)


def embed(model: GaussianModel, basis) -> GaussianModel:
    """Model ``Q Z Q*`` acting on the range of the orthonormal columns of `basis`."""
    q = np.asarray(basis)
    if q.ndim != 2 or q.shape[1] != model.dim:
        raise ValueError("basis must have one column per model dimension")
    if np.linalg.norm(q.conj().T @ q - np.eye(q.shape[1])) > 1e-10 * q.shape[1]:
        raise ValueError("basis columns must be orthonormal")
    q = q.copy()
    q.setflags(write=False)
    mean = q @ model.mean @ q.conj().T
    cplx = "complex" if (model.field == "complex" or np.iscomplexobj(q)) else "real"
    return GaussianModel("embed", q.shape[0], mean, parts=(model,), basis=q, field=cplx)


# ---------------------------------------------------------------------- statistics


def sample(model: GaussianModel, rng) -> np.ndarray:
    """One draw ``Delta + sum_k gamma_k A_k``."""
    return model.sample(rng)


def variance(model: GaussianModel, m) -> float:
    """Variance function ``Var<Z, M> = sum_k <A_k, M>^2`` at a self-adjoint probe."""
    m = as_hermitian(m)
    s = model.scale ** 2
    d, k = model.dim, model.kind
    if k == "goe":
        return float(2 * s * np.sum(m.real ** 2))
    if k == "gue":
        return float(s * np.sum(np.abs(m) ** 2))
    if k == "offdiag":
        r = m.real.copy()
        np.fill_diagonal(r, 0.0)
        return float(2 * s * np.sum(r ** 2))
    if k == "iid_rect":
        d1 = model.rect_shape[0]
        return float(4 * s * np.sum(m[:d1, d1:].real ** 2))
    if k == "embed":
        q = model.basis
        return variance(model.parts[0], q.conj().T @ m @ q)
    if k == "direct_sum":
        a, b = model.parts
        return variance(a, m[: a.dim, : a.dim]) + variance(b, m[a.dim:, a.dim:])
    coeffs = model._coeffs
    if coeffs.shape[0] == 0:
        return 0.0
    ips = np.einsum("kij,ij->k", coeffs.conj(), m).real
    return float(ips @ ips)


def _closed(model):
    """(sigma2, sigma_star2, w) for tagged models, else None."""
    s, d, k = model.scale ** 2, model.dim, model.kind
    if k == "goe":
        return s * (d + 1), 2 * s, 2 * s
    if k == "gue":
        return s * d, s, s
    if k == "offdiag":
        if d < 2:
            return 0.0, 0.0, 0.0
        return s * (d - 1), 2 * s * (1 - 1 / d), 2 * s
    if k == "iid_rect":
        return s * max(model.rect_shape), s, 2 * s
    if k == "embed":
        return _closed(model.parts[0])
    if k == "direct_sum":
        a, b = (_closed(p) for p in model.parts)
        if a is None or b is None:
            return None
        return tuple(max(x, y) for x, y in zip(a, b))
    return None


def matrix_variance(model: GaussianModel) -> float:
    """Matrix variance ``|| sum_k A_k^2 ||``."""
    closed = _closed(model)
    if closed is not None:
        return float(closed[0])
    if model.kind == "direct_sum":
        return max(matrix_variance(p) for p in model.parts)
    if model.kind == "embed":
        return matrix_variance(model.parts[0])
    coeffs = model._coeffs
    if coeffs.shape[0] == 0:
        return 0.0
    sq = np.einsum("kij,kjl->il", coeffs, coeffs)
    return float(max(np.linalg.eigvalsh(as_hermitian(sq, check=False))[-1], 0.0))


def _real_vectors(coeffs):
    m = coeffs.shape[0]
    flat = coeffs.reshape(m, -1)
    if np.iscomplexobj(flat):
        return np.concatenate([flat.real, flat.imag], axis=1)
    return flat


def interaction_energy(model: GaussianModel) -> float:
    """Top eigenvalue of the Gram matrix ``G_kl = <A_k, A_l>``."""
    closed = _closed(model)
    if closed is not None:
        return float(closed[2])
    if model.kind == "direct_sum":
        return max(interaction_energy(p) for p in model.parts)
    if model.kind == "embed":
        return interaction_energy(model.parts[0])
    coeffs = model._coeffs
    if coeffs.shape[0] == 0:
        return 0.0
    v = _real_vectors(coeffs)
    g = v @ v.T if v.shape[0] <= v.shape[1] else v.T @ v
    return float(max(np.linalg.eigvalsh(g)[-1], 0.0))


class WeakVariance(NamedTuple):
    value: float
    exactness: str
    upper: float


def _quartic_values(coeffs, u):
    au = coeffs @ u                                   # (m, d, S)
    q = np.einsum("ds,mds->ms", u.conj(), au).real    # u* A_k u
    return au, q, np.sum(q * q, axis=0)


def _ascent_lower_bound(coeffs, rng, starts=32, iters=200):
    """Multi-start ascent of ``u -> sum_k (u* A_k u)^2`` on the unit sphere."""
    m, d, _ = coeffs.shape
    cplx = np.iscomplexobj(coeffs)
    n_eig = min(m, starts // 2)
    norms = np.linalg.norm(coeffs.reshape(m, -1), axis=1)
    chosen = np.argsort(norms)[::-1][:n_eig]
    cols = []
    for k in chosen:
        ev, vec = np.linalg.eigh(coeffs[k])
        cols.append(vec[:, np.argmax(np.abs(ev))])
    n_rand = starts - len(cols)
    rand = rng.standard_normal((d, n_rand))
    if cplx:
        rand = rand + 1j * rng.standard_normal((d, n_rand))
    u = np.column_stack(cols + [rand]) if cols else rand
    u = u.astype(complex if cplx else float)
    u /= np.linalg.norm(u, axis=0)
    au, q, f = _quartic_values(coeffs, u)
    best = f.max()
    shift_ = np.zeros(u.shape[1])
    bump = 3.0 * float(np.sum(norms ** 2)) ** 0.5 * max(norms.max(), 1e-300)
    for _ in range(iters):
        g = np.einsum("ms,mds->ds", q, au) + shift_ * u
        nrm = np.linalg.norm(g, axis=0)
        nrm[nrm == 0] = 1.0
        cand = g / nrm
        au_c, q_c, f_c = _quartic_values(coeffs, cand)
        ok = f_c >= f - 1e-15 * np.abs(f)
        u = np.where(ok, cand, u)
        au = np.where(ok[None, None, :], au_c, au)
        q = np.where(ok[None, :], q_c, q)
        gain = np.where(ok, f_c - f, 0.0)
        f = np.where(ok, f_c, f)
        shift_ = np.where(ok, shift_, 2 * shift_ + bump)
        new_best = f.max()
        if new_best - best <= 1e-13 * max(best, 1e-300) and np.all(gain <= 1e-13 * np.abs(f)):
            best = new_best
            break
        best = new_best
    return float(best)


def weak_variance(model: GaussianModel, rng=None, *, starts: int = 32,
                  iters: int = 200) -> WeakVariance:
    """Weak variance ``sup_{|u|=1} Var(u* Z u)``.

    Tagged models return the closed form. Generic models return a lower bound
    from multi-start ascent (every evaluated point is a valid lower bound),
    flagged ``lower_bound``, together with the upper bound ``w``.
    """
    closed = _closed(model)
    if closed is not None:
        return WeakVariance(float(closed[1]), CLOSED_FORM, float(closed[1]))
    w = interaction_energy(model)
    if model.kind == "direct_sum":
        parts = [weak_variance(p, rng, starts=starts, iters=iters) for p in model.parts]
        value = max(p.value for p in parts)
        exact = CLOSED_FORM if all(p.exactness == CLOSED_FORM for p in parts) else LOWER_BOUND
        return WeakVariance(value, exact, max(p.upper for p in parts))
    if model.kind == "embed":
        return weak_variance(model.parts[0], rng, starts=starts, iters=iters)
    coeffs = model._coeffs
    if coeffs.shape[0] == 0:
        return WeakVariance(0.0, COMPUTED_EXACT, 0.0)
    rng = as_generator(0 if rng is None else rng)
    lower = _ascent_lower_bound(coeffs, rng, starts=starts, iters=iters)
    return WeakVariance(min(lower, w), LOWER_BOUND, w)


def _centered_stat(model, x, kind):
    if kind == "eig":
        return np.linalg.eigvalsh(x)[..., -1]
    if kind == "norm":
        if model.is_rect:
            d1 = model.rect_shape[0]
            return np.linalg.norm(x[..., :d1, d1:], ord=2, axis=(-2, -1))
        return np.abs(np.linalg.eigvalsh(x)[..., [0, -1]]).max(axis=-1)
    raise ValueError(f"unknown fluctuation kind {kind!r}")


def fluctuation_samples(model: GaussianModel, trials: int, rng, kind: str = "eig",
                        batch: int = 64) -> np.ndarray:
    """Per-trial values of ``lambda_max(Z - EZ)`` or ``||Z - EZ||``."""
    rng = as_generator(rng)
    out = []
    left = int(trials)
    while left > 0:
        b = min(batch, left)
        out.append(_centered_stat(model, model.sample_centered(rng, b), kind))
        left -= b
    return np.concatenate(out) if out else np.zeros(0)


def fluctuation_mc(model: GaussianModel, trials: int, rng, kind: str = "eig") -> tuple[float, float]:
    """Monte-Carlo matrix fluctuation (``kind='eig'``) or norm fluctuation (``'norm'``).

    Returns ``(estimate, stderr)``.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    if model.n_coeffs == 0 or model.scale == 0:
        return 0.0, 0.0
    vals = fluctuation_samples(model, trials, rng, kind)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def khinchin_bounds(model: GaussianModel) -> tuple[float, float, float]:
    """Matrix Khinchin values ``(phi_upper_eig, phi_pm_upper, phi_pm_lower)``.

    ``phi <= sqrt(2 s2 log d)`` and
    ``sqrt((2/pi) s2) <= phi_pm <= sqrt(2 s2 log 2d)``.
    """
    s2 = matrix_variance(model)
    d = model.dim
    return (
        math.sqrt(2 * s2 * math.log(d)),
        math.sqrt(2 * s2 * math.log(2 * d)),
        math.sqrt(2 / math.pi * s2),
    )


def intrinsic_freeness_upper(model: GaussianModel, const: float) -> float:
    """``2 sqrt(s2) + const * (s2 * w * log^3 d)^(1/4)``; `const` is user supplied."""
    if const <= 0:
        raise ValueError("const must be positive")
    s2 = matrix_variance(model)
    w = interaction_energy(model)
    return 2 * math.sqrt(s2) + const * (s2 * w * math.log(model.dim) ** 3) ** 0.25


def empirical_proxy(samples, mean_override=None) -> GaussianModel:
    """Gaussian model matching the first two moments of a sample set.

    The coefficients are the centered samples divided by ``sqrt(S)``, so the
    variance function is the (biased) S-sample estimate
    ``(1/S) sum_s <X_s - mean, M>^2``.
    """
    xs = [as_hermitian(s) for s in samples]
    if len(xs) < 2:
        raise ValueError("need at least two samples")
    shapes = {x.shape for x in xs}
    if len(shapes) != 1:
        raise ValueError(f"inconsistent sample shapes {sorted(shapes)}")
    stack = np.array(xs)
    mean = stack.mean(axis=0) if mean_override is None else as_hermitian(mean_override)
    coeffs = (stack - mean) / math.sqrt(len(xs))
    return generic(mean, coeffs)


@dataclass
class GaussianStats:
    """Summary statistics of a Gaussian model with per-field exactness flags."""

    sigma2: float
    sigma_star2: float
    w: float
    phi: float | None = None
    phi_stderr: float | None = None
    phi_pm: float | None = None
    phi_pm_stderr: float | None = None
    sigma_star2_upper: float | None = None
    exactness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def gaussian_stats(model: GaussianModel, mc_trials: int = 0, rng=None) -> GaussianStats:
    closed = _closed(model) is not None
    wv = weak_variance(model, rng)
    st = GaussianStats(
        sigma2=matrix_variance(model),
        sigma_star2=wv.value,
        w=interaction_energy(model),
        sigma_star2_upper=wv.upper,
        exactness={
            "sigma2": CLOSED_FORM if closed else COMPUTED_EXACT,
            "sigma_star2": wv.exactness,
            "w": CLOSED_FORM if closed else COMPUTED_EXACT,
        },
    )
    if mc_trials >= 2:
        rng = as_generator(rng)
        st.phi, st.phi_stderr = fluctuation_mc(model, mc_trials, rng, "eig")
        st.phi_pm, st.phi_pm_stderr = fluctuation_mc(model, mc_trials, rng, "norm")
        st.exactness["phi"] = st.exactness["phi_pm"] = MC_ESTIMATE
    return st


def covariance_proxy(samples, mean=None) -> GaussianModel:
    """Gaussian model whose variance function is the sample covariance of `samples`.

    Unlike :func:`empirical_proxy`, the number of coefficients is at most the
    real dimension of the matrix space (``d^2``, or ``2 d^2`` for complex
    input), so this scales to large sample counts.
    """
    stack = np.asarray(samples)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2] or stack.shape[0] < 2:
        raise ValueError("need at least two square samples of a common shape")
    s, d, _ = stack.shape
    mu = stack.mean(axis=0) if mean is None else np.asarray(mean)
    centered = stack - mu
    vec = _real_vectors(centered)
    cov = vec.T @ vec / s
    lam, vecs = np.linalg.eigh(cov)
    keep = lam > 1e-14 * max(lam.max(initial=0.0), 1e-300)
    cols = vecs[:, keep] * np.sqrt(lam[keep])
    if np.iscomplexobj(centered):
        coeffs = (cols[: d * d] + 1j * cols[d * d:]).T.reshape(-1, d, d)
    else:
        coeffs = cols.T.reshape(-1, d, d)
    coeffs = (coeffs + np.swapaxes(coeffs.conj(), 1, 2)) / 2
    return generic(as_hermitian(mu), coeffs)
