"""Matrix functions F(v_1, ..., v_l) with values in SL_d.

Each function evaluates a whole batch at once: ``batch(values)`` takes an
array of shape (l, *shape) and returns (*shape, d, d).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotUnimodular
from .linalg import DET_TOLERANCE


def _sum(values):
    return np.sum(values, axis=0)


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    tag: str
    dim: int
    ell: int = None  # None: any arity
    evaluator: object = None
    vectorized: bool = True
    params: dict = field(default_factory=dict)

    def batch(self, values):
        values = np.asarray(values, dtype=float)
        if self.ell is not None and values.shape[0] != self.ell:
            raise ValueError(f"{self.tag} expects {self.ell} arguments, got {values.shape[0]}")
        if self.vectorized:
            return self.evaluator(values)
        shape = values.shape[1:]
        flat = values.reshape(values.shape[0], -1)
        out = np.empty((flat.shape[1], self.dim, self.dim))
        for j in range(flat.shape[1]):
            out[j] = self.evaluator(*flat[:, j])
        dets = np.linalg.det(out)
        if np.any(np.abs(dets - 1.0) > DET_TOLERANCE):
            j = int(np.argmax(np.abs(dets - 1.0)))
            raise NotUnimodular(f"{self.tag}: det = {dets[j]!r} at arguments {flat[:, j].tolist()}")
        return out.reshape(shape + (self.dim, self.dim))

    def __call__(self, *values):
        return self.batch(np.array(values, dtype=float).reshape(len(values)))

    def describe(self):
        return {"kind": self.tag, **self.params}


def schrodinger(lam, combine=None, ell=None):
    """Transfer matrix [[lam - V, -1], [1, 0]] with V = combine(v_1..v_l) (default: sum)."""
    combine = combine or _sum

    def F(values):
        V = combine(values)
        out = np.zeros(V.shape + (2, 2))
        out[..., 0, 0] = lam - V
        out[..., 0, 1] = -1.0
        out[..., 1, 0] = 1.0
        return out

    return MatrixFunction("schrodinger", 2, ell, F, params={"lambda": lam})


def diag_exp(ell=None):
    """diag(e^s, e^-s) with s = v_1 + ... + v_l."""

    def F(values):
        s = np.sum(values, axis=0)
        out = np.zeros(s.shape + (2, 2))
        out[..., 0, 0] = np.exp(s)
        out[..., 1, 1] = np.exp(-s)
        return out

    return MatrixFunction("diag_exp", 2, ell, F)


def rotation(ell=None):
    """Planar rotation by the angle v_1 + ... + v_l."""

    def F(values):
        theta = np.sum(values, axis=0)
        c, s = np.cos(theta), np.sin(theta)
        out = np.empty(theta.shape + (2, 2))
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
        return out

    return MatrixFunction("rotation", 2, ell, F)


def constant(M, ell=None):
    """Ignores its arguments and returns ``M``."""
    M = np.array(M, dtype=float)
    if abs(np.linalg.det(M) - 1.0) > DET_TOLERANCE:
        raise NotUnimodular(f"constant matrix has det {np.linalg.det(M)!r}")

    def F(values):
        return np.broadcast_to(M, values.shape[1:] + M.shape).copy()

    return MatrixFunction("constant", M.shape[0], ell, F, params={"matrix": M.tolist()})


def gaussian_sl(d):
    """Arguments v_1..v_{d^2} read row-major into a matrix, sign-fixed and scaled to det 1."""

    def F(values):
        A = np.moveaxis(values, 0, -1).reshape(values.shape[1:] + (d, d)).copy()
        det = np.linalg.det(A)
        A[det < 0, 0, :] *= -1.0
        return A / (np.abs(det) ** (1.0 / d))[..., None, None]

    return MatrixFunction("gaussian_sl", d, d * d, F, params={"dim": d})


def user(evaluator, dim, ell):
    """Wrap a scalar evaluator (v_1, ..., v_l) -> d x d matrix; outputs are det-checked."""
    return MatrixFunction("user", dim, ell, evaluator, vectorized=False)


BUILTINS = {
    "schrodinger": "[[lambda - V, -1], [1, 0]], V = sum of arguments (d = 2)",
    "diag_exp": "diag(e^s, e^-s), s = sum of arguments (d = 2)",
    "rotation": "rotation by angle = sum of arguments (d = 2)",
    "constant": "fixed unimodular matrix, arguments ignored",
    "gaussian_sl": "d^2 arguments as a matrix, normalized to det 1",
}
