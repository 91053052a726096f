"""Small dense linear algebra for d x d matrices with d <= 8.

Singular values come from a one-sided (Hestenes) Jacobi iteration, which keeps
high relative accuracy on the tiny matrices used here. Matrices are plain
``numpy`` arrays; :func:`as_matrix` is the validating constructor.
"""

import math
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BadOrder, SingularInput

MAX_DIM = 8
DET_TOLERANCE = 1e-9
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60


def as_matrix(M):
    """Validate and copy ``M`` as a finite square float matrix, 1 <= d <= 8."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not 1 <= A.shape[0] <= MAX_DIM:
        raise ValueError(f"dimension {A.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def is_unimodular(M, tol=DET_TOLERANCE):
    return abs(np.linalg.det(M) - 1.0) <= tol


def renormalize_unimodular(M):
    """Scale ``M`` to determinant one by dividing by det^(1/d).

    A negative determinant can be fixed by scaling only in odd dimension
    (by a negative root); in even dimension it is rejected.
    """
    A = as_matrix(M)
    d = A.shape[0]
    det = np.linalg.det(A)
    if det == 0.0:
        raise SingularInput("cannot renormalize a singular matrix")
    if det < 0:
        if d % 2 == 0:
            raise ValueError("negative determinant in even dimension")
        return A / -((-det) ** (1.0 / d))
    return A / det ** (1.0 / d)


def _jacobi(A):
    """Return column norms and the orthogonalized columns of ``A``."""
    U = A.copy()
    d = U.shape[1]
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                up = U[:, p]
                uq = U[:, q]
                alpha = up @ up
                beta = uq @ uq
                gamma = up @ uq
                if abs(gamma) <= JACOBI_TOL * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                new_p = c * up - s * uq
                U[:, q] = s * up + c * uq
                U[:, p] = new_p
        if not rotated:
            break
    return np.sqrt(np.einsum("ij,ij->j", U, U))


_SPLIT = 134217729.0  # 2^27 + 1


def _exact_product(a, b):
    """a * b = p + e exactly (Dekker), barring under/overflow."""
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def det2(M):
    """Determinant of a 2 x 2 matrix with the cross products formed error-free."""
    p1, e1 = _exact_product(float(M[0, 0]), float(M[1, 1]))
    p2, e2 = _exact_product(float(M[0, 1]), float(M[1, 0]))
    return (p1 - p2) + (e1 - e2)


def singular_values(M):
    """Singular values s_1 >= ... >= s_d > 0 of an invertible matrix.

    For d = 2 the smaller value is |det M| / s_1 with an accurately computed
    determinant, which keeps full relative accuracy on ill-conditioned
    matrices. Raises SingularInput when the smallest value is zero or below
    d * eps * s_1.
    """
    A = as_matrix(M)
    norms = _jacobi(A)
    # stable descending sort keeps Jacobi order on exact ties
    order = np.argsort(-norms, kind="stable")
    s = norms[order]
    if A.shape[0] == 2 and s[0] > 0:
        s[1] = min(abs(det2(A)) / s[0], s[0])
    if s[-1] <= A.shape[0] * np.finfo(float).eps * s[0] or s[-1] == 0.0:
        raise SingularInput(f"numerically rank deficient (s_min={s[-1]:.3g})")
    return s


def operator_norm(M):
    """Euclidean operator norm s_1(M). A zero matrix has norm 0."""
    A = as_matrix(M)
    return float(_jacobi(A).max())


def inverse_norm(M):
    """||M^-1|| = 1 / s_d(M)."""
    return float(1.0 / singular_values(M)[-1])


@lru_cache(maxsize=None)
def wedge_basis(d, k):
    """Lexicographically ordered k-subsets of range(d), as an int array."""
    return np.array(list(combinations(range(d), k)), dtype=np.intp).reshape(-1, k)


def exterior_power_batch(mats, k):
    """k-th exterior power of a stack of matrices ``(..., d, d)``.

    Entry (I, J) of the result is the k x k minor det M[I, J] with I, J
    running over lexicographically ordered k-subsets.
    """
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[-1]
    if not 1 <= k <= d:
        raise BadOrder(f"exterior power order {k} outside 1..{d}")
    if k == 1:
        return mats.copy()
    idx = wedge_basis(d, k)
    rows = idx[:, None, :, None]
    cols = idx[None, :, None, :]
    minors = mats[..., rows, cols]
    if k == 2:
        return minors[..., 0, 0] * minors[..., 1, 1] - minors[..., 0, 1] * minors[..., 1, 0]
    return np.linalg.det(minors)


def exterior_power(M, k):
    """The C(d,k) x C(d,k) matrix of the k-th exterior power of ``M``."""
    return exterior_power_batch(as_matrix(M), k)


def gap_routes(M):
    """Both routes to gr(M) = s_1/s_2: the SVD ratio and ||M||^2 / ||wedge^2 M||."""
    A = as_matrix(M)
    if A.shape[0] < 2:
        raise ValueError("gap needs d >= 2")
    s = singular_values(A)
    via_svd = s[0] / s[1]
    via_wedge = operator_norm(A) ** 2 / operator_norm(exterior_power(A, 2))
    return float(via_svd), float(via_wedge)


def gap(M):
    """Gap gr(M) = s_1(M) / s_2(M) >= 1."""
    return gap_routes(M)[0]


def random_unimodular(rng, d):
    """Gaussian matrix rescaled to det 1 (rows flipped to fix the sign)."""
    A = rng.standard_normal((d, d))
    if np.linalg.det(A) < 0:
        A[0] = -A[0]
    return A / np.linalg.det(A) ** (1.0 / d)
