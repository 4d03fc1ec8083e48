"""Linear forward operators with exact adjoints.

The solvers only ever see the abstract contract: ``apply`` maps a
signal to data space, ``adjoint`` maps back, and the pair satisfies
``<A x, y> = <x, A^T y>`` to round-off.  Concrete operators cover the
experiment needs: dense matrices, identity, and 1-D/2-D convolution
with zero-padded (default) or periodic boundary.  Kernels must have odd
length per axis so that "same"-mode convolution and correlation align
as exact adjoints.
"""

import numpy as np
from scipy.signal import convolve2d, correlate2d

__all__ = [
    "LinearOperator",
    "IdentityOperator",
    "MatrixOperator",
    "Convolution1D",
    "Convolution2D",
    "gaussian_kernel",
    "gaussian_kernel2d",
    "operator_norm",
    "adjoint_mismatch",
]


class LinearOperator:
    """Abstract linear map between real signal spaces.

    Subclasses set ``input_shape``/``output_shape`` and implement
    ``apply`` and ``adjoint``.  Operators are stateless after
    construction and safe to share across threads.
    """

    def __init__(self, input_shape, output_shape):
        self.input_shape = tuple(input_shape)
        self.output_shape = tuple(output_shape)

    def apply(self, x):
        raise NotImplementedError

    def adjoint(self, y):
        raise NotImplementedError

    def _check_in(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.input_shape:
            raise ValueError("expected input shape %r, got %r"
                             % (self.input_shape, x.shape))
        return x

    def _check_out(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != self.output_shape:
            raise ValueError("expected data shape %r, got %r"
                             % (self.output_shape, y.shape))
        return y


class IdentityOperator(LinearOperator):
    """The identity map; denoising problems use it as the forward model."""

    def __init__(self, shape):
        super().__init__(shape, shape)

    def apply(self, x):
        return self._check_in(x).copy()

    def adjoint(self, y):
        return self._check_out(y).copy()


class MatrixOperator(LinearOperator):
    """Dense matrix ``A`` acting on 1-D signals."""

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2:
            raise ValueError("matrix must be 2-D")
        super().__init__((a.shape[1],), (a.shape[0],))
        self.matrix = a

    def apply(self, x):
        return self.matrix @ self._check_in(x)

    def adjoint(self, y):
        return self.matrix.T @ self._check_out(y)


def _check_taps(taps, ndim):
    k = np.asarray(taps, dtype=float)
    if k.ndim != ndim:
        raise ValueError("kernel must be %d-D" % ndim)
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel taps must be finite")
    if any(s % 2 == 0 for s in k.shape):
        # even supports break the same-mode adjoint alignment
        raise ValueError("kernel length must be odd along every axis")
    return k


class Convolution1D(LinearOperator):
    """Same-size 1-D convolution.

    Zero-padded boundary by default; ``boundary="periodic"`` wraps
    around instead.  The adjoint is correlation with the same boundary
    rule.

    Parameters
    ----------
    taps : array_like
        Odd-length kernel.
    n : int
        Signal length; must be at least the kernel length.
    boundary : {"zero", "periodic"}, optional
    """

    def __init__(self, taps, n, boundary="zero"):
        k = _check_taps(taps, 1)
        if k.size > n:
            raise ValueError("kernel longer than signal")
        if boundary not in ("zero", "periodic"):
            raise ValueError("boundary must be 'zero' or 'periodic'")
        super().__init__((n,), (n,))
        self.taps = k
        self.boundary = boundary
        self._center = k.size // 2

    def _circular(self, x, flip):
        k = self.taps[::-1] if flip else self.taps
        out = np.zeros_like(x)
        for m in range(k.size):
            out += k[m] * np.roll(x, m - self._center)
        return out

    def apply(self, x):
        x = self._check_in(x)
        if self.boundary == "zero":
            return np.convolve(x, self.taps, mode="same")
        return self._circular(x, flip=False)

    def adjoint(self, y):
        y = self._check_out(y)
        if self.boundary == "zero":
            return np.correlate(y, self.taps, mode="same")
        return self._circular(y, flip=True)


class Convolution2D(LinearOperator):
    """Same-size 2-D convolution with zero-padded or periodic boundary."""

    def __init__(self, taps, shape, boundary="zero"):
        k = _check_taps(taps, 2)
        if k.shape[0] > shape[0] or k.shape[1] > shape[1]:
            raise ValueError("kernel larger than image")
        if boundary not in ("zero", "periodic"):
            raise ValueError("boundary must be 'zero' or 'periodic'")
        super().__init__(tuple(shape), tuple(shape))
        self.taps = k
        self._scipy_boundary = "fill" if boundary == "zero" else "wrap"
        self.boundary = boundary

    def apply(self, x):
        x = self._check_in(x)
        return convolve2d(x, self.taps, mode="same",
                          boundary=self._scipy_boundary)

    def adjoint(self, y):
        y = self._check_out(y)
        return correlate2d(y, self.taps, mode="same",
                           boundary=self._scipy_boundary)


def gaussian_kernel(size, sigma):
    """Sampled 1-D Gaussian blur kernel, normalized to unit sum.

    ``size`` must be odd; ``size = 1`` gives the identity kernel.
    """
    if size < 1 or size % 2 == 0:
        raise ValueError("size must be odd and positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    u = np.arange(size, dtype=float) - (size - 1) / 2.0
    k = np.exp(-0.5 * (u / sigma) ** 2)
    return k / k.sum()


def gaussian_kernel2d(size, sigma):
    """Separable 2-D Gaussian kernel (outer product), unit sum."""
    k = gaussian_kernel(size, sigma)
    return np.outer(k, k)


def operator_norm(op, n_iter=100, tol=1e-8, seed=0, return_history=False):
    """Spectral-norm estimate of a linear operator by power iteration.

    Runs power iteration on ``A^T A`` from a seeded random start and
    returns ``sqrt`` of the Rayleigh quotient, a lower bound on
    ``||A||`` that is non-decreasing across iterations.  Feeds the
    default step-size heuristics of the solvers.

    Parameters
    ----------
    op : LinearOperator
    n_iter : int, optional
        Iteration cap.
    tol : float, optional
        Stop once the estimate moves less than ``tol`` (relatively).
    seed : int, optional
        Seed for the starting vector.
    return_history : bool, optional
        Also return the per-iteration estimates.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.input_shape)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("degenerate start vector")
    v /= nv
    history = []
    est = 0.0
    for _ in range(n_iter):
        w = op.apply(v)
        rayleigh = float(np.vdot(w, w))
        est_new = np.sqrt(rayleigh)
        history.append(est_new)
        z = op.adjoint(w)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            # v is in the null space; the estimate is exact there
            break
        v = z / nz
        if abs(est_new - est) <= tol * max(1.0, est_new):
            est = est_new
            break
        est = est_new
    if return_history:
        return est, np.asarray(history)
    return est


def adjoint_mismatch(op, rng, trials=50):
    """Largest relative defect of ``<Ax, y> - <x, A^T y>`` over random pairs.

    The returned value should sit at round-off (below 1e-10) for any
    correctly implemented operator.
    """
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(op.input_shape)
        y = rng.standard_normal(op.output_shape)
        lhs = float(np.vdot(op.apply(x), y))
        rhs = float(np.vdot(x, op.adjoint(y)))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst
