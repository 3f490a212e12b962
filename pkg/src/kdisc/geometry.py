"""Points, balls, and the rotation-invariant kernel families.

Every kernel is a function of distance only, ``K(x, p) = k_w(||x - p||)``.
At unit bandwidth the profiles are

    gaussian       exp(-z^2)
    triangle       max(0, 1 - z)
    epanechnikov   max(0, 1 - z^2)
    ball           1 if z <= 1 else 0

all with peak value 1.  A bandwidth ``w`` is applied in one of two ways:
``norm="integral"`` keeps the integral fixed, ``k_w(z) = k(z / w) / w^d``;
``norm="peak"`` keeps ``k_w(0) = 1``, ``k_w(z) = k(z / w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from kdisc.errors import EmptySupportError, UnsupportedKernelError, UsageError

FAMILIES = ("gaussian", "triangle", "epanechnikov", "ball")

# Max |dk/dz| of the unit profiles; gaussian peaks at z = 1/sqrt(2).
_UNIT_SLOPE = {
    "gaussian": math.sqrt(2.0 / math.e),
    "triangle": 1.0,
    "epanechnikov": 2.0,
}

ATOL = 1e-12


def as_points(P, dim: int | None = None) -> np.ndarray:
    """Validate and return ``P`` as a float64 array of shape (n, d)."""
    A = np.asarray(P, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.shape[1] < 1:
        raise UsageError(f"expected an (n, d) point array, got shape {A.shape}")
    if dim is not None and A.shape[1] != dim:
        raise UsageError(f"dimension mismatch: points have d={A.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(A)):
        raise UsageError("point coordinates must be finite")
    return A


def as_point(x, dim: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if dim is not None and x.size != dim:
        raise UsageError(f"dimension mismatch: point has d={x.size}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise UsageError("point coordinates must be finite")
    return x


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise UsageError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return int(np.asarray(self.center).size)


@dataclass(frozen=True)
class KernelSpec:
    family: str = "gaussian"
    bandwidth: float = 1.0
    dim: int = 2
    norm: str = "integral"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise UsageError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.dim < 1:
            raise UsageError(f"dimension must be >= 1, got {self.dim}")
        if self.norm not in ("integral", "peak"):
            raise UsageError(f"norm must be 'integral' or 'peak', got {self.norm!r}")

    @property
    def peak(self) -> float:
        """Kernel value at distance zero."""
        if self.norm == "peak":
            return 1.0
        return self.bandwidth ** (-self.dim)

    @property
    def smooth(self) -> bool:
        return self.family == "gaussian"

    def profile(self, z):
        """Kernel value as a function of distance (vectorised)."""
        u = np.asarray(z, dtype=np.float64) / self.bandwidth
        if self.family == "gaussian":
            v = np.exp(-u * u)
        elif self.family == "triangle":
            v = np.maximum(0.0, 1.0 - u)
        elif self.family == "epanechnikov":
            v = np.maximum(0.0, 1.0 - u * u)
        else:
            v = (u <= 1.0).astype(np.float64)
        return self.peak * v

    def profile_sq(self, z2):
        """Kernel value from squared distance; avoids a sqrt where possible."""
        u2 = np.asarray(z2, dtype=np.float64) / (self.bandwidth * self.bandwidth)
        if self.family == "gaussian":
            v = np.exp(-u2)
        elif self.family == "epanechnikov":
            v = np.maximum(0.0, 1.0 - u2)
        elif self.family == "triangle":
            v = np.maximum(0.0, 1.0 - np.sqrt(u2))
        else:
            v = (u2 <= 1.0).astype(np.float64)
        return self.peak * v

    def with_dim(self, dim: int) -> "KernelSpec":
        return KernelSpec(self.family, self.bandwidth, dim, self.norm)

    def __str__(self):
        s = self.family
        opts = []
        if self.bandwidth != 1.0:
            opts.append(f"w={self.bandwidth:g}")
        if self.norm != "integral":
            opts.append(f"norm={self.norm}")
        return s + (":" + ",".join(opts) if opts else "")


def parse_kernel(text: str, dim: int = 2) -> KernelSpec:
    """Parse ``family[:key=value,...]``, e.g. ``gaussian:w=0.5,norm=peak``."""
    name, _, rest = text.strip().partition(":")
    kwargs = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"bad kernel option {item!r} in {text!r}")
        key = key.strip().lower()
        if key in ("w", "bandwidth"):
            try:
                kwargs["bandwidth"] = float(val)
            except ValueError:
                raise UsageError(f"bad bandwidth {val!r}") from None
        elif key == "norm":
            kwargs["norm"] = val.strip().lower()
        else:
            raise UsageError(f"unknown kernel option {key!r}")
    return KernelSpec(family=name.strip().lower(), dim=dim, **kwargs)


def kernel_eval(k: KernelSpec, x, p) -> float:
    x = as_point(x, k.dim)
    p = as_point(p, k.dim)
    return float(k.profile(np.linalg.norm(x - p)))


def kernel_matrix(k: KernelSpec, X, P) -> np.ndarray:
    """``K[i, j] = K(X[i], P[j])``."""
    X = as_points(X, k.dim)
    P = as_points(P, k.dim)
    d2 = (np.sum(X * X, 1)[:, None] + np.sum(P * P, 1)[None, :] - 2.0 * X @ P.T)
    np.maximum(d2, 0.0, out=d2)
    return k.profile_sq(d2)


def kernel_slope_bound(k: KernelSpec) -> float:
    """Lipschitz constant of the profile ``z -> k_w(z)``."""
    if k.family == "ball":
        raise UnsupportedKernelError("ball kernel has unbounded slope")
    return k.peak * _UNIT_SLOPE[k.family] / k.bandwidth


def kernel_curvature_bound(k: KernelSpec) -> float:
    """Bound on the spectral norm of the Hessian of ``x -> K(x, p)``.

    Only the gaussian is twice differentiable everywhere; for exp(-|u|^2) the
    Hessian eigenvalues are -2 e^{-r^2} and (4 r^2 - 2) e^{-r^2}, so 2 bounds both.
    """
    if k.family != "gaussian":
        raise UnsupportedKernelError(f"{k.family} kernel is not twice differentiable")
    return k.peak * 2.0 / (k.bandwidth * k.bandwidth)


def support_radius(k: KernelSpec, threshold: float) -> float:
    """Radius of ``{p : K(x, p) > threshold}``."""
    peak = k.peak
    if threshold >= peak - ATOL * peak:
        raise EmptySupportError(f"threshold {threshold} is not below the kernel peak {peak}")
    if threshold < 0:
        raise UsageError("threshold must be non-negative")
    w = k.bandwidth
    ratio = threshold / peak
    if k.family == "gaussian":
        if threshold <= 0:
            raise UsageError("gaussian support is unbounded for threshold 0")
        return w * math.sqrt(math.log(1.0 / ratio))
    if k.family == "triangle":
        return w * (1.0 - ratio)
    if k.family == "epanechnikov":
        return w * math.sqrt(1.0 - ratio)
    return w


def support_ball(k: KernelSpec, x, threshold: float) -> Ball:
    return Ball(as_point(x, k.dim), support_radius(k, threshold))


def ball_volume(dim: int, radius: float) -> float:
    if dim < 1:
        raise UsageError("dim must be >= 1")
    if radius < 0:
        raise UsageError("radius must be non-negative")
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0) * radius ** dim
