"""Domains, exact distance functions, distance surrogates and boundary data.

Four built-in domain families are supported:

* ``hypercube``        -- [-h, h]^d
* ``annular_hypercube``-- [-h, h]^d minus the closed l1-ball of radius c
* ``ball``             -- |x| < R
* ``annulus``          -- r0 < |x| < r1

All geometry objects are immutable after construction and safe to share
across workers.  ``distance`` returns the distance to the boundary for
points inside the domain and 0 outside its closure; it is 1-Lipschitz.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class DomainKind(enum.Enum):
    HYPERCUBE = "hypercube"
    ANNULAR_HYPERCUBE = "annular_hypercube"
    BALL = "ball"
    ANNULUS = "annulus"


class CapabilityError(RuntimeError):
    """Raised when an operation is not available for a domain kind."""


@dataclass(frozen=True)
class DomainMetadata:
    diam: float
    adiam: Optional[float]
    delta: Optional[float]
    rad: float


@dataclass(frozen=True)
class Domain:
    kind: DomainKind
    dim: int
    p0: float = 0.0  # halfwidth | radius | r0
    p1: float = 0.0  # l1 radius  |        | r1

    # -- constructors ---------------------------------------------------

    @staticmethod
    def hypercube(halfwidth: float, dim: int) -> "Domain":
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        _check_dim(dim)
        return Domain(DomainKind.HYPERCUBE, dim, halfwidth)

    @staticmethod
    def annular_hypercube(halfwidth: float, l1_radius: float, dim: int) -> "Domain":
        if not 0 < l1_radius < halfwidth:
            raise ValueError("need 0 < l1_radius < halfwidth")
        _check_dim(dim)
        return Domain(DomainKind.ANNULAR_HYPERCUBE, dim, halfwidth, l1_radius)

    @staticmethod
    def ball(radius: float, dim: int) -> "Domain":
        if radius <= 0:
            raise ValueError("radius must be positive")
        _check_dim(dim)
        return Domain(DomainKind.BALL, dim, radius)

    @staticmethod
    def annulus(r0: float, r1: float, dim: int) -> "Domain":
        if not 0 < r0 < r1:
            raise ValueError("need 0 < r0 < r1")
        _check_dim(dim)
        return Domain(DomainKind.ANNULUS, dim, r0, r1)

    # -- basic queries ---------------------------------------------------

    @property
    def bounding_halfwidth(self) -> float:
        if self.kind in (DomainKind.HYPERCUBE, DomainKind.ANNULAR_HYPERCUBE):
            return self.p0
        if self.kind is DomainKind.BALL:
            return self.p0
        return self.p1

    @property
    def diameter(self) -> float:
        if self.kind in (DomainKind.HYPERCUBE, DomainKind.ANNULAR_HYPERCUBE):
            return 2.0 * self.p0 * math.sqrt(self.dim)
        if self.kind is DomainKind.BALL:
            return 2.0 * self.p0
        return 2.0 * self.p1

    def distance(self, x) -> float:
        return float(self.distance_many(np.asarray(x, dtype=float)[None, :])[0])

    def distance_many(self, X: np.ndarray) -> np.ndarray:
        """Distance to the boundary for each row of X; 0 outside the closure."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got shape {X.shape}")
        if self.kind is DomainKind.HYPERCUBE:
            r = self.p0 - np.abs(X).max(axis=1)
        elif self.kind is DomainKind.ANNULAR_HYPERCUBE:
            face = self.p0 - np.abs(X).max(axis=1)
            hole = l1_ball_distance(X, self.p1)
            r = np.minimum(face, hole)
        elif self.kind is DomainKind.BALL:
            r = self.p0 - np.sqrt((X * X).sum(axis=1))
        else:
            nrm = np.sqrt((X * X).sum(axis=1))
            r = np.minimum(nrm - self.p0, self.p1 - nrm)
        return np.maximum(r, 0.0)

    def contains(self, x) -> bool:
        return bool(self.contains_many(np.asarray(x, dtype=float)[None, :])[0])

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.kind is DomainKind.HYPERCUBE:
            return np.abs(X).max(axis=1) < self.p0
        if self.kind is DomainKind.ANNULAR_HYPERCUBE:
            return (np.abs(X).max(axis=1) < self.p0) & (np.abs(X).sum(axis=1) > self.p1)
        nrm = np.sqrt((X * X).sum(axis=1))
        if self.kind is DomainKind.BALL:
            return nrm < self.p0
        return (nrm > self.p0) & (nrm < self.p1)

    def metadata(self) -> DomainMetadata:
        d = self.dim
        if self.kind is DomainKind.HYPERCUBE:
            return DomainMetadata(self.diameter, self.diameter, 0.0, self.p0)
        if self.kind is DomainKind.BALL:
            return DomainMetadata(self.diameter, self.diameter, 0.0, self.p0)
        if self.kind is DomainKind.ANNULUS:
            rad = 0.5 * (self.p1 - self.p0)
            # inner sphere supplies an exterior ball of radius r0
            adiam = self.diameter * (1.0 + self.diameter / self.p0)
            delta = (d - 1) * (self.p1 / self.p0 - 1.0)
            return DomainMetadata(
                self.diameter, adiam, delta if delta < 1.0 else None, rad
            )
        # annular hypercube: no uniform exterior ball at the inner corners,
        # so no finite annular diameter is reported.  The clearance maximum
        # sits on the main diagonal (the cube vertices dominate every
        # max-norm level set of the l1-ball distance).
        h, c = self.p0, self.p1
        rad = (h * d - c) / (d + math.sqrt(d))
        return DomainMetadata(self.diameter, None, None, rad)

    def project_boundary_many(self, X: np.ndarray) -> np.ndarray:
        """Nearest boundary point, closed form; Ball and Annulus only."""
        X = np.asarray(X, dtype=float)
        nrm = np.sqrt((X * X).sum(axis=1, keepdims=True))
        nrm = np.maximum(nrm, 1e-300)
        if self.kind is DomainKind.BALL:
            return X * (self.p0 / nrm)
        if self.kind is DomainKind.ANNULUS:
            target = np.where(nrm <= 0.5 * (self.p0 + self.p1), self.p0, self.p1)
            return X * (target / nrm)
        raise CapabilityError(
            f"no closed-form boundary projection for {self.kind.value}"
        )

    def project_boundary(self, x) -> np.ndarray:
        return self.project_boundary_many(np.asarray(x, dtype=float)[None, :])[0]


def _check_dim(dim: int):
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValueError("dim must be a positive integer")


# ---------------------------------------------------------------------------
# l1-ball (cross-polytope) distance via sort-based simplex projection
# ---------------------------------------------------------------------------

def l1_ball_threshold(Z: np.ndarray, radius: float) -> np.ndarray:
    """Soft-threshold level of the Euclidean projection onto the l1-ball.

    ``Z`` holds |x| rowwise; rows with l1 norm <= radius get threshold 0.
    For a row sorted descending, the level is max_j (cumsum_j - radius)/j,
    and the active set {z_j > level_j} is a prefix, so the running maximum
    is exact.
    """
    Zs = np.sort(Z, axis=1)[:, ::-1]
    cs = np.cumsum(Zs, axis=1)
    j = np.arange(1, Z.shape[1] + 1, dtype=float)
    theta = ((cs - radius) / j).max(axis=1)
    return np.maximum(theta, 0.0)


def l1_ball_distance(X: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean distance from each row of X to {y : |y|_1 <= radius}."""
    Z = np.abs(np.asarray(X, dtype=float))
    theta = l1_ball_threshold(Z, radius)
    V = np.minimum(Z, theta[:, None])
    return np.sqrt((V * V).sum(axis=1))


def l1_ball_project(X: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of each row of X onto the l1-ball."""
    X = np.asarray(X, dtype=float)
    Z = np.abs(X)
    theta = l1_ball_threshold(Z, radius)
    return np.sign(X) * np.maximum(Z - theta[:, None], 0.0)


# ---------------------------------------------------------------------------
# distance surrogates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurrogateDistance:
    """A (beta, eps_shell)-surrogate of the exact boundary distance.

    Guarantees ``0 <= value <= r`` everywhere and ``value >= beta * r``
    wherever ``r >= eps_shell``.
    """

    fn: Callable[[np.ndarray], np.ndarray]  # rows -> values
    beta: float
    eps_shell: float
    lipschitz: float
    domain: Optional[Domain] = None
    exact: bool = False

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(X, dtype=float))

    def at(self, x) -> float:
        return float(self(np.asarray(x, dtype=float)[None, :])[0])


def surrogate_from_exact(domain: Domain, eps_shell: float = 0.0) -> SurrogateDistance:
    """Wrap the exact distance as the trivial (1, eps_shell)-surrogate."""
    if eps_shell < 0:
        raise ValueError("eps_shell must be >= 0")
    return SurrogateDistance(
        fn=domain.distance_many,
        beta=1.0,
        eps_shell=eps_shell,
        lipschitz=1.0,
        domain=domain,
        exact=True,
    )


def surrogate_from_approx(
    phi_r: Callable[[np.ndarray], np.ndarray],
    eps_r: float,
    lipschitz: float = 1.0,
    domain: Optional[Domain] = None,
) -> SurrogateDistance:
    """Build (phi_r - eps_r)^+ from an approximate distance with sup error eps_r.

    The result is a (1/3, 3*eps_r)-surrogate whenever |phi_r - r|_inf <= eps_r
    (the caller asserts the error bound).
    """
    if eps_r < 0:
        raise ValueError("eps_r must be >= 0")

    def fn(X):
        return np.maximum(np.asarray(phi_r(X), dtype=float) - eps_r, 0.0)

    beta = 1.0 if eps_r == 0.0 else 1.0 / 3.0
    return SurrogateDistance(
        fn=fn,
        beta=beta,
        eps_shell=3.0 * eps_r,
        lipschitz=lipschitz,
        domain=domain,
        exact=(eps_r == 0.0),
    )


# ---------------------------------------------------------------------------
# boundary-data extension
# ---------------------------------------------------------------------------

def cutoff_profile(t):
    """C^{1,1} cutoff: 1 on [0,1], 0 on [3,inf), |psi|,|psi'|,|psi''| <= 1.

    Piecewise quadratic with second derivative -1 on [1,2] and +1 on [2,3].
    """
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    mid = (t > 1.0) & (t <= 2.0)
    out = np.where(mid, 1.0 - 0.5 * (t - 1.0) ** 2, out)
    hi = (t > 2.0) & (t < 3.0)
    out = np.where(hi, 0.5 * (3.0 - t) ** 2, out)
    out = np.where(t >= 3.0, 0.0, out)
    return out


@dataclass(frozen=True)
class BoundaryExtension:
    """Cutoff extension G(x) = psi(r(x)/eps0) * g(pi(x)) of boundary data g."""

    domain: Domain
    g: Callable[[np.ndarray], np.ndarray]
    eps0: float

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        r = self.domain.distance_many(X)
        w = cutoff_profile(r / self.eps0)
        out = np.zeros(X.shape[0])
        live = w > 0.0
        if np.any(live):
            proj = self.domain.project_boundary_many(X[live])
            out[live] = w[live] * np.asarray(self.g(proj), dtype=float)
        return out

    def at(self, x) -> float:
        return float(self(np.asarray(x, dtype=float)[None, :])[0])


def extend_boundary_data(domain: Domain, g, eps0: float) -> BoundaryExtension:
    """Extend boundary data into the domain behind the cutoff profile.

    Only domains with a closed-form nearest-point projection are
    supported (ball, annulus); for the annulus, eps0 must stay below half
    the gap so the projection is single-valued on the cutoff region.
    """
    if domain.kind not in (DomainKind.BALL, DomainKind.ANNULUS):
        raise CapabilityError(
            f"boundary extension needs a closed-form projection; "
            f"{domain.kind.value} has none"
        )
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    if domain.kind is DomainKind.ANNULUS and eps0 >= 0.5 * (domain.p1 - domain.p0):
        raise ValueError("eps0 must be below half the annulus gap")
    return BoundaryExtension(domain, g, eps0)


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------

def anisotropic_transform(K: np.ndarray) -> np.ndarray:
    """Symmetric square root A of an SPD matrix K, so A @ A.T == K."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K must be square")
    if not np.allclose(K, K.T, rtol=1e-10, atol=1e-12):
        raise ValueError("K must be symmetric")
    lam, R = np.linalg.eigh(K)
    if lam.min() <= 0:
        raise ValueError("K must be positive definite")
    return (R * np.sqrt(lam)) @ R.T


def annular_diameter(domain: Domain) -> Optional[float]:
    """Annular diameter, or None when no uniform exterior ball exists."""
    return domain.metadata().adiam
