"""Seedable, stream-splittable random sources for the sphere-walk estimator.

Every draw is a pure function of a :class:`StreamKey` ``(seed, trajectory,
step, channel)``.  The construction is counter-based: the key selects a
cell of a Philox4x64 counter space, so distinct keys yield independent
streams and the same key yields the identical draw no matter how many
workers are running or in which order cells are consumed.

Stream layout (stable, documented so results can be reproduced outside
this package):

* bit generator: ``numpy.random.Philox`` (Philox4x64-10),
  ``key = (seed, 0x9E3779B97F4A7C15)``,
  ``counter = (0, 0, index, channel)`` where ``index`` is the trajectory
  (or point) index and ``channel`` is one of the :class:`Channel` ids.
  ``counter[0]`` is the in-cell block counter, leaving 2**64 blocks of
  headroom per cell.
* raw uniforms: each ``float64`` consumes one 64-bit word,
  ``u = (word >> 11) * 2**-53``.
* normals: Box-Muller on consecutive uniform pairs ``(u1, u2)``:
  ``r = sqrt(-2 log(1 - u1))``, ``z1 = r cos(2 pi u2)``,
  ``z2 = r sin(2 pi u2)``.  Consumption is fixed-width, so the direction
  for step ``n`` occupies uniforms ``[n*w, (n+1)*w)`` of its cell, with
  ``w = 2*ceil(dim/2)``.
* rejection samplers (Green radius, uniform-in-domain) consume pairs
  (resp. ``dim``-tuples) sequentially within their own cell until
  acceptance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

KEY_SALT = 0x9E3779B97F4A7C15


class Channel(enum.IntEnum):
    DIRECTION = 1
    GREEN_RADIUS = 2
    GREEN_DIRECTION = 3
    POINT = 4


@dataclass(frozen=True)
class StreamKey:
    """Address of one random draw: (seed, trajectory, step, channel)."""

    seed: int
    trajectory: int = 0
    step: int = 0
    channel: Channel = Channel.DIRECTION

    def __post_init__(self):
        if self.trajectory < 0 or self.step < 0:
            raise ValueError("trajectory and step indices must be >= 0")


def cell_generator(seed: int, index: int, channel: Channel) -> np.random.Generator:
    """Generator positioned at the start of the (seed, index, channel) cell."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(KEY_SALT)])
    counter = np.array(
        [0, 0, np.uint64(index), np.uint64(int(channel))], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _normals_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Box-Muller, pairwise along the last axis (which must be even)."""
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    ang = (2.0 * np.pi) * u2
    out = np.empty_like(u)
    out[..., 0::2] = r * np.cos(ang)
    out[..., 1::2] = r * np.sin(ang)
    return out


def _record_width(dim: int) -> int:
    return 2 * ((dim + 1) // 2)


def _normalize_rows(z: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(z * z, axis=-1, keepdims=True))
    # A zero Gaussian vector has probability 0; pin the first axis if it
    # ever happens so the draw stays deterministic.
    bad = norms[..., 0] < 1e-300
    if np.any(bad):
        z = z.copy()
        z[bad] = 0.0
        z[bad, ..., 0] = 1.0
        norms = np.sqrt(np.sum(z * z, axis=-1, keepdims=True))
    return z / norms


def unit_sphere(key: StreamKey, dim: int) -> np.ndarray:
    """Uniform unit vector for the given stream key.

    Equals row ``key.step`` of :func:`direction_block` for the same
    trajectory; both slice the same per-trajectory uniform stream.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    w = _record_width(dim)
    gen = cell_generator(key.seed, key.trajectory, Channel.DIRECTION)
    u = gen.random((key.step + 1) * w)[-w:]
    z = _normals_from_uniforms(u)[:dim]
    return _normalize_rows(z)


def direction_block(
    seed: int, traj_start: int, traj_stop: int, n_steps: int, dim: int
) -> np.ndarray:
    """Unit-sphere directions U[n, i] for trajectories in [traj_start, traj_stop).

    Returns an array of shape (traj_stop - traj_start, n_steps, dim).
    """
    count = traj_stop - traj_start
    w = _record_width(dim)
    u = np.empty((count, n_steps, w))
    for j in range(count):
        gen = cell_generator(seed, traj_start + j, Channel.DIRECTION)
        u[j] = gen.random((n_steps, w))
    z = _normals_from_uniforms(u)[..., :dim]
    return _normalize_rows(z)


def green_radius(key: StreamKey, dim: int) -> float:
    """Radial component of the Green measure on the unit ball, d >= 3.

    The radial density is proportional to ``s - s**(d-1)`` on (0, 1).
    Sampler: propose ``s = sqrt(u1)`` (density 2s) and accept when
    ``u2 < 1 - s**(d-2)``; this realises the Beta(2/(d-2), 2) power
    construction without special functions.
    """
    if dim < 3:
        raise ValueError("the Green-kernel radius sampler requires dim >= 3")
    gen = cell_generator(key.seed, key.trajectory, Channel.GREEN_RADIUS)
    return _green_radius_from(gen, dim)


def _green_radius_from(gen: np.random.Generator, dim: int) -> float:
    while True:
        u = gen.random(2)
        s = math.sqrt(u[0])
        if u[1] < 1.0 - s ** (dim - 2):
            return s


def green_point(key: StreamKey, dim: int) -> np.ndarray:
    """One draw from the Green measure: radius times an independent direction."""
    if dim < 3:
        raise ValueError("the Green-kernel sampler requires dim >= 3")
    s = green_radius(key, dim)
    gen = cell_generator(key.seed, key.trajectory, Channel.GREEN_DIRECTION)
    w = _record_width(dim)
    z = _normals_from_uniforms(gen.random(w))[:dim]
    return s * _normalize_rows(z)


def green_block(seed: int, traj_start: int, traj_stop: int, dim: int) -> np.ndarray:
    """Green-measure points Y[i], one per trajectory; shape (count, dim)."""
    count = traj_stop - traj_start
    out = np.empty((count, dim))
    w = _record_width(dim)
    for j in range(count):
        idx = traj_start + j
        gen_r = cell_generator(seed, idx, Channel.GREEN_RADIUS)
        s = _green_radius_from(gen_r, dim)
        gen_d = cell_generator(seed, idx, Channel.GREEN_DIRECTION)
        z = _normals_from_uniforms(gen_d.random(w))[:dim]
        out[j] = s * _normalize_rows(z)
    return out


class SamplingError(RuntimeError):
    pass


def uniform_in_domain(key: StreamKey, domain) -> np.ndarray:
    """Uniform point in ``domain`` by rejection from its bounding cube."""
    return uniform_points(key.seed, domain, 1, index_start=key.trajectory)[0]


def uniform_points(seed: int, domain, count: int, index_start: int = 0) -> np.ndarray:
    """``count`` independent uniform points in ``domain``.

    Point ``k`` is drawn from cell ``(seed, index_start + k, POINT)``, so
    the set is reproducible and extendable without re-drawing earlier
    points.
    """
    dim = domain.dim
    half = domain.bounding_halfwidth
    out = np.empty((count, dim))
    max_proposals = 2_000_000
    for k in range(count):
        gen = cell_generator(seed, index_start + k, Channel.POINT)
        used = 0
        while True:
            # batches keep the Python overhead off the rejection loop
            batch = gen.random((64, dim)) * (2.0 * half) - half
            used += 64
            inside = domain.contains_many(batch)
            hits = np.nonzero(inside)[0]
            if hits.size:
                out[k] = batch[hits[0]]
                break
            if used >= max_proposals:
                raise SamplingError(
                    f"acceptance rate below {64 / max_proposals:.1e} "
                    f"after {used} proposals; degenerate domain?"
                )
    return out
