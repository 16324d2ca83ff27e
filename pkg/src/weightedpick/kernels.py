"""Closed-form Szego and Bergman kernels of the polydisk and the ball."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .instance import DomainKind, DomainSpec, SpaceKind, SpaceSpec


@dataclass(frozen=True)
class ClosedFormKernel:
    space: SpaceSpec
    domain: DomainSpec

    def __post_init__(self):
        if self.domain.kind is DomainKind.GRID:
            raise InputError("no-closed-form", "closed-form kernels exist only for the polydisk and the ball")

    def __call__(self, z, w) -> complex:
        return kernel_eval(self, z, w)

    def matrix(self, points) -> np.ndarray:
        """Gram matrix ``K[i, j] = k(z_i, z_j)``."""
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        for p in pts:
            self.domain.require_inside(p)
        return _kernel_block(self, pts, pts)

    def block(self, Z, W) -> np.ndarray:
        """Unchecked ``k(Z_i, W_j)`` block."""
        return _kernel_block(self, np.atleast_2d(Z), np.atleast_2d(W))


def kernel_eval(k: ClosedFormKernel, z, w) -> complex:
    """``k(z, w)`` with conjugation on the second argument."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    w = np.asarray(w, dtype=complex).reshape(-1)
    if z.shape[0] != k.domain.dim or w.shape[0] != k.domain.dim:
        raise InputError("dimension-mismatch", f"points must lie in C^{k.domain.dim}")
    k.domain.require_inside(z)
    k.domain.require_inside(w)
    return complex(_kernel_block(k, z[None, :], w[None, :])[0, 0])


def _kernel_block(k: ClosedFormKernel, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    d = k.domain.dim
    power = 1 if k.space.kind is SpaceKind.HARDY else 2
    if k.domain.kind is DomainKind.POLYDISK:
        prod = 1.0 - Z[:, None, :] * np.conj(W[None, :, :])
        return 1.0 / np.prod(prod, axis=2) ** power
    inner = Z @ np.conj(W).T
    exponent = d if k.space.kind is SpaceKind.HARDY else d + 1
    return 1.0 / (1.0 - inner) ** exponent
