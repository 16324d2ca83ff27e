"""Classical Nevanlinna-Pick interpolation on the unit disk via the Schur algorithm."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError

RIGID_TOL = 1e-10
# remaining targets after a unimodular parameter must agree with it to this accuracy
CONSISTENCY_TOL = 1e-6
RIGID_FLAG_LEVEL = 1e-6


def _as_nodes(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if np.any(np.abs(z) >= 1.0 - 1e-12):
        raise DomainError("outside-domain", "nodes must lie in the open unit disk")
    return z


def mobius(a: complex, z):
    """The disk automorphism ``(z - a) / (1 - conj(a) z)``."""
    return (z - a) / (1.0 - np.conj(a) * z)


def classical_pick_matrix(z, w) -> np.ndarray:
    """``[(1 - w_i conj(w_j)) / (1 - z_i conj(z_j))]``."""
    z = _as_nodes(z)
    w = np.asarray(w, dtype=complex).reshape(-1)
    if z.shape != w.shape:
        raise InputError("count-mismatch", f"{z.size} nodes but {w.size} targets")
    return (1.0 - np.outer(w, w.conj())) / (1.0 - np.outer(z, z.conj()))


@dataclass
class SchurChain:
    """``phi_k = (gamma_k + b_k phi_{k+1}) / (1 + conj(gamma_k) b_k phi_{k+1})``
    with ``b_k`` the Mobius factor vanishing at ``z_k``; the innermost function
    is the constant `terminal`.
    """

    nodes: list[complex] = field(default_factory=list)
    gammas: list[complex] = field(default_factory=list)
    terminal: complex = 0j
    rigid: bool = False
    numerically_rigid: bool = False
    lambda_min: float | None = None

    def __call__(self, z):
        return eval_interpolant(self, z)

    def to_json(self) -> dict:
        return {
            "steps": [
                {"node": [float(a.real), float(a.imag)], "gamma": [float(g.real), float(g.imag)]}
                for a, g in zip(self.nodes, self.gammas)
            ],
            "terminal": [float(self.terminal.real), float(self.terminal.imag)],
            "rigid": self.rigid,
            "numerically_rigid": self.numerically_rigid,
            "lambda_min": self.lambda_min,
        }


@dataclass
class DiskInfeasible:
    lambda_min: float
    reason: str

    def to_json(self) -> dict:
        return {"lambda_min": self.lambda_min, "reason": self.reason}


def solve_disk(z, w, tol: float = 1e-9) -> SchurChain | DiskInfeasible:
    """Decide the disk problem by the Pick matrix and build an interpolant.

    Returns a SchurChain when the Pick matrix is PSD (relative tolerance
    `tol`), otherwise DiskInfeasible carrying the smallest eigenvalue.
    """
    z = _as_nodes(z)
    w = np.asarray(w, dtype=complex).reshape(-1)
    if len(set(np.round(z, 14).tolist())) != len(z):
        raise InputError("duplicate-node", "nodes must be distinct")
    evals = np.linalg.eigvalsh(classical_pick_matrix(z, w))
    lam_min, lam_max = float(evals[0]), float(evals[-1])
    if lam_min < -tol * max(1.0, lam_max):
        return DiskInfeasible(lam_min, "pick-matrix-not-psd")

    chain = SchurChain(lambda_min=lam_min, numerically_rigid=lam_min < RIGID_FLAG_LEVEL)
    nodes, vals = list(z), np.array(w)
    while nodes:
        gamma = complex(vals[0])
        if abs(gamma) >= 1.0 - RIGID_TOL:
            gamma /= abs(gamma)
            if np.max(np.abs(vals - gamma)) > CONSISTENCY_TOL:
                return DiskInfeasible(lam_min, "inconsistent-after-unimodular-parameter")
            chain.terminal = gamma
            chain.rigid = True
            return chain
        a = nodes[0]
        chain.nodes.append(a)
        chain.gammas.append(gamma)
        rest = np.array(nodes[1:], dtype=complex)
        rv = vals[1:]
        vals = (rv - gamma) / ((1.0 - np.conj(gamma) * rv) * mobius(a, rest))
        nodes = list(rest)
    return chain


def eval_interpolant(chain: SchurChain, z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("outside-domain", "interpolant is evaluated on the open disk only")
    phi = np.full(z.shape, chain.terminal, dtype=complex)
    for a, g in zip(reversed(chain.nodes), reversed(chain.gammas)):
        bp = mobius(a, z) * phi
        phi = (g + bp) / (1.0 + np.conj(g) * bp)
    return complex(phi) if phi.ndim == 0 else phi


def blaschke(zeros, z, rotation: complex = 1.0):
    """Finite Blaschke product with the given zeros, times a unimodular constant."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, rotation, dtype=complex)
    for a in zeros:
        out = out * mobius(a, z)
    return out
