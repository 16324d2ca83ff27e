"""Domains, spaces, algebras and interpolation instances, plus their JSON form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, InputError, ValidationError
from .polynomial import CPolynomial

# Points closer than this to the boundary are rejected.
BOUNDARY_TOL = 1e-12
DUPLICATE_TOL = 1e-12


class DomainKind(enum.Enum):
    POLYDISK = "polydisk"
    BALL = "ball"
    GRID = "grid"


class SpaceKind(enum.Enum):
    HARDY = "hardy"
    BERGMAN = "bergman"


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Polydisk D^d, ball B_d, or a finite union of grid cells in C^d.

    A grid cell is the cube of side `h` (in the 2d real coordinates) around
    one of `cells`. The union of cells is the domain itself.
    """

    kind: DomainKind
    dim: int
    h: float | None = None
    cells: np.ndarray | None = None
    # per coordinate: (re_lo, re_hi, im_lo, im_hi)
    bbox: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.dim < 1:
            raise InputError("bad-dimension", f"dimension must be >= 1, got {self.dim}")
        if self.kind is DomainKind.GRID:
            if self.h is None or not self.h > 0:
                raise InputError("bad-grid", "grid domain needs a cell size h > 0")
            if self.cells is None or len(self.cells) == 0:
                raise InputError("empty-grid", "grid domain has no cells")
            cells = np.atleast_2d(np.asarray(self.cells, dtype=complex))
            if cells.shape[1] != self.dim:
                raise InputError("dimension-mismatch", f"grid cells are not points of C^{self.dim}")
            cells.setflags(write=False)
            object.__setattr__(self, "cells", cells)
            reals = _realify(cells)
            if len(np.unique(np.round(reals / self.h, 6), axis=0)) != len(cells):
                raise InputError("duplicate-cell", "grid cells must be distinct")
            if self.bbox is not None:
                box = np.asarray(self.bbox, dtype=float).reshape(self.dim, 4)
                object.__setattr__(self, "bbox", box)
                lo = box[:, [0, 2]].reshape(-1)
                hi = box[:, [1, 3]].reshape(-1)
                if np.any(reals < lo - 1e-12) or np.any(reals > hi + 1e-12):
                    raise InputError("cell-outside-bbox", "a grid cell center lies outside the bounding box")

    @classmethod
    def polydisk(cls, dim: int) -> "DomainSpec":
        return cls(DomainKind.POLYDISK, dim)

    @classmethod
    def ball(cls, dim: int) -> "DomainSpec":
        return cls(DomainKind.BALL, dim)

    @classmethod
    def grid(cls, cells, h: float, bbox=None) -> "DomainSpec":
        cells = np.atleast_2d(np.asarray(cells, dtype=complex))
        return cls(DomainKind.GRID, cells.shape[1], h=float(h), cells=cells, bbox=bbox)

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(_realify(self.cells))

    def contains(self, z) -> bool:
        """Strict interior membership (with the boundary tolerance)."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.dim:
            return False
        if self.kind is DomainKind.POLYDISK:
            return bool(np.all(1.0 - np.abs(z) >= BOUNDARY_TOL))
        if self.kind is DomainKind.BALL:
            return bool(1.0 - np.linalg.norm(z) >= BOUNDARY_TOL)
        dist, _ = self._tree.query(_realify(z[None, :])[0], p=np.inf)
        return bool(dist <= self.h / 2)

    def require_inside(self, z) -> None:
        if not self.contains(z):
            raise DomainError("outside-domain", f"point {np.asarray(z).tolist()} is not strictly inside the {self.kind.value}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value, "dim": self.dim}
        if self.kind is DomainKind.GRID:
            out["h"] = self.h
            out["cells"] = [[[c.real, c.imag] for c in row] for row in self.cells]
            if self.bbox is not None:
                out["bbox"] = self.bbox.tolist()
        return out


def _realify(points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(points)
    return np.concatenate([pts.real, pts.imag], axis=1)


def grid_domain(predicate, dim: int, h: float, extent: float = 1.0) -> DomainSpec:
    """Cells of side `h` on [-extent, extent]^(2d) whose centers satisfy `predicate`.

    `predicate` receives an (n, d) complex array and returns a boolean mask.
    """
    ticks = np.arange(-extent + h / 2, extent, h)
    mesh = np.meshgrid(*([ticks] * (2 * dim)), indexing="ij")
    flat = np.stack([m.reshape(-1) for m in mesh], axis=1)
    pts = flat[:, :dim] + 1j * flat[:, dim:]
    keep = np.asarray(predicate(pts), dtype=bool)
    bbox = np.tile([-extent, extent, -extent, extent], (dim, 1))
    return DomainSpec.grid(pts[keep], h, bbox=bbox)


def annulus_grid(r_inner: float, r_outer: float, h: float) -> DomainSpec:
    return grid_domain(lambda p: (np.abs(p[:, 0]) > r_inner) & (np.abs(p[:, 0]) < r_outer), 1, h, extent=r_outer)


def disk_grid(h: float, radius: float = 1.0) -> DomainSpec:
    return grid_domain(lambda p: np.abs(p[:, 0]) < radius, 1, h, extent=radius)


@dataclass(frozen=True)
class SpaceSpec:
    kind: SpaceKind

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))

    @classmethod
    def hardy(cls) -> "SpaceSpec":
        return cls(SpaceKind.HARDY)

    @classmethod
    def bergman(cls) -> "SpaceSpec":
        return cls(SpaceKind.BERGMAN)


def check_space_domain(space: SpaceSpec, domain: DomainSpec) -> None:
    if space.kind is SpaceKind.HARDY and domain.kind is DomainKind.GRID:
        raise InputError(
            "unsupported-combination", "Hardy space is only available on the polydisk and the ball"
        )


@dataclass(frozen=True)
class AlgebraSpec:
    """The full algebra, or the unital algebra generated by polynomials."""

    kind: str = "full"
    generators: tuple[CPolynomial, ...] = ()

    def __post_init__(self):
        if self.kind not in ("full", "generated"):
            raise InputError("bad-algebra", f"unknown algebra kind {self.kind!r}")
        if self.kind == "generated" and not self.generators:
            raise InputError("bad-algebra", "a generated algebra needs at least one generator")
        object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def full(cls) -> "AlgebraSpec":
        return cls("full")

    @classmethod
    def generated(cls, generators) -> "AlgebraSpec":
        return cls("generated", tuple(generators))

    @property
    def is_full(self) -> bool:
        return self.kind == "full"

    def to_json(self) -> dict:
        if self.is_full:
            return {"kind": "full"}
        return {"kind": "generated", "generators": [g.to_json() for g in self.generators]}


@dataclass(frozen=True, eq=False)
class InterpolationInstance:
    domain: DomainSpec
    space: SpaceSpec
    algebra: AlgebraSpec
    nodes: np.ndarray
    targets: np.ndarray = field(default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex)
        if nodes.ndim == 1:
            nodes = nodes.reshape(-1, 1) if self.domain.dim == 1 else nodes.reshape(1, -1)
        targets = np.asarray(self.targets, dtype=complex).reshape(-1)
        nodes.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def n(self) -> int:
        return len(self.targets)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "space": self.space.kind.value,
            "algebra": self.algebra.to_json(),
            "nodes": [[[c.real, c.imag] for c in row] for row in self.nodes],
            "targets": [[t.real, t.imag] for t in self.targets],
        }


def validate_instance(inst: InterpolationInstance) -> InterpolationInstance:
    """Return `inst` unchanged, or raise ValidationError listing every violation."""
    problems: list[InputError] = []
    try:
        check_space_domain(inst.space, inst.domain)
    except InputError as exc:
        problems.append(exc)
    if inst.nodes.shape[0] != inst.targets.shape[0]:
        problems.append(
            InputError(
                "count-mismatch",
                f"{inst.nodes.shape[0]} nodes but {inst.targets.shape[0]} targets",
            )
        )
    if inst.nodes.shape[1] != inst.dim:
        problems.append(
            InputError("dimension-mismatch", f"nodes are points of C^{inst.nodes.shape[1]}, domain is C^{inst.dim}")
        )
    else:
        for i, z in enumerate(inst.nodes):
            if not inst.domain.contains(z):
                problems.append(InputError("node-outside-domain", f"node {i} = {z.tolist()} is not inside the domain"))
        for i in range(len(inst.nodes)):
            for j in range(i):
                if np.max(np.abs(inst.nodes[i] - inst.nodes[j])) < DUPLICATE_TOL:
                    problems.append(InputError("duplicate-node", f"nodes {j} and {i} coincide"))
    for g in inst.algebra.generators:
        if g.dimension != inst.dim:
            problems.append(
                InputError("generator-dimension", f"generator of dimension {g.dimension} on C^{inst.dim}")
            )
    if problems:
        raise ValidationError(problems)
    return inst


def _complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if len(pair) != 2:
        raise InputError("parse", f"expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def instance_from_json(data: dict) -> InterpolationInstance:
    try:
        dom = data["domain"]
        kind = DomainKind(dom["kind"])
        dim = int(dom["dim"])
        if kind is DomainKind.GRID:
            cells = [[_complex(c) for c in row] for row in dom["cells"]]
            domain = DomainSpec(kind, dim, h=float(dom["h"]), cells=np.array(cells, dtype=complex),
                                bbox=dom.get("bbox"))
        else:
            domain = DomainSpec(kind, dim)
        space = SpaceSpec(SpaceKind(data["space"]))
        alg = data.get("algebra", {"kind": "full"})
        if alg["kind"] == "generated":
            algebra = AlgebraSpec.generated([CPolynomial.from_json(g, dim) for g in alg["generators"]])
        else:
            algebra = AlgebraSpec(alg["kind"])
        nodes = np.array([[_complex(c) for c in row] for row in data["nodes"]], dtype=complex).reshape(-1, dim)
        targets = np.array([_complex(t) for t in data["targets"]], dtype=complex)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("parse", f"malformed instance: {exc!r}") from exc
    return InterpolationInstance(domain, space, algebra, nodes, targets)


def load_instance(path: str | Path) -> InterpolationInstance:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("parse", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate_instance(instance_from_json(data))
