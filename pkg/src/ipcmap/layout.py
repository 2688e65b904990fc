"""ForceAtlas2 layout (Jacomy et al. 2014), exact O(n^2) repulsion.

The update loop follows Gephi's implementation: degree+1 masses, linear
(or lin-log) attraction scaled by ``weight ** edge_weight_influence``,
mass-product repulsion, mass-proportional gravity and the adaptive global
speed driven by swinging versus effective traction.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

import numpy as np

from .cooccurrence import CooccurrenceGraph
from .graph import WeightedGraph

__all__ = ["LayoutParams", "LayoutPositions", "initial_positions", "force_atlas2"]


@dataclass(frozen=True)
class LayoutParams:
    iterations: int = 1000
    scaling: float = 2.0
    gravity: float = 1.0
    linlog_mode: bool = False
    prevent_overlap: bool = True
    edge_weight_influence: float = 1.0
    seed: int = 0
    jitter_tolerance: float = 1.0
    node_size: float = 1.0

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not self.scaling > 0:
            raise ValueError("scaling must be > 0")
        if self.gravity < 0:
            raise ValueError("gravity must be >= 0")
        if self.edge_weight_influence < 0:
            raise ValueError("edge_weight_influence must be >= 0")
        if not self.jitter_tolerance > 0:
            raise ValueError("jitter_tolerance must be > 0")


@dataclass(frozen=True)
class LayoutPositions:
    positions: Mapping[object, tuple[float, float]]
    params_used: dict = field(default_factory=dict)

    def __getitem__(self, node):
        return self.positions[node]

    def __len__(self):
        return len(self.positions)

    def array(self, nodes) -> np.ndarray:
        return np.array([self.positions[n] for n in nodes], dtype=float).reshape(-1, 2)


def initial_positions(n: int, seed: int) -> np.ndarray:
    """Uniform points in a disc of radius sqrt(n)."""
    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.random(n)) * math.sqrt(max(n, 1))
    theta = rng.random(n) * 2.0 * math.pi
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


# Squared-distance floor for repulsion; keeps near-coincident starts from flinging nodes away.
_MIN_DIST2 = 1e-4


def _forces(pos, mass, src, dst, w, params: LayoutParams, overlap: bool) -> np.ndarray:
    n = len(pos)
    force = np.zeros_like(pos)

    # Repulsion between every pair: F = kr * m_i * m_j / d along the separation.
    # sum_j f_ij (p_i - p_j) is evaluated as p_i * sum_j f_ij - (f @ p).
    if n > 1:
        x, y = pos[:, 0], pos[:, 1]
        factor = np.subtract.outer(x, x)
        factor *= factor
        dy2 = np.subtract.outer(y, y)
        dy2 *= dy2
        factor += dy2
        if overlap:
            gap = np.sqrt(factor) - 2.0 * params.node_size
            factor = np.where(gap > 0, 1.0 / np.maximum(gap * gap, _MIN_DIST2), np.where(gap < 0, 100.0, 0.0))
        else:
            np.maximum(factor, _MIN_DIST2, out=factor)
            np.divide(1.0, factor, out=factor)
        np.fill_diagonal(factor, 0.0)
        factor *= mass[None, :]
        rep = pos * factor.sum(axis=1)[:, None] - factor @ pos
        force += (params.scaling * mass)[:, None] * rep

    # Gravity toward the origin with magnitude kg * m.
    if params.gravity > 0:
        norm = np.sqrt(np.einsum("ij,ij->i", pos, pos))
        safe = np.where(norm > 0, norm, 1.0)
        force -= (params.gravity * mass / safe)[:, None] * pos * (norm > 0)[:, None]

    # Attraction along edges.
    if len(src):
        d = pos[src] - pos[dst]
        if params.edge_weight_influence == 0:
            ew = np.ones_like(w)
        elif params.edge_weight_influence == 1:
            ew = w
        else:
            ew = w ** params.edge_weight_influence
        if params.linlog_mode:
            length = np.sqrt(np.einsum("ij,ij->i", d, d))
            if overlap:
                length = length - 2.0 * params.node_size
            safe = np.where(length > 0, length, 1.0)
            coef = np.where(length > 0, ew * np.log1p(np.maximum(length, 0)) / safe, 0.0)
        elif overlap:
            length = np.sqrt(np.einsum("ij,ij->i", d, d))
            coef = np.where(length - 2.0 * params.node_size > 0, ew, 0.0)
        else:
            coef = ew
        pull = coef[:, None] * d
        np.add.at(force, src, -pull)
        np.add.at(force, dst, pull)
    return force


def force_atlas2(
    graph,
    params: LayoutParams | None = None,
    *,
    initial: Mapping | None = None,
    on_iteration: Callable[[int, np.ndarray], None] | None = None,
) -> LayoutPositions:
    """Lay out ``graph`` deterministically.

    ``initial`` overrides the seeded starting positions. ``on_iteration`` is
    called as ``on_iteration(i, positions)`` after every step. Overlap
    prevention, when enabled, is applied during the last 10% of iterations.
    """
    params = params or LayoutParams()
    g = graph.weighted("jaccard") if isinstance(graph, CooccurrenceGraph) else graph
    if not isinstance(g, WeightedGraph):
        raise TypeError("expected a CooccurrenceGraph or WeightedGraph")
    nodes = list(g.nodes)
    n = len(nodes)
    if n == 0:
        raise ValueError("cannot lay out an empty graph")
    index = {u: i for i, u in enumerate(nodes)}

    if initial is None:
        pos = initial_positions(n, params.seed)
    else:
        pos = np.array([initial[u] for u in nodes], dtype=float).reshape(n, 2)

    edges = list(g.edges())
    src = np.array([index[u] for u, _, _ in edges], dtype=np.intp)
    dst = np.array([index[v] for _, v, _ in edges], dtype=np.intp)
    w = np.array([float(x) for _, _, x in edges], dtype=float)
    mass = np.bincount(np.concatenate([src, dst]), minlength=n).astype(float) + 1.0

    overlap_from = params.iterations - params.iterations // 10 if params.prevent_overlap else params.iterations
    old_force = np.zeros_like(pos)
    speed = 1.0
    speed_efficiency = 1.0
    for it in range(params.iterations):
        overlap = it >= overlap_from
        force = _forces(pos, mass, src, dst, w, params, overlap)

        swinging = mass * np.sqrt(np.einsum("ij,ij->i", force - old_force, force - old_force))
        traction = mass * 0.5 * np.sqrt(np.einsum("ij,ij->i", force + old_force, force + old_force))
        total_swinging = float(swinging.sum())
        total_traction = float(traction.sum())

        estimated_jt = 0.05 * math.sqrt(n)
        jt = params.jitter_tolerance * max(
            math.sqrt(estimated_jt), min(10.0, estimated_jt * total_traction / (n * n))
        )
        if total_traction > 0 and total_swinging / total_traction > 2.0:
            if speed_efficiency > 0.05:
                speed_efficiency *= 0.5
            jt = max(jt, params.jitter_tolerance)
        if total_swinging > 0:
            target_speed = jt * speed_efficiency * total_traction / total_swinging
            if total_swinging > jt * total_traction:
                if speed_efficiency > 0.05:
                    speed_efficiency *= 0.7
            elif speed < 1000:
                speed_efficiency *= 1.3
            speed = speed + min(target_speed - speed, 0.5 * speed)

        if overlap:
            factor = 0.1 * speed / (1.0 + np.sqrt(speed * swinging))
            fnorm = np.sqrt(np.einsum("ij,ij->i", force, force))
            safe = np.where(fnorm > 0, fnorm, 1.0)
            factor = np.where(fnorm > 0, np.minimum(factor * fnorm, 10.0) / safe, factor)
        else:
            factor = speed / (1.0 + np.sqrt(speed * swinging))
        pos = pos + factor[:, None] * force
        old_force = force
        if on_iteration is not None:
            on_iteration(it, pos)

    if not np.all(np.isfinite(pos)):
        raise FloatingPointError("layout diverged to non-finite coordinates")
    positions = {u: (float(pos[i, 0]), float(pos[i, 1])) for i, u in enumerate(nodes)}
    return LayoutPositions(positions, asdict(params))
