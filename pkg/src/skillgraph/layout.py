"""Deterministic multilevel spring-electrical graph layout.

Forces follow the spring-electrical model: attraction d^2/K along edges,
repulsion C*K^2/d between all node pairs, with far pairs approximated by a
quadtree opened by the theta criterion. Step length follows the adaptive
cooling schedule: each node moves along its net force by at most `step`,
the step shrinks on energy setbacks and grows after sustained progress,
and a level converges when the largest move drops below tol*K.

Everything is seeded and order-fixed: identical (graph, config) inputs
produce bit-identical coordinates regardless of worker count or the order
edges were supplied in.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptyGraph, InvalidEdgeIndex

_U64 = np.uint64
_MAX_DEPTH = 48       # duplicate-position guard; deeper cells become buckets
_STEP_RATIO = 0.9     # cooling factor t
_PROGRESS_RUN = 5     # energy improvements needed before the step grows
_EXACT_MAX = 64       # below this, brute-force pairwise beats tree overhead
_REFINE_STEP = 0.1    # initial step fraction of K on prolonged levels
_THREAD_MIN = 20000   # below this, thread dispatch costs more than it buys


@dataclass(frozen=True)
class LayoutConfig:
    seed: int = 42
    K: float = 1.0
    C: float = 0.2
    theta: float = 0.7
    max_iterations: int = 300
    tol: float = 1e-3
    multilevel: bool = True
    coarsen_floor: int = 50

    def validate(self) -> None:
        if self.K <= 0 or self.C <= 0:
            raise ValueError("K and C must be positive")
        if not 0 <= self.theta < 2:
            raise ValueError("theta must be in [0, 2)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class LayoutResult:
    coords: np.ndarray      # (n, 2), centered on the origin
    converged: bool
    iterations_used: int    # finest-level iterations


def assign_indices(nodes: Iterable[str]) -> dict[str, int]:
    """Dense indices in ascending lexicographic order of node id."""
    ordered = sorted(set(nodes))
    if not ordered:
        raise EmptyGraph("no nodes to index")
    return {node: i for i, node in enumerate(ordered)}


# --- seeded positions -------------------------------------------------------
# splitmix64 gives a position that is a pure function of (seed, stream, index),
# so layouts cannot depend on generation order or on how many nodes exist.

def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _U64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        return z ^ (z >> _U64(31))


def _unit_floats(seed: int, stream: int, count: int) -> np.ndarray:
    base = _splitmix64(np.array([_U64(seed & 0xFFFFFFFFFFFFFFFF) ^ _U64(stream * 0xD1B54A32D192ED03 & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64))[0]
    with np.errstate(over="ignore"):
        idx = base + np.arange(count, dtype=np.uint64)
    return (_splitmix64(idx) >> _U64(11)) * 2.0**-53


def initial_positions(seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Seeded pseudo-random positions in the unit square."""
    xs = _unit_floats(seed, 2 * stream, n)
    ys = _unit_floats(seed, 2 * stream + 1, n)
    return np.column_stack([xs, ys])


# --- quadtree ---------------------------------------------------------------

class _QuadTree:
    """Array-backed quadtree over point positions, unit mass per point."""

    __slots__ = (
        "half", "kind", "point", "mass", "comx", "comy", "children", "buckets",
        "far_size",
    )

    KIND_LEAF = 0
    KIND_INTERNAL = 1
    KIND_BUCKET = 2

    def __init__(self, pos: np.ndarray):
        n = len(pos)
        xs, ys = pos[:, 0], pos[:, 1]
        cx = (xs.min() + xs.max()) / 2.0
        cy = (ys.min() + ys.max()) / 2.0
        half0 = max(xs.max() - xs.min(), ys.max() - ys.min()) / 2.0 + 1e-12

        centers_x = [cx]
        centers_y = [cy]
        halves = [half0]
        children: list[list[int]] = [[-1, -1, -1, -1]]
        point = [-1]
        count = [0]
        sumx = [0.0]
        sumy = [0.0]
        kind = [self.KIND_LEAF]
        buckets: dict[int, list[int]] = {}

        for i in range(n):
            x = float(xs[i])
            y = float(ys[i])
            c = 0
            depth = 0
            while True:
                count[c] += 1
                sumx[c] += x
                sumy[c] += y
                k = kind[c]
                if k == self.KIND_BUCKET:
                    buckets[c].append(i)
                    break
                if k == self.KIND_LEAF:
                    if point[c] < 0:
                        point[c] = i
                        break
                    if depth >= _MAX_DEPTH:
                        kind[c] = self.KIND_BUCKET
                        buckets[c] = [point[c], i]
                        point[c] = -1
                        break
                    # split: push the resident point one level down
                    j = point[c]
                    point[c] = -1
                    kind[c] = self.KIND_INTERNAL
                    jx, jy = float(xs[j]), float(ys[j])
                    q = (1 if jx > centers_x[c] else 0) | (2 if jy > centers_y[c] else 0)
                    h = halves[c] / 2.0
                    ccx = centers_x[c] + (h if q & 1 else -h)
                    ccy = centers_y[c] + (h if q & 2 else -h)
                    child = len(halves)
                    centers_x.append(ccx)
                    centers_y.append(ccy)
                    halves.append(h)
                    children.append([-1, -1, -1, -1])
                    point.append(j)
                    count.append(1)
                    sumx.append(jx)
                    sumy.append(jy)
                    kind.append(self.KIND_LEAF)
                    children[c][q] = child
                    # fall through: c is internal now, descend with i
                q = (1 if x > centers_x[c] else 0) | (2 if y > centers_y[c] else 0)
                nxt = children[c][q]
                if nxt < 0:
                    h = halves[c] / 2.0
                    ccx = centers_x[c] + (h if q & 1 else -h)
                    ccy = centers_y[c] + (h if q & 2 else -h)
                    nxt = len(halves)
                    centers_x.append(ccx)
                    centers_y.append(ccy)
                    halves.append(h)
                    children.append([-1, -1, -1, -1])
                    point.append(-1)
                    count.append(0)
                    sumx.append(0.0)
                    sumy.append(0.0)
                    kind.append(self.KIND_LEAF)
                    children[c][q] = nxt
                c = nxt
                depth += 1

        cnt = np.array(count, dtype=np.float64)
        self.half = np.array(halves)
        self.kind = np.array(kind, dtype=np.int8)
        self.point = np.array(point, dtype=np.int64)
        self.mass = cnt
        self.comx = np.array(sumx) / cnt
        self.comy = np.array(sumy) / cnt
        self.children = np.array(children, dtype=np.int64)
        self.buckets = {c: np.array(pts, dtype=np.int64) for c, pts in buckets.items()}
        # Opening criterion compares cell width plus the centre-of-mass
        # offset against theta*d, which keeps skewed cells honest.
        off = np.hypot(self.comx - np.array(centers_x), self.comy - np.array(centers_y))
        self.far_size = 2.0 * self.half + off


def _repulsion_chunk(
    pos: np.ndarray, tree: _QuadTree, node_idx: np.ndarray, crep: float, theta: float
) -> np.ndarray:
    """Repulsive displacement for one chunk of nodes.

    Breadth-first frontier of (node, cell) pairs; a node's contributions
    are accumulated in a fixed order that depends only on its own
    traversal, so chunking cannot perturb the floating-point sums.
    """
    disp = np.zeros_like(pos)
    xs, ys = pos[:, 0], pos[:, 1]
    nodes = node_idx
    cells = np.zeros(len(node_idx), dtype=np.int64)

    while len(nodes):
        kind = tree.kind[cells]
        dx = xs[nodes] - tree.comx[cells]
        dy = ys[nodes] - tree.comy[cells]
        d2 = dx * dx + dy * dy

        is_leaf = kind == _QuadTree.KIND_LEAF
        is_internal = kind == _QuadTree.KIND_INTERNAL
        is_bucket = kind == _QuadTree.KIND_BUCKET
        far = is_internal & (tree.far_size[cells] ** 2 < (theta * theta) * d2)
        accept = (is_leaf & (tree.point[cells] != nodes)) | far
        usable = accept & (d2 > 0.0)
        if np.any(usable):
            w = crep * tree.mass[cells][usable] / d2[usable]
            np.add.at(disp[:, 0], nodes[usable], w * dx[usable])
            np.add.at(disp[:, 1], nodes[usable], w * dy[usable])

        if tree.buckets:
            for k in np.flatnonzero(is_bucket):
                i = nodes[k]
                for j in tree.buckets[int(cells[k])]:
                    if j == i:
                        continue
                    bx = xs[i] - xs[j]
                    by = ys[i] - ys[j]
                    b2 = bx * bx + by * by
                    if b2 > 0.0:
                        disp[i, 0] += crep * bx / b2
                        disp[i, 1] += crep * by / b2

        expand = is_internal & ~far
        if not np.any(expand):
            break
        child = tree.children[cells[expand]]
        nodes = np.repeat(nodes[expand], 4)
        cells = child.ravel()
        keep = cells >= 0
        nodes = nodes[keep]
        cells = cells[keep]
    return disp


def _exact_repulsion(pos: np.ndarray, crep: float) -> np.ndarray:
    """All-pairs repulsion; per-node sums are row reductions, so the result
    cannot depend on worker partitioning."""
    dx = pos[:, 0][:, None] - pos[:, 0][None, :]
    dy = pos[:, 1][:, None] - pos[:, 1][None, :]
    d2 = dx * dx + dy * dy
    live = d2 > 0.0
    w = np.where(live, crep / np.where(live, d2, 1.0), 0.0)
    return np.column_stack([(w * dx).sum(axis=1), (w * dy).sum(axis=1)])


def _forces(
    pos: np.ndarray,
    edges: np.ndarray,
    cfg: LayoutConfig,
    workers: int,
    pool: ThreadPoolExecutor | None,
) -> np.ndarray:
    n = len(pos)
    crep = cfg.C * cfg.K * cfg.K

    if n <= _EXACT_MAX:
        disp = _exact_repulsion(pos, crep)
    elif workers <= 1:
        tree = _QuadTree(pos)
        disp = _repulsion_chunk(pos, tree, np.arange(n, dtype=np.int64), crep, cfg.theta)
    else:
        # Chunk decomposition is identical either way; threads are engaged
        # only at a scale where they pay for their dispatch cost.
        tree = _QuadTree(pos)
        chunks = np.array_split(np.arange(n, dtype=np.int64), workers)
        if pool is not None and n >= _THREAD_MIN:
            futures = [
                pool.submit(_repulsion_chunk, pos, tree, chunk, crep, cfg.theta)
                for chunk in chunks
            ]
            parts = [fut.result() for fut in futures]  # fixed chunk order
        else:
            parts = [
                _repulsion_chunk(pos, tree, chunk, crep, cfg.theta) for chunk in chunks
            ]
        disp = np.zeros_like(pos)
        for part in parts:
            disp += part

    if len(edges):
        delta = pos[edges[:, 1]] - pos[edges[:, 0]]
        dist = np.sqrt((delta * delta).sum(axis=1))
        pull = delta * (dist / cfg.K)[:, None]
        np.add.at(disp, edges[:, 0], pull)
        np.add.at(disp, edges[:, 1], -pull)
    return disp


def _force_loop(
    pos: np.ndarray,
    edges: np.ndarray,
    cfg: LayoutConfig,
    workers: int,
    pool: ThreadPoolExecutor | None,
    initial_step: float | None = None,
    allow_growth: bool = True,
) -> tuple[np.ndarray, int, bool]:
    """Iterate until the largest move in an iteration drops below tol*K.

    Each node moves along its net force by at most `step` (never more than
    the force magnitude itself, which keeps near-equilibrium nodes from
    hopping between wells). The step cools by t on energy setbacks; on
    refinement levels growth is disabled so prolonged positions are only
    polished, never re-agitated.
    """
    step = cfg.K if initial_step is None else initial_step
    progress = 0
    energy = np.inf
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        iterations += 1
        disp = _forces(pos, edges, cfg, workers, pool)
        mag = np.sqrt((disp * disp).sum(axis=1))
        moving = mag > 0.0
        scale = np.minimum(mag[moving], step) / mag[moving]
        pos[moving] += disp[moving] * scale[:, None]
        moved = float((mag[moving] * scale).max()) if scale.size else 0.0

        new_energy = float((mag * mag).sum())
        if new_energy < energy:
            progress += 1
            if allow_growth and progress >= _PROGRESS_RUN:
                progress = 0
                step /= _STEP_RATIO
        else:
            progress = 0
            step *= _STEP_RATIO
        energy = new_energy
        if moved < cfg.tol * cfg.K:
            converged = True
            break
    return pos, iterations, converged


# --- multilevel coarsening ---------------------------------------------------

def _coarsen(
    n: int, edges: np.ndarray, weights: np.ndarray
) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """One heavy-edge-matching round: returns (n', edges', weights', cluster)."""
    order = sorted(range(len(edges)), key=lambda e: (-weights[e], edges[e, 0], edges[e, 1]))
    mate = np.full(n, -1, dtype=np.int64)
    for e in order:
        a, b = int(edges[e, 0]), int(edges[e, 1])
        if mate[a] < 0 and mate[b] < 0:
            mate[a] = b
            mate[b] = a

    cluster = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for i in range(n):
        if cluster[i] >= 0:
            continue
        cluster[i] = nxt
        if mate[i] >= 0:
            cluster[mate[i]] = nxt
        nxt += 1

    merged: dict[tuple[int, int], float] = {}
    for e in range(len(edges)):
        a = int(cluster[edges[e, 0]])
        b = int(cluster[edges[e, 1]])
        if a == b:
            continue
        pair = (a, b) if a < b else (b, a)
        merged[pair] = merged.get(pair, 0.0) + float(weights[e])
    pairs = sorted(merged)
    c_edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    c_weights = np.array([merged[p] for p in pairs])
    return nxt, c_edges, c_weights, cluster


def _canonical_edges(n: int, edges: Iterable) -> tuple[np.ndarray, np.ndarray]:
    merged: dict[tuple[int, int], float] = {}
    for e in edges:
        if len(e) == 2:
            i, j = e
            w = 1.0
        else:
            i, j, w = e
        i, j = int(i), int(j)
        if i == j:
            raise InvalidEdgeIndex(f"self-loop at {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidEdgeIndex(f"edge ({i}, {j}) outside [0, {n})")
        pair = (i, j) if i < j else (j, i)
        w = float(w)
        if pair not in merged or w > merged[pair]:
            merged[pair] = w
    pairs = sorted(merged)
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return arr, np.array([merged[p] for p in pairs])


def sfdp_layout(
    n: int, edges: Iterable, cfg: LayoutConfig = LayoutConfig(), workers: int = 1
) -> LayoutResult:
    """Lay out n nodes; edges are (i, j) or (i, j, weight) index pairs.

    Weights only steer heavy-edge matching during coarsening; attraction
    itself is unweighted. The worker count is a throughput knob and never
    changes the result.
    """
    cfg.validate()
    if n < 1:
        raise EmptyGraph("cannot lay out zero nodes")
    edge_arr, weight_arr = _canonical_edges(n, edges)

    if n == 1:
        return LayoutResult(coords=np.zeros((1, 2)), converged=True, iterations_used=0)

    levels = [(n, edge_arr, weight_arr)]
    clusters: list[np.ndarray] = []
    if cfg.multilevel:
        while levels[-1][0] > cfg.coarsen_floor:
            ln, le, lw = levels[-1]
            cn, ce, cw, cluster = _coarsen(ln, le, lw)
            if cn > 0.9 * ln:  # matching stalled (isolated or star-like remainder)
                break
            levels.append((cn, ce, cw))
            clusters.append(cluster)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        depth = len(levels) - 1
        pos = initial_positions(cfg.seed, levels[depth][0], stream=depth)
        iterations = 0
        converged = False
        for lvl in range(depth, -1, -1):
            le = levels[lvl][1]
            coarsest = lvl == depth
            pos, iterations, converged = _force_loop(
                pos, le, cfg, workers, pool,
                initial_step=cfg.K if coarsest else _REFINE_STEP * cfg.K,
                allow_growth=coarsest,
            )
            if lvl > 0:
                jitter = (initial_positions(cfg.seed, levels[lvl - 1][0], stream=1000 + lvl) - 0.5) * (0.05 * cfg.K)
                pos = pos[clusters[lvl - 1]] + jitter
    finally:
        if pool is not None:
            pool.shutdown()

    pos -= pos.mean(axis=0)
    return LayoutResult(coords=pos, converged=converged, iterations_used=iterations)


def layout_hash(result: LayoutResult) -> int:
    """64-bit digest of coordinates at the serialized 6-decimal precision."""
    h = hashlib.blake2b(digest_size=8)
    for x, y in result.coords:
        x = 0.0 if x == 0 else float(x)
        y = 0.0 if y == 0 else float(y)
        h.update(f"{x:.6f},{y:.6f}\n".encode())
    return int.from_bytes(h.digest(), "big")


# --- intermediate CSV staging ---

def write_coords_csv(result: LayoutResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["idx", "x", "y"])
        for i, (x, y) in enumerate(result.coords):
            w.writerow([i, f"{x:.6f}", f"{y:.6f}"])


def read_coords_csv(path) -> np.ndarray:
    rows: list[tuple[int, float, float]] = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            rows.append((int(row["idx"]), float(row["x"]), float(row["y"])))
    rows.sort()
    return np.array([[x, y] for _i, x, y in rows])
