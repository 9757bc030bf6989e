"""Spatial world: typed sites attached to a road graph, plus projection.

The map is immutable once built and safe to share across scenarios.  All
behavioral distance queries use road-network distances (never straight-line),
and coordinate output uses a local equirectangular projection about a WGS84
anchor, which is analytically invertible at city scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial import cKDTree

from .errors import ConfigurationError, MapLoadError, ProjectionError, SiteNotFoundError

METERS_PER_DEG_LAT = 111_320.0
EDGE_LENGTH_SLACK_M = 1e-6
PROJECTION_PAD_M = 10_000.0


class SiteKind(str, Enum):
    HOME = "Home"
    WORKPLACE = "Workplace"
    RESTAURANT = "Restaurant"
    RECREATION = "Recreation"


@dataclass(frozen=True)
class Site:
    id: int
    kind: SiteKind
    position: tuple[float, float]  # local meters
    attached_node: int
    interest_group: int | None = None  # present iff kind == RECREATION


@dataclass
class RoadGraph:
    """Undirected road network with node positions in local meters."""

    node_ids: np.ndarray  # (n,) int64, unique
    xy: np.ndarray  # (n, 2) float64
    edges: np.ndarray  # (m, 2) int64 node indices (not ids)
    lengths: np.ndarray  # (m,) float64 meters

    def __post_init__(self) -> None:
        self._index_of = {int(nid): i for i, nid in enumerate(self.node_ids)}
        if len(self._index_of) != len(self.node_ids):
            raise MapLoadError("duplicate node id in road graph")

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def index_of(self, node_id: int) -> int:
        try:
            return self._index_of[int(node_id)]
        except KeyError:
            raise MapLoadError(f"unknown node id {node_id}") from None

    def adjacency(self) -> csr_matrix:
        n = self.n_nodes
        a, b = self.edges[:, 0], self.edges[:, 1]
        row = np.concatenate([a, b])
        col = np.concatenate([b, a])
        w = np.concatenate([self.lengths, self.lengths])
        return csr_matrix((w, (row, col)), shape=(n, n))

    def validate(self) -> None:
        if self.n_nodes == 0:
            raise MapLoadError("empty road graph")
        n_comp, _ = connected_components(self.adjacency(), directed=False)
        if n_comp != 1:
            raise MapLoadError(f"disconnected graph ({n_comp} components)")
        d = self.xy[self.edges[:, 0]] - self.xy[self.edges[:, 1]]
        straight = np.hypot(d[:, 0], d[:, 1])
        bad = np.nonzero(self.lengths < straight - EDGE_LENGTH_SLACK_M)[0]
        if bad.size:
            raise MapLoadError(
                f"edge length below straight-line distance at edge index {int(bad[0])}"
            )


class WorldMap:
    """Road graph plus typed sites, with cached routing and projection."""

    def __init__(
        self,
        graph: RoadGraph,
        sites: list[Site],
        wgs84_anchor: tuple[float, float],
        region_name: str,
    ):
        graph.validate()
        self.graph = graph
        self.sites = list(sites)
        self.wgs84_anchor = (float(wgs84_anchor[0]), float(wgs84_anchor[1]))
        self.region_name = region_name

        self._site_by_id: dict[int, Site] = {}
        for s in self.sites:
            if s.id in self._site_by_id:
                raise MapLoadError(f"duplicate site id {s.id}")
            if (s.kind == SiteKind.RECREATION) != (s.interest_group is not None):
                raise MapLoadError(
                    f"site {s.id}: interest_group must be present iff kind is Recreation"
                )
            graph.index_of(s.attached_node)  # raises on unknown node
            self._site_by_id[s.id] = s
        for kind in SiteKind:
            if not any(s.kind == kind for s in self.sites):
                raise MapLoadError(f"missing site kind {kind.value}")

        self._by_kind: dict[SiteKind, list[Site]] = {
            kind: sorted((s for s in self.sites if s.kind == kind), key=lambda s: s.id)
            for kind in SiteKind
        }
        lats = self.graph.xy
        self._bbox = (
            float(lats[:, 0].min()),
            float(lats[:, 0].max()),
            float(lats[:, 1].min()),
            float(lats[:, 1].max()),
        )
        self._dist: np.ndarray | None = None
        self._pred: np.ndarray | None = None
        self._kdtree: cKDTree | None = None
        self._route_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self._nearest_cache: dict[tuple[int, SiteKind, int | None], Site] = {}

    # -- lookups ---------------------------------------------------------

    def site(self, site_id: int) -> Site:
        try:
            return self._site_by_id[int(site_id)]
        except KeyError:
            raise SiteNotFoundError(f"unknown site id {site_id}") from None

    def sites_of_kind(self, kind: SiteKind) -> list[Site]:
        return self._by_kind[kind]

    @property
    def interest_groups(self) -> list[int]:
        groups = {s.interest_group for s in self._by_kind[SiteKind.RECREATION]}
        return sorted(g for g in groups if g is not None)

    # -- routing ---------------------------------------------------------

    def _ensure_paths(self) -> None:
        if self._dist is None:
            dist, pred = shortest_path(
                self.graph.adjacency(), method="D", directed=False, return_predecessors=True
            )
            self._dist = dist
            self._pred = pred

    def node_distance(self, a_idx: int, b_idx: int) -> float:
        self._ensure_paths()
        return float(self._dist[a_idx, b_idx])

    def node_path(self, a_idx: int, b_idx: int) -> list[int]:
        """Node index sequence from a to b along the shortest path."""
        self._ensure_paths()
        if a_idx == b_idx:
            return [a_idx]
        path = [b_idx]
        cur = b_idx
        while cur != a_idx:
            cur = int(self._pred[a_idx, cur])
            if cur < 0:
                raise MapLoadError("no path between nodes")  # unreachable on valid maps
            path.append(cur)
        path.reverse()
        return path

    def route(self, from_site_id: int, to_site_id: int) -> tuple[np.ndarray, np.ndarray]:
        """Polyline (xy, cumulative meters) between two sites' attached nodes."""
        key = (int(from_site_id), int(to_site_id))
        cached = self._route_cache.get(key)
        if cached is not None:
            return cached
        a = self.graph.index_of(self.site(from_site_id).attached_node)
        b = self.graph.index_of(self.site(to_site_id).attached_node)
        nodes = self.node_path(a, b)
        xy = self.graph.xy[nodes]
        seg = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        self._route_cache[key] = (xy, cum)
        return xy, cum

    def nearest_node(self, position: tuple[float, float]) -> int:
        if self._kdtree is None:
            self._kdtree = cKDTree(self.graph.xy)
        return int(self._kdtree.query(np.asarray(position, dtype=float))[1])

    # -- projection ------------------------------------------------------

    def _check_bounds(self, x: float, y: float) -> None:
        x0, x1, y0, y1 = self._bbox
        if not (
            x0 - PROJECTION_PAD_M <= x <= x1 + PROJECTION_PAD_M
            and y0 - PROJECTION_PAD_M <= y <= y1 + PROJECTION_PAD_M
        ):
            raise ProjectionError(f"position ({x:.1f}, {y:.1f}) outside padded map bounds")


def generate_synthetic_map(spec: MapSpec, seed: int) -> WorldMap:
    """Build a deterministic grid-city world from a declarative spec.

    Sites land on random grid nodes (with replacement); recreation sites get
    interest groups round-robin and then shuffled, so group sizes differ by at
    most one.
    """
    spec.validate()
    rng = np.random.default_rng(seed)

    rows, cols = spec.rows, spec.cols
    n_nodes = rows * cols
    node_ids = np.arange(n_nodes, dtype=np.int64)
    xs = (node_ids % cols) * spec.block_m
    ys = (node_ids // cols) * spec.block_m
    xy = np.stack([xs, ys], axis=1).astype(float)

    edges = []
    for r in range(rows):
        for c in range(cols):
            idx = r * cols + c
            if c + 1 < cols:
                edges.append((idx, idx + 1))
            if r + 1 < rows:
                edges.append((idx, idx + cols))
    edges = np.asarray(edges, dtype=np.int64)
    lengths = np.full(len(edges), float(spec.block_m))
    graph = RoadGraph(node_ids, xy, edges, lengths)

    counts = [
        (SiteKind.HOME, spec.homes),
        (SiteKind.WORKPLACE, spec.workplaces),
        (SiteKind.RESTAURANT, spec.restaurants),
        (SiteKind.RECREATION, spec.recreation),
    ]
    groups = [i % spec.groups for i in range(spec.recreation)]
    rng.shuffle(groups)

    sites: list[Site] = []
    sid = 0
    for kind, count in counts:
        nodes = rng.integers(0, n_nodes, size=count)
        for j, node in enumerate(nodes):
            group = groups[j] if kind == SiteKind.RECREATION else None
            pos = (float(xy[node, 0]), float(xy[node, 1]))
            sites.append(Site(sid, kind, pos, int(node), group))
            sid += 1
    return WorldMap(graph, sites, spec.anchor, spec.region)


@dataclass
class MapSpec:
    rows: int = 10
    cols: int = 10
    block_m: float = 100.0
    homes: int = 50
    workplaces: int = 10
    restaurants: int = 10
    recreation: int = 10
    groups: int = 3
    anchor: tuple[float, float] = (40.0, -80.0)
    region: str = "gridville"

    def validate(self) -> None:
        if self.rows < 2 or self.cols < 2:
            raise ConfigurationError(f"grid must be at least 2x2, got {self.rows}x{self.cols}")
        if self.block_m <= 0:
            raise ConfigurationError("block size must be positive")
        for name in ("homes", "workplaces", "restaurants", "recreation"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"site count {name!r} must be at least 1")
        if self.groups < 2:
            raise ConfigurationError("need at least 2 interest groups")

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "block_m": self.block_m,
            "homes": self.homes,
            "workplaces": self.workplaces,
            "restaurants": self.restaurants,
            "recreation": self.recreation,
            "groups": self.groups,
            "anchor": list(self.anchor),
            "region": self.region,
        }

    @classmethod
    def from_dict(cls, data: dict) -> MapSpec:
        kwargs = dict(data)
        if "anchor" in kwargs:
            kwargs["anchor"] = tuple(kwargs["anchor"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(f"bad synthetic map spec: {exc}") from None


def load_map(path: str) -> WorldMap:
    """Load and validate a map file (see README for the JSON schema)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MapLoadError(f"cannot parse map file {path}: {exc}") from None

    try:
        region = doc["region"]
        anchor = (float(doc["anchor"][0]), float(doc["anchor"][1]))
        raw_nodes = doc["nodes"]
        raw_edges = doc["edges"]
        raw_sites = doc["sites"]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise MapLoadError(f"map file {path} missing or malformed field: {exc}") from None

    node_ids = np.asarray([n[0] for n in raw_nodes], dtype=np.int64)
    xy = np.asarray([[n[1], n[2]] for n in raw_nodes], dtype=float)
    graph = RoadGraph(
        node_ids,
        xy,
        np.zeros((0, 2), dtype=np.int64),
        np.zeros(0, dtype=float),
    )
    edge_idx = np.asarray(
        [[graph.index_of(e[0]), graph.index_of(e[1])] for e in raw_edges], dtype=np.int64
    )
    lengths = np.asarray([float(e[2]) for e in raw_edges])
    graph = RoadGraph(node_ids, xy, edge_idx, lengths)

    sites = []
    for s in raw_sites:
        try:
            kind = SiteKind(s["kind"])
        except ValueError:
            raise MapLoadError(f"site {s.get('id')}: unknown kind {s.get('kind')!r}") from None
        group = s.get("group")
        if kind == SiteKind.RECREATION and group is None:
            raise MapLoadError(f"site {s['id']}: Recreation site lacks interest_group")
        if kind != SiteKind.RECREATION and group is not None:
            raise MapLoadError(f"site {s['id']}: interest_group on non-Recreation site")
        node_idx = graph.index_of(s["node"])
        pos = (float(xy[node_idx, 0]), float(xy[node_idx, 1]))
        sites.append(Site(int(s["id"]), kind, pos, int(s["node"]), group))

    return WorldMap(graph, sites, anchor, region)


def shortest_path_length(world: WorldMap, site_a: int, site_b: int) -> float:
    """Road distance in meters between two sites' attached nodes."""
    a = world.graph.index_of(world.site(site_a).attached_node)
    b = world.graph.index_of(world.site(site_b).attached_node)
    if a == b:
        return 0.0
    return world.node_distance(a, b)


def nearest_site(
    world: WorldMap,
    from_position: tuple[float, float],
    kind: SiteKind,
    group_filter: int | None = None,
) -> Site:
    """Site of `kind` minimizing road distance from the node nearest the query.

    Ties break toward the lowest site id.
    """
    node = world.nearest_node(from_position)
    key = (node, kind, group_filter)
    cached = world._nearest_cache.get(key)
    if cached is not None:
        return cached

    candidates = [
        s
        for s in world.sites_of_kind(kind)
        if group_filter is None or s.interest_group == group_filter
    ]
    if not candidates:
        raise SiteNotFoundError(
            f"no site of kind {kind.value}"
            + (f" in group {group_filter}" if group_filter is not None else "")
        )
    best = None
    best_dist = math.inf
    for s in candidates:  # candidates are id-sorted, so first win is lowest id
        d = world.node_distance(node, world.graph.index_of(s.attached_node))
        if d < best_dist:
            best, best_dist = s, d
    world._nearest_cache[key] = best
    return best


def popularity_rank(world: WorldMap, visited_site_ids, kind: SiteKind) -> list[Site]:
    """Sites of `kind` ordered by visit count descending, ties by lowest id."""
    counts: dict[int, int] = {}
    for sid in visited_site_ids:
        site = world.site(sid)
        if site.kind == kind:
            counts[site.id] = counts.get(site.id, 0) + 1
    if not counts:
        raise SiteNotFoundError(f"no visits of kind {kind.value} in log")
    order = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [world.site(sid) for sid, _ in order]


def to_wgs84(world: WorldMap, position: tuple[float, float]) -> tuple[float, float]:
    """Project local meters to (lat, lon) degrees about the map anchor."""
    x, y = float(position[0]), float(position[1])
    world._check_bounds(x, y)
    lat0, lon0 = world.wgs84_anchor
    lat = lat0 + y / METERS_PER_DEG_LAT
    lon = lon0 + x / (METERS_PER_DEG_LAT * math.cos(math.radians(lat0)))
    return lat, lon


def from_wgs84(world: WorldMap, lat: float, lon: float) -> tuple[float, float]:
    """Inverse of :func:`to_wgs84`."""
    lat0, lon0 = world.wgs84_anchor
    y = (lat - lat0) * METERS_PER_DEG_LAT
    x = (lon - lon0) * (METERS_PER_DEG_LAT * math.cos(math.radians(lat0)))
    world._check_bounds(x, y)
    return x, y


def project_points(world: WorldMap, xy: np.ndarray) -> np.ndarray:
    """Vectorized projection of an (n, 2) local-meter array to (lat, lon)."""
    lat0, lon0 = world.wgs84_anchor
    out = np.empty_like(xy, dtype=np.float64)
    out[..., 0] = lat0 + xy[..., 1] / METERS_PER_DEG_LAT
    out[..., 1] = lon0 + xy[..., 0] / (METERS_PER_DEG_LAT * math.cos(math.radians(lat0)))
    return out
