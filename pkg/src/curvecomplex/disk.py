"""Labeled triangulated disks and their independent verifier."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .intersection import disjoint


@dataclass
class LabeledDisk:
    """An abstract triangulated disk whose vertices are labeled by curves.

    ``boundary`` lists vertex ids around the boundary cycle; ``good`` holds an
    optional goodness annotation per face (``None`` when not annotated).
    """

    labels: list                  # vertex id -> curve coordinates
    faces: list                   # triples of vertex ids
    boundary: list                # vertex ids in cyclic order
    good: list = field(default_factory=list)

    def __post_init__(self):
        self.labels = [tuple(c) for c in self.labels]
        self.faces = [tuple(f) for f in self.faces]
        if not self.good:
            self.good = [None] * len(self.faces)

    @property
    def num_vertices(self) -> int:
        return len({v for f in self.faces for v in f} | set(self.boundary))

    def edges(self) -> list:
        es = set()
        for f in self.faces:
            for k in range(3):
                a, b = f[k], f[(k + 1) % 3]
                es.add((min(a, b), max(a, b)))
        return sorted(es)

    def interior_vertices(self) -> list:
        used = {v for f in self.faces for v in f}
        return sorted(used - set(self.boundary))

    def boundary_labels(self) -> list:
        return [self.labels[v] for v in self.boundary]

    def euler(self) -> int:
        return self.num_vertices - len(self.edges()) + len(self.faces)

    def to_dict(self) -> dict:
        return {
            "labels": [list(c) for c in self.labels],
            "faces": [list(f) for f in self.faces],
            "boundary": list(self.boundary),
            "good": list(self.good),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledDisk":
        return cls(d["labels"], d["faces"], d["boundary"], d.get("good") or [])

    def to_dot(self, layer_of=None) -> str:
        """DOT export; vertices colored by layer when ``layer_of`` is given."""
        palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"]
        lines = ["graph disk {", "  node [style=filled];"]
        used = sorted({v for f in self.faces for v in f} | set(self.boundary))
        for v in used:
            lab = ",".join(map(str, self.labels[v]))
            attrs = [f'label="{v}: {lab}"']
            if layer_of is not None:
                k = layer_of(self.labels[v])
                if k is not None:
                    attrs.append(f'fillcolor="{palette[k % len(palette)]}"')
                    attrs.append(f'layer_index="{k}"')
            if v in self.boundary:
                attrs.append("penwidth=2")
            lines.append(f"  v{v} [{', '.join(attrs)}];")
        for a, b in self.edges():
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class AnnulusProfile:
    """Counts of vertices, edges and faces of a disk lying in each layer.

    A simplex lies in layer ``k`` when all of its vertices are in ``S_k``, so
    ``sigma(k)`` vanishes exactly when no simplex meets ``S_k``.
    """

    v: dict
    e: dict
    f: dict

    def sigma(self, k: int) -> int:
        return self.v.get(k, 0) + self.e.get(k, 0) + self.f.get(k, 0)

    def to_dict(self) -> dict:
        ks = sorted(set(self.v) | set(self.e) | set(self.f))
        return {str(k): {"v": self.v.get(k, 0), "e": self.e.get(k, 0), "f": self.f.get(k, 0),
                         "sigma": self.sigma(k)} for k in ks}


def annulus_profile(disk: LabeledDisk, layer_of) -> AnnulusProfile:
    v, e, f = Counter(), Counter(), Counter()
    used = sorted({x for fc in disk.faces for x in fc} | set(disk.boundary))
    for x in used:
        v[layer_of(disk.labels[x])] += 1
    for a, b in disk.edges():
        ks = {layer_of(disk.labels[a]), layer_of(disk.labels[b])}
        if len(ks) == 1:
            e[ks.pop()] += 1
    for fc in disk.faces:
        ks = {layer_of(disk.labels[x]) for x in fc}
        if len(ks) == 1:
            f[ks.pop()] += 1
    return AnnulusProfile(dict(v), dict(e), dict(f))


@dataclass
class DiskConstraints:
    """What a disk must satisfy beyond being a labeled disk of disjoint curves."""

    tri: object
    loop: list = None                 # expected boundary labels, in order
    allowed: object = None            # predicate on labels of interior vertices
    layer_of: object = None           # label -> layer (None when outside the universe)
    layers: tuple = None              # (lo, hi) allowed layer range for every vertex
    classifier: object = None         # re-checks goodness annotations
    check_edges: bool = True


@dataclass
class DiskViolation:
    kind: str
    where: object
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "where": self.where, "detail": self.detail}


def _cyclic_equal(a, b) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    n = len(a)
    for s in range(n):
        if all(a[(s + k) % n] == b[k] for k in range(n)):
            return True
        if all(a[(s - k) % n] == b[k] for k in range(n)):
            return True
    return False


def _link_is_disk_like(edges_at, interior: bool) -> bool:
    """The link of a vertex (edges between its neighbours) is a cycle or a path."""
    deg = Counter()
    adj = defaultdict(list)
    for a, b in edges_at:
        deg[a] += 1
        deg[b] += 1
        adj[a].append(b)
        adj[b].append(a)
    if not deg:
        return False
    if any(d > 2 for d in deg.values()):
        return False
    ends = [x for x, d in deg.items() if d == 1]
    if interior and ends:
        return False
    if not interior and len(ends) != 2:
        return False
    start = ends[0] if ends else next(iter(deg))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(deg)


def verify_disk(disk: LabeledDisk, constraints: DiskConstraints) -> list:
    """Every violation found; an empty list means the disk passes."""
    out = []
    faces = disk.faces
    if not faces:
        out.append(DiskViolation("topology", None, "no faces"))
        return out
    for i, f in enumerate(faces):
        if len(set(f)) != 3:
            out.append(DiskViolation("topology", i, "degenerate face"))
    if len({frozenset(f) for f in faces}) != len(faces):
        out.append(DiskViolation("topology", None, "repeated face"))
    edge_count = Counter()
    for f in faces:
        for k in range(3):
            a, b = f[k], f[(k + 1) % 3]
            edge_count[(min(a, b), max(a, b))] += 1
    for e, k in edge_count.items():
        if k > 2:
            out.append(DiskViolation("topology", list(e), f"edge in {k} faces"))
    if disk.euler() != 1:
        out.append(DiskViolation("topology", None, f"euler characteristic {disk.euler()}"))
    bd = disk.boundary
    bd_edges = {(min(bd[k], bd[(k + 1) % len(bd)]), max(bd[k], bd[(k + 1) % len(bd)])) for k in range(len(bd))}
    free = {e for e, k in edge_count.items() if k == 1}
    if len(set(bd)) != len(bd) or free != bd_edges or len(bd) < 3:
        out.append(DiskViolation("boundary", None, "boundary cycle does not match the free edges"))
    used = {v for f in faces for v in f}
    for v in sorted(used):
        link = []
        for f in faces:
            if v in f:
                a, b = [x for x in f if x != v]
                link.append((a, b))
        if not _link_is_disk_like(link, interior=v not in bd):
            out.append(DiskViolation("topology", v, "vertex link is not a cycle or path"))
    labels = [disk.labels[v] for v in sorted(used | set(bd))]
    if len(set(labels)) != len(labels):
        out.append(DiskViolation("embedding", None, "two vertices share a label"))
    if constraints.loop is not None:
        want = [tuple(c) for c in constraints.loop]
        if not _cyclic_equal(disk.boundary_labels(), want):
            out.append(DiskViolation("boundary", None, "boundary labels differ from the loop"))
    if constraints.check_edges:
        for a, b in sorted(edge_count):
            if not disjoint(constraints.tri, disk.labels[a], disk.labels[b]):
                out.append(DiskViolation("edge", [a, b], "endpoint curves intersect or coincide"))
    if constraints.allowed is not None:
        for v in disk.interior_vertices():
            if not constraints.allowed(disk.labels[v]):
                out.append(DiskViolation("allowed", v, "interior vertex outside the allowed set"))
    if constraints.layer_of is not None and constraints.layers is not None:
        lo, hi = constraints.layers
        for v in sorted(used | set(bd)):
            k = constraints.layer_of(disk.labels[v])
            if k is None or not lo <= k <= hi:
                out.append(DiskViolation("layer", v, f"layer {k} outside [{lo}, {hi}]"))
    if constraints.classifier is not None:
        for i, (f, g) in enumerate(zip(faces, disk.good)):
            if g is None:
                continue
            actual = constraints.classifier.is_good(*(disk.labels[v] for v in f))
            if actual != g:
                out.append(DiskViolation("goodness", i, f"annotated {g}, classifier says {actual}"))
    return out


__all__ = ["LabeledDisk", "AnnulusProfile", "annulus_profile", "DiskConstraints", "DiskViolation", "verify_disk"]
