"""Finite curve universes: enumeration, intersection matrices, cache files."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .intersection import intersection_number, is_essential, realize_disjointly
from .normal import DEFAULT_CURVE_CEILING, component_count, iter_valid_weights
from .surface import SCHEMA_VERSION, IdealTriangulation, triangulation_for

log = logging.getLogger(__name__)

CACHE_ENV = "CURVECOMPLEX_CACHE"
UNIVERSE_SCHEMA = "curvecomplex.universe"
UNIVERSE_VERSION = 1


class BudgetExceeded(RuntimeError):
    code = "BUDGET_EXCEEDED"

    def __init__(self, message: str, partial=None):
        super().__init__(f"BUDGET_EXCEEDED: {message}")
        self.partial = partial


class CurveUniverse:
    """All essential curves with every edge weight at most ``W``, sorted."""

    def __init__(self, tri: IdealTriangulation, W: int, curves, complete: bool = True):
        self.tri = tri
        self.W = W
        self.curves = [tuple(c) for c in curves]
        self.index = {c: i for i, c in enumerate(self.curves)}
        if len(self.index) != len(self.curves):
            raise ValueError("duplicate curves in universe")
        self.complete = complete
        self._imatrix = None
        self._dmatrix = None

    def __len__(self) -> int:
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)

    def __contains__(self, c) -> bool:
        return tuple(c) in self.index

    @property
    def genus(self) -> int:
        return self.tri.genus

    @property
    def punctures(self) -> int:
        return self.tri.punctures

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.tri.fingerprint.encode())
        h.update(str(self.W).encode())
        for c in self.curves:
            h.update((",".join(map(str, c)) + ";").encode())
        return h.hexdigest()[:16]

    # -- intersections ---------------------------------------------------
    def intersection_matrix(self, jobs: int = 1) -> np.ndarray:
        if self._imatrix is None:
            self._imatrix = pairwise_intersections(self.tri, self.curves, jobs)
        return self._imatrix

    def set_intersection_matrix(self, M) -> None:
        M = np.asarray(M, dtype=np.int64)
        if M.shape != (len(self), len(self)) or (M != M.T).any():
            raise ValueError("intersection matrix has wrong shape or is not symmetric")
        self._imatrix = M
        self._dmatrix = None

    def has_intersections(self) -> bool:
        return self._imatrix is not None

    def disjointness(self, jobs: int = 1) -> np.ndarray:
        """Boolean adjacency: distinct curves with disjoint representatives."""
        if self._dmatrix is None:
            if self._imatrix is not None:
                A = self._imatrix == 0
            else:
                A = pairwise_disjoint(self.tri, self.curves, jobs)
            np.fill_diagonal(A, False)
            self._dmatrix = A
        return self._dmatrix.copy()

    # -- serialization ---------------------------------------------------
    def to_dict(self, with_intersections: bool = True) -> dict:
        d = {
            "schema": UNIVERSE_SCHEMA,
            "version": UNIVERSE_VERSION,
            "tool_version": __version__,
            "surface": [self.tri.genus, self.tri.punctures],
            "triangulation_schema": SCHEMA_VERSION,
            "triangulation": self.tri.fingerprint,
            "W": self.W,
            "complete": self.complete,
            "curves": [list(c) for c in self.curves],
            "fingerprint": self.fingerprint,
        }
        if with_intersections and self._imatrix is not None:
            iu = np.triu_indices(len(self), 1)
            d["intersections"] = self._imatrix[iu].tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CurveUniverse":
        if d.get("schema") != UNIVERSE_SCHEMA or d.get("version") != UNIVERSE_VERSION:
            raise ValueError("unsupported universe schema")
        g, n = d["surface"]
        tri = triangulation_for(g, n)
        if tri.fingerprint != d["triangulation"]:
            raise ValueError("universe was built on a different triangulation")
        u = cls(tri, d["W"], d["curves"], d.get("complete", True))
        if u.fingerprint != d["fingerprint"]:
            raise ValueError("universe fingerprint mismatch")
        if "intersections" in d:
            N = len(u)
            M = np.zeros((N, N), dtype=np.int64)
            iu = np.triu_indices(N, 1)
            M[iu] = d["intersections"]
            u._imatrix = M + M.T
        return u


def _is_curve(tri, w) -> bool:
    return component_count(tri, w) == 1 and is_essential(tri, w)


def _enumerate_subtree(args):
    tri_json, W, prefix = args
    tri = IdealTriangulation.from_json(tri_json)
    return [w for w in iter_valid_weights(tri, W, prefix) if _is_curve(tri, w)]


def enumerate_curves(tri: IdealTriangulation, W: int, ceiling: int = DEFAULT_CURVE_CEILING,
                     jobs: int = 1, split_depth: int = 2) -> CurveUniverse:
    """Every essential curve whose weights are all at most ``W``.

    The search is split into independent subtrees by the values of the first
    ``split_depth`` edges of the search order; results are merged and sorted,
    so the universe does not depend on ``jobs``.
    """
    if W < 1:
        raise ValueError("W must be at least 1")
    prefixes = [list(p) for p in product(range(W + 1), repeat=min(split_depth, tri.num_edges))]
    found = []
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_enumerate_subtree, [(tri.to_json(), W, p) for p in prefixes]):
                found.extend(part)
                if len(found) > ceiling:
                    break
    else:
        for p in prefixes:
            for w in iter_valid_weights(tri, W, p):
                if _is_curve(tri, w):
                    found.append(w)
                    if len(found) > ceiling:
                        break
            if len(found) > ceiling:
                break
    if len(found) > ceiling:
        partial = CurveUniverse(tri, W, sorted(found)[:ceiling], complete=False)
        raise BudgetExceeded(f"more than {ceiling} curves with weights <= {W}", partial)
    return CurveUniverse(tri, W, sorted(found))


def _pair_rows(args):
    tri_json, curves, rows, kind = args
    tri = IdealTriangulation.from_json(tri_json)
    out = []
    for i in rows:
        row = []
        for j in range(i + 1, len(curves)):
            if kind == "i":
                row.append(intersection_number(tri, curves[i], curves[j]))
            else:
                row.append(realize_disjointly(tri, curves[i], curves[j]))
        out.append((i, row))
    return out


def _pairwise(tri, curves, jobs, kind, dtype):
    N = len(curves)
    M = np.zeros((N, N), dtype=dtype)
    chunks = [list(range(k, N, max(1, jobs * 4))) for k in range(max(1, jobs * 4))]
    args = [(tri.to_json(), curves, rows, kind) for rows in chunks if rows]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_pair_rows, args))
    else:
        results = [_pair_rows(a) for a in args]
    for part in results:
        for i, row in part:
            M[i, i + 1:] = row
    return M | M.T if dtype == bool else M + M.T


def pairwise_intersections(tri, curves, jobs: int = 1) -> np.ndarray:
    return _pairwise(tri, curves, jobs, "i", np.int64)


def pairwise_disjoint(tri, curves, jobs: int = 1) -> np.ndarray:
    return _pairwise(tri, curves, jobs, "d", bool)


# -- cache files ---------------------------------------------------------
def cache_dir() -> Path:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else Path.home() / ".cache" / "curvecomplex"


def cache_path(g: int, n: int, W: int, directory=None) -> Path:
    d = Path(directory) if directory else cache_dir()
    return d / f"universe_g{g}_n{n}_t{SCHEMA_VERSION}_W{W}.json"


def save_universe(u: CurveUniverse, path=None) -> Path:
    path = Path(path) if path else cache_path(u.genus, u.punctures, u.W)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(u.to_dict(), separators=(",", ":")))
    tmp.replace(path)
    return path


def load_universe(path) -> CurveUniverse:
    return CurveUniverse.from_dict(json.loads(Path(path).read_text()))


def get_universe(g: int, n: int, W: int, jobs: int = 1, intersections: bool = False,
                 use_cache: bool = True, ceiling: int = DEFAULT_CURVE_CEILING):
    """Load the cached universe or build (and cache) it.  Returns (universe, cache_hit)."""
    path = cache_path(g, n, W)
    if use_cache and path.exists():
        try:
            u = load_universe(path)
            if ceiling is not None and len(u) > ceiling:
                raise BudgetExceeded(f"cached universe has {len(u)} curves, ceiling is {ceiling}",
                                     CurveUniverse(u.tri, W, u.curves[:ceiling], complete=False))
            if intersections and not u.has_intersections():
                u.intersection_matrix(jobs)
                save_universe(u, path)
            return u, True
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            log.warning("ignoring unreadable cache %s: %s", path, exc)
    u = enumerate_curves(triangulation_for(g, n), W, ceiling=ceiling, jobs=jobs)
    if intersections:
        u.intersection_matrix(jobs)
    if use_cache:
        save_universe(u, path)
    return u, False
