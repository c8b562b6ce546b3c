"""Relative homology of deleted-ball pairs and inclusion-induced image ranks.

Two independent computations of the same quantity:
  * the direct method — quotient chain complexes plus the formula
    rank(im) = rank([i(Z1) | B2]) - rank(B2), where Z1 is a basis of relative
    cycles at level 1, i is the basis-diagonal chain map into level 2, and
    B2 spans the relative boundaries at level 2;
  * the coned oracle — two-level persistence on the cone model
    H(X, A) = reduced H(X ∪ ωA).
The direct method is the production path; the oracle cross-checks it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import _gf2fast
from .complexes import QuotientPairComplex, build_complex, cone_pair, delete_ball, quotient_pair
from .fieldla import FieldMatrix, persistent_reduce, rank, reduce_columns


@dataclass(frozen=True)
class QuerySpec:
    """One image-rank query: nested (scale, deleted-ball radius) levels.

    Level 1 must include into level 2: a1 <= a2 (complexes grow) and
    b2 <= b1 (deleted-ball subcomplexes grow).
    """

    p: int                      # sample point index (ball center)
    level1: Tuple[float, float]  # (a1, b1)
    level2: Tuple[float, float]  # (a2, b2)
    flavor: str = "rips"
    q: int = 2
    lmax: int = 1

    def __post_init__(self):
        a1, b1 = self.level1
        a2, b2 = self.level2
        if a1 > a2 or b2 > b1:
            raise ValueError("nesting violated: need a1 <= a2 and b2 <= b1")
        if self.lmax < 0:
            raise ValueError("lmax must be >= 0")
        if self.flavor not in ("rips", "cech"):
            raise ValueError(f"unknown flavor {self.flavor!r}")


@dataclass
class HomologySignature:
    """Per-degree ranks of the inclusion-induced image — the local homology
    estimate."""

    ranks: Dict[int, int]
    method: str

    def rank(self, ell: int) -> int:
        return self.ranks.get(ell, 0)

    def nonzero(self) -> Dict[int, int]:
        return {k: v for k, v in self.ranks.items() if v}


def _pair_boundary(Q: QuotientPairComplex, d: int, q: int) -> FieldMatrix:
    nrows, cols = Q.boundary_columns(d)
    return FieldMatrix.from_entries(q, nrows, cols)


def relative_betti(Q: QuotientPairComplex, ell: int, q: int = 2) -> int:
    """dim ker of the degree-ell restricted boundary minus rank of the
    degree-(ell+1) one, over GF(q)."""
    if Q.max_dim < ell + 1:
        raise ValueError(f"pair built to dimension {Q.max_dim}, need {ell + 1}")
    n_ell = Q.dim_count(ell)
    if n_ell == 0:
        return 0
    r_d = rank(_pair_boundary(Q, ell, q))
    r_up = rank(_pair_boundary(Q, ell + 1, q))
    return n_ell - r_d - r_up


def _count_pivots(lows, upto=None):
    it = lows if upto is None else lows[:upto]
    return sum(1 for low in it if low >= 0)


def _image_rank_from_pairs(Q1: QuotientPairComplex, Q2: QuotientPairComplex,
                           q: int, lmax: int) -> Dict[int, int]:
    """Direct image ranks from two already-built quotient pairs."""
    from .fieldla import kernel_basis
    out = {}
    for ell in range(lmax + 1):
        n1 = Q1.dim_count(ell)
        if n1 == 0 or Q2.dim_count(ell) == 0:
            out[ell] = 0
            continue
        Z1 = kernel_basis(_pair_boundary(Q1, ell, q))
        if Z1.ncols == 0:
            out[ell] = 0
            continue
        # basis-diagonal chain map into level 2: a level-1 basis simplex maps
        # to itself when it still meets the smaller ball, else to 0
        basis1 = Q1.basis[ell]
        row2 = Q2._index[ell]
        mapped_rows = [row2.get(s, -1) for s in basis1]
        icols = []
        for j in range(Z1.ncols):
            col = []
            for r1, c in Z1.entries(j):
                r2 = mapped_rows[r1]
                if r2 >= 0:
                    col.append((r2, c))
            icols.append(col)
        iZ1 = FieldMatrix.from_entries(q, Q2.dim_count(ell), icols)
        B2 = _pair_boundary(Q2, ell + 1, q)
        cols = B2.copy_columns() + iZ1.copy_columns()
        lows, _ = reduce_columns(cols, q)
        out[ell] = _count_pivots(lows) - _count_pivots(lows, B2.ncols)
    return out


def image_rank(spec: QuerySpec, points: np.ndarray) -> HomologySignature:
    """Rank of H(level-1 pair) -> H(level-2 pair) per degree (direct method)."""
    points = np.asarray(points, dtype=float)
    center = points[spec.p]
    a1, b1 = spec.level1
    a2, b2 = spec.level2
    Q1 = quotient_pair(points, center, a1, b1, spec.flavor, spec.lmax)
    Q2 = quotient_pair(points, center, a2, b2, spec.flavor, spec.lmax + 1)
    return HomologySignature(_image_rank_from_pairs(Q1, Q2, spec.q, spec.lmax),
                             method="direct")


def image_rank_oracle(spec: QuerySpec, points: np.ndarray) -> HomologySignature:
    """Independent coned-persistence computation of the same image ranks."""
    points = np.asarray(points, dtype=float)
    center = points[spec.p]
    cp = cone_pair(points, center, spec.level1, spec.level2,
                   spec.flavor, spec.lmax + 1)
    cols = cp.boundary_columns()
    q = spec.q
    if q == 2:
        packed = [sum(1 << r for r, _ in col) for col in cols]
    else:
        packed = [{r: s % q for r, s in col} for col in cols]
    surv = persistent_reduce(packed, q, cp.levels, cp.dims)
    ranks = {}
    for ell in range(spec.lmax + 1):
        v = surv.get(ell, 0)
        if ell == 0:
            v -= 1          # reduced homology: the cone vertex class never dies
        ranks[ell] = max(v, 0)
    return HomologySignature(ranks, method="coned")


def _absolute_betti(cx, q: int) -> Dict[int, int]:
    """Betti numbers of a simplicial complex over GF(q), all built degrees."""
    index = {d: {s: i for i, s in enumerate(ss)} for d, ss in cx.simplices.items()}
    ranks = {}
    top = max(cx.simplices) if cx.simplices else -1
    for d in range(1, top + 1):
        rows = index.get(d - 1, {})
        cols = []
        for s in cx.simplices.get(d, []):
            col = [(rows[s[:k] + s[k + 1:]], -1 if k % 2 else 1)
                   for k in range(d + 1)]
            col.sort()
            cols.append(col)
        ranks[d] = rank(FieldMatrix.from_entries(q, len(rows), cols))
    out = {}
    for d in range(0, top + 1):
        out[d] = cx.count(d) - ranks.get(d, 0) - ranks.get(d + 1, 0)
    return out


def exactness_check(points: np.ndarray, center, a: float, b: float,
                    flavor: str = "rips", q: int = 2) -> bool:
    """Long-exact-sequence and Euler-count sanity for one deleted-ball pair.

    Builds (X, A) to full dimension; checks that the alternating sums of
    dim H(A), dim H(X), dim H(X, A) cancel, and that the relative Euler
    characteristic equals the simplex-count difference.
    """
    points = np.asarray(points, dtype=float)
    full = len(points) - 1
    X = build_complex(points, None, a, full, flavor)
    A = build_complex(points, delete_ball(points, center, b), a, full, flavor)
    Q = quotient_pair(points, center, a, b, flavor, full + 1)
    bX = _absolute_betti(X, q)
    bA = _absolute_betti(A, q)
    top = max([d for d in X.simplices] + [0])
    alt = 0
    euler_rel = 0
    count_rel = 0
    for d in range(top + 2):
        hx = bX.get(d, 0)
        ha = bA.get(d, 0)
        hr = relative_betti(Q, d, q) if Q.dim_count(d) else 0
        alt += (-1) ** d * (ha - hx + hr)
        euler_rel += (-1) ** d * hr
        count_rel += (-1) ** d * (X.count(d) - A.count(d))
    return alt == 0 and euler_rel == count_rel


# ---------------------------------------------------------------------------
# Batch engine


@dataclass
class QueryResult:
    """One engine query: ranks plus (optionally) the data needed to compare
    image subspaces across nearby query points."""

    ranks: Dict[int, int]
    detail: Optional[dict] = None


class ImageRankEngine:
    """Evaluates many image-rank queries sharing one scale configuration.

    The two global complexes (level-1 scale capped at lmax, level-2 scale at
    lmax + 1) are built once; each query only selects basis simplices by
    ball-membership masks and reduces the resulting small matrices.  Results
    are identical to sequential per-point evaluation with ``image_rank``.
    """

    def __init__(self, points: np.ndarray, level1, level2,
                 flavor: str = "rips", q: int = 2, lmax: int = 1):
        self.points = np.asarray(points, dtype=float)
        self.a1, self.b1 = level1
        self.a2, self.b2 = level2
        if self.a1 > self.a2 or self.b2 > self.b1:
            raise ValueError("nesting violated: need a1 <= a2 and b2 <= b1")
        self.flavor = flavor
        self.q = q
        self.lmax = lmax
        n = len(self.points)
        c1 = build_complex(self.points, None, self.a1, lmax, flavor)
        c2 = build_complex(self.points, None, self.a2, lmax + 1, flavor)
        base = n + 1
        self.arr1 = {d: np.array(ss, dtype=np.int64).reshape(len(ss), d + 1)
                     for d, ss in c1.simplices.items()}
        self.arr2 = {d: np.array(ss, dtype=np.int64).reshape(len(ss), d + 1)
                     for d, ss in c2.simplices.items()}
        self.keys2 = {d: self._pack(a, base) for d, a in self.arr2.items()}
        self.face1 = {}
        self.face2 = {}
        self.map12 = {}
        for d, a in self.arr2.items():
            if d >= 1:
                self.face2[d] = self._face_index(a, self.keys2.get(d - 1), base)
        for d, a in self.arr1.items():
            if d >= 1:
                keys1_dm1 = self._pack(self.arr1[d - 1], base)
                self.face1[d] = self._face_index(a, keys1_dm1, base)
            k = self._pack(a, base)
            pos = np.searchsorted(self.keys2[d], k)
            if not np.array_equal(self.keys2[d][pos], k):
                raise AssertionError("level-1 simplex missing from level 2")
            self.map12[d] = pos

    @staticmethod
    def _pack(arr: np.ndarray, base: int) -> np.ndarray:
        keys = np.zeros(len(arr), dtype=np.int64)
        for k in range(arr.shape[1]):
            keys = keys * base + arr[:, k]
        return keys

    @staticmethod
    def _face_index(arr: np.ndarray, facet_keys: np.ndarray, base: int) -> np.ndarray:
        """(m, d+1) array: index of the k-th facet (vertex k removed) in the
        lexicographically sorted (d-1)-simplex array."""
        m, w = arr.shape
        out = np.empty((m, w), dtype=np.int64)
        for k in range(w):
            facet = np.delete(arr, k, axis=1)
            keys = np.zeros(m, dtype=np.int64)
            for j in range(w - 1):
                keys = keys * base + facet[:, j]
            pos = np.searchsorted(facet_keys, keys)
            if not np.array_equal(facet_keys[pos], keys):
                raise AssertionError("face closure violated")
            out[:, k] = pos
        return out

    def _masks(self, center, b1, b2):
        sq = ((self.points - center) ** 2).sum(-1)
        near1 = sq < b1 * b1
        near2 = sq < b2 * b2
        m1 = {d: near1[a].any(axis=1) for d, a in self.arr1.items()}
        m2 = {d: near2[a].any(axis=1) for d, a in self.arr2.items()}
        return m1, m2

    def _assemble(self, simp_idx, face_idx, row_mask, loc):
        """Boundary columns restricted to a basis, in the field representation."""
        cols = []
        if self.q == 2:
            for j in simp_idx:
                x = 0
                for f in face_idx[j]:
                    if row_mask[f]:
                        x ^= 1 << int(loc[f])
                cols.append(x)
        else:
            for j in simp_idx:
                d = {}
                sign = 1
                for f in face_idx[j]:
                    if row_mask[f]:
                        d[int(loc[f])] = sign % self.q
                    sign = -sign
                cols.append(d)
        return cols

    def query(self, center, keep_detail: bool = False,
              b1: Optional[float] = None, b2: Optional[float] = None) -> QueryResult:
        """One image-rank query; ``b1``/``b2`` override the default deleted-ball
        radii (the complex scales stay fixed per engine)."""
        center = np.asarray(center, dtype=float)
        if b1 is None:
            b1 = self.b1
        if b2 is None:
            b2 = self.b2
        if b2 > b1:
            raise ValueError("nesting violated: need b2 <= b1")
        m1, m2 = self._masks(center, b1, b2)
        ranks: Dict[int, int] = {}
        detail = {} if keep_detail else None
        for ell in range(self.lmax + 1):
            ranks[ell] = 0
            mask1 = m1.get(ell)
            mask2 = m2.get(ell)
            if mask1 is None or mask2 is None or not mask1.any() or not mask2.any():
                if keep_detail:
                    detail[ell] = None
                continue
            b1idx = np.flatnonzero(mask1)
            # kernel of the level-1 restricted boundary
            if ell == 0:
                d1cols = ([0] * len(b1idx)) if self.q == 2 else [{} for _ in b1idx]
            else:
                rmask = m1.get(ell - 1)
                loc1 = np.full(len(rmask), -1, dtype=np.int64)
                loc1[np.flatnonzero(rmask)] = np.arange(int(rmask.sum()))
                d1cols = self._assemble(b1idx, self.face1[ell], rmask, loc1)
            lows, combos = reduce_columns(d1cols, self.q, track=True)
            kern = [combos[j] for j in range(len(d1cols)) if lows[j] < 0]
            if not kern:
                if keep_detail:
                    detail[ell] = None
                continue
            rows2 = np.flatnonzero(mask2)
            loc2 = np.full(len(mask2), -1, dtype=np.int64)
            loc2[rows2] = np.arange(len(rows2))
            g = self.map12[ell][b1idx]       # arr2 indices of level-1 basis
            if self.q == 2 and _gf2fast.AVAILABLE and not keep_detail:
                ranks[ell] = self._image_rank_fast(ell, m2, loc2, len(rows2),
                                                   kern, g, mask2)
            else:
                icols = self._map_cycles(kern, g, mask2, loc2)
                b2cols = self._b2_columns(ell, m2, loc2)
                nb2 = len(b2cols)
                lows, _ = reduce_columns(b2cols + icols, self.q)
                ranks[ell] = _count_pivots(lows) - _count_pivots(lows, nb2)
            if keep_detail:
                detail[ell] = {
                    "cycle_simplices": g,          # arr2 indices, level-1 basis order
                    "cycles": kern,                # combos over that order
                    "mask2": mask2,
                    "loc2": loc2,
                    "b2": self._b2_columns(ell, m2, loc2),
                }
        return QueryResult(ranks, detail)

    def _image_rank_fast(self, ell, m2, loc2, nrows2, kern, g, mask2) -> int:
        """Packed-bitset GF(2) evaluation of rank([B2 | i(Z1)]) - rank(B2)."""
        nwords = max(1, (nrows2 + 63) // 64)
        up = m2.get(ell + 1)
        if up is not None and up.any():
            idx = np.flatnonzero(up)
            faces = self.face2[ell + 1][idx]
            rows_mat = np.where(m2[ell][faces], loc2[faces], -1)
            packed_b2 = _gf2fast.pack_rows(np.ascontiguousarray(rows_mat), nwords)
        else:
            packed_b2 = np.zeros((0, nwords), dtype=np.uint64)
        icols = self._map_cycles(kern, g, mask2, loc2)
        packed_i = np.stack([_gf2fast.int_to_words(x, nwords) for x in icols])
        cols = np.vstack([packed_b2, packed_i])
        lows = _gf2fast.reduce_packed(cols, nrows2)
        nb2 = len(packed_b2)
        return int((lows >= 0).sum()) - int((lows[:nb2] >= 0).sum())

    def _b2_columns(self, ell, m2, loc2):
        up = m2.get(ell + 1)
        if up is None or not up.any():
            return []
        return self._assemble(np.flatnonzero(up), self.face2[ell + 1],
                              m2[ell], loc2)

    def _map_cycles(self, kern, g, mask2, loc2):
        """Push level-1 cycle combinations through the basis-diagonal map."""
        cols = []
        if self.q == 2:
            for combo in kern:
                x = 0
                c = combo
                while c:
                    lowbit = c & -c
                    k = lowbit.bit_length() - 1
                    c ^= lowbit
                    gi = int(g[k])
                    if mask2[gi]:
                        x ^= 1 << int(loc2[gi])
                cols.append(x)
        else:
            for combo in kern:
                d = {}
                for k, coef in combo.items():
                    gi = int(g[k])
                    if mask2[gi]:
                        r = int(loc2[gi])
                        v = (d.get(r, 0) + coef) % self.q
                        if v:
                            d[r] = v
                        else:
                            d.pop(r, None)
                cols.append(d)
        return cols

    def query_index(self, i: int, keep_detail: bool = False) -> QueryResult:
        return self.query(self.points[i], keep_detail=keep_detail)
