"""Chart-level geometry: from a symbolic metric to pointwise curvature data.

A :class:`MetricField` holds the metric components as symbolic expressions of
the chart coordinates.  Everything downstream -- Christoffel symbols, their
derivatives, the Ricci tensor, the scalar curvature and its differential --
is built symbolically (exact differentiation, no nested finite differences)
and cached on first use.  Point queries evaluate the cached expressions and
assemble numpy arrays.

The cache fill is single-writer: build it from one thread (any first query
does), after which all point queries are pure reads and safe to run
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .errors import DimensionMismatch
from .tensor import (Metric, Tensor04, max_abs, ricci_operator,
                     scalar_curvature)

__all__ = ["MetricField", "CurvatureBundle", "christoffel", "curvature_bundle",
           "nabla_riemann"]


@dataclass(frozen=True)
class CurvatureBundle:
    """All pointwise curvature data derived from a metric at one point.

    `riemann` uses the (0,4) convention R[i,j,k,l] = g(R(e_i,e_j)e_k, e_l);
    `nabla_ricci[i,j,k]` is the covariant derivative (nabla_i S)(e_j, e_k);
    `dr[i]` is the coordinate differential of the scalar curvature.

    Synthetic pointwise data (no chart behind it) is built with
    :meth:`from_tensors`, in which case `point`, `nabla_ricci`, `dr` and even
    `riemann` may be absent (None).
    """

    g: Metric
    riemann: Tensor04 | None
    ricci: np.ndarray
    ricci_op: np.ndarray
    r: float
    point: tuple[float, ...] | None = None
    nabla_ricci: np.ndarray | None = None
    dr: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.g.n

    @classmethod
    def from_tensors(cls, g: Metric, riemann: Tensor04 | None = None,
                     ricci=None, r: float | None = None,
                     nabla_ricci=None, dr=None,
                     point: Sequence[float] | None = None) -> "CurvatureBundle":
        """Assemble a bundle from raw pointwise tensors.

        `ricci` defaults to the contraction of `riemann`; `r` defaults to the
        metric trace of `ricci`.  The Ricci operator is always recomputed.
        """
        if ricci is None:
            if riemann is None:
                raise DimensionMismatch("need riemann or ricci to build a bundle")
            from .tensor import ricci_contract
            ricci = ricci_contract(riemann, g)
        ricci = np.asarray(ricci, dtype=float)
        if ricci.shape != (g.n, g.n):
            raise DimensionMismatch(
                f"ricci must have shape ({g.n},{g.n}), got {ricci.shape}")
        if riemann is not None and riemann.n != g.n:
            raise DimensionMismatch(f"riemann n={riemann.n} vs metric n={g.n}")
        if r is None:
            r = scalar_curvature(ricci, g)
        q = ricci_operator(ricci, g)
        if nabla_ricci is not None:
            nabla_ricci = np.asarray(nabla_ricci, dtype=float)
        if dr is not None:
            dr = np.asarray(dr, dtype=float)
        if point is not None:
            point = tuple(float(v) for v in point)
        return cls(g=g, riemann=riemann, ricci=ricci, ricci_op=q, r=float(r),
                   point=point, nabla_ricci=nabla_ricci, dr=dr)


# --------------------------------------------------------------------------

def _normalize_entries(coords: Sequence[str],
                       entries: Mapping) -> list[list[ex.Node]]:
    """Build the full symmetric grid of AST nodes from upper-triangle input."""
    n = len(coords)
    index = {name: i for i, name in enumerate(coords)}
    grid: list[list[ex.Node | None]] = [[None] * n for _ in range(n)]
    for key, value in entries.items():
        i, j = key
        if isinstance(i, str):
            if i not in index or j not in index:
                raise DimensionMismatch(f"metric entry {key!r} names unknown coordinates")
            i, j = index[i], index[j]
        if not (0 <= i < n and 0 <= j < n):
            raise DimensionMismatch(f"metric entry index {key!r} out of range")
        if isinstance(value, ex.Expression):
            node = value.root
        elif isinstance(value, (int, float)):
            node = ex.num(value)
        else:
            node = ex.parse(str(value), coords).root
        i, j = min(i, j), max(i, j)
        grid[i][j] = node
    zero = ex.num(0.0)
    for i in range(n):
        for j in range(i, n):
            if grid[i][j] is None:
                grid[i][j] = zero
            grid[j][i] = grid[i][j]  # shared node: exact symmetry
    return grid  # type: ignore[return-value]


def _sym_det(m: list[list[ex.Node]]) -> ex.Node:
    """Symbolic determinant by Laplace expansion along the first row."""
    size = len(m)
    if size == 1:
        return m[0][0]
    total: ex.Node | None = None
    for j in range(size):
        entry = m[0][j]
        if isinstance(entry, ex.Num) and entry.value == 0.0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = ex.mul(entry, _sym_det(minor))
        if j % 2 == 1:
            term = ex.neg(term)
        total = term if total is None else ex.add(total, term)
    return total if total is not None else ex.num(0.0)


class MetricField:
    """Symbolic metric over named chart coordinates.

    `entries` maps upper-triangle index pairs -- ``(i, j)`` with integers or
    coordinate-name pairs -- to expression strings, numbers, or parsed
    :class:`~curvkit.expr.Expression` objects.  Missing entries are zero.
    """

    def __init__(self, coords: Sequence[str], entries: Mapping):
        self.coords = tuple(coords)
        if len(self.coords) < 2:
            raise DimensionMismatch("a chart needs at least 2 coordinates")
        self.n = len(self.coords)
        self._g = _normalize_entries(self.coords, entries)

    # -- symbolic layers (built lazily, then immutable) ---------------------

    @cached_property
    def _dg(self):
        """dg[m][i][j] = d g_ij / d x_m.  One differentiation memo per
        coordinate keeps shared subtrees shared in the derivatives too."""
        out = []
        for c in self.coords:
            memo: dict = {}
            out.append([[ex.diff_node(self._g[i][j], c, memo)
                         for j in range(self.n)] for i in range(self.n)])
        return out

    @cached_property
    def _ginv(self):
        """Inverse metric via adjugate / determinant (exact symbolic)."""
        n = self.n
        det = _sym_det(self._g)
        inv: list[list[ex.Node | None]] = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                # adjugate entry: (-1)^(i+j) * minor with row j, column i removed;
                # the metric is symmetric so minor(j,i) and minor(i,j) agree
                minor = [[self._g[a][b] for b in range(n) if b != i]
                         for a in range(n) if a != j]
                cof = _sym_det(minor)
                if (i + j) % 2 == 1:
                    cof = ex.neg(cof)
                entry = ex.div(cof, det)
                inv[i][j] = entry
                inv[j][i] = entry
        return inv

    @cached_property
    def _gamma(self):
        """gamma[k][i][j] = Christoffel symbol with upper k, lower (i, j);
        built for i <= j and mirrored, so the pair symmetry is exact."""
        n = self.n
        half = ex.num(0.5)
        gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    total: ex.Node | None = None
                    for l in range(n):
                        term = ex.sub(ex.add(self._dg[i][j][l], self._dg[j][i][l]),
                                      self._dg[l][i][j])
                        term = ex.mul(self._ginv[k][l], term)
                        total = term if total is None else ex.add(total, term)
                    node = ex.mul(half, total)
                    gamma[k][i][j] = node
                    gamma[k][j][i] = node
        return gamma

    @cached_property
    def _dgamma(self):
        """dgamma[m][k][i][j] = d gamma[k][i][j] / d x_m (shared for i <= j)."""
        n = self.n
        out = [[[[None] * n for _ in range(n)] for _ in range(n)]
               for _ in range(n)]
        for m, c in enumerate(self.coords):
            memo: dict = {}
            for k in range(n):
                for i in range(n):
                    for j in range(i, n):
                        node = ex.diff_node(self._gamma[k][i][j], c, memo)
                        out[m][k][i][j] = node
                        out[m][k][j][i] = node
        return out

    @cached_property
    def _ricci(self):
        """ricci[j][k] = sum_i ( d_i gamma^i_jk - d_j gamma^i_ik
                                 + gamma^i_im gamma^m_jk - gamma^i_jm gamma^m_ik )."""
        n = self.n
        s = [[None] * n for _ in range(n)]
        for j in range(n):
            for k in range(j, n):
                total: ex.Node | None = None
                for i in range(n):
                    term = ex.sub(self._dgamma[i][i][j][k], self._dgamma[j][i][i][k])
                    for m in range(n):
                        term = ex.add(term, ex.sub(
                            ex.mul(self._gamma[i][i][m], self._gamma[m][j][k]),
                            ex.mul(self._gamma[i][j][m], self._gamma[m][i][k])))
                    total = term if total is None else ex.add(total, term)
                s[j][k] = total
                s[k][j] = total
        return s

    @cached_property
    def _r(self):
        n = self.n
        total: ex.Node | None = None
        for j in range(n):
            for k in range(n):
                term = ex.mul(self._ginv[j][k], self._ricci[j][k])
                total = term if total is None else ex.add(total, term)
        return total

    @cached_property
    def _dr(self):
        return [ex.diff_node(self._r, c, self._diff_memos[m])
                for m, c in enumerate(self.coords)]

    @cached_property
    def _dricci(self):
        n = self.n
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for m, c in enumerate(self.coords):
            memo = self._diff_memos[m]
            for j in range(n):
                for k in range(j, n):
                    node = ex.diff_node(self._ricci[j][k], c, memo)
                    out[m][j][k] = node
                    out[m][k][j] = node
        return out

    @cached_property
    def _diff_memos(self):
        """Per-coordinate differentiation memos shared by the Ricci-level and
        curvature-level derivative layers (their inputs overlap heavily)."""
        return [dict() for _ in self.coords]

    @cached_property
    def _rbar(self):
        """rbar[i][j][k][l] = R(0,4) entries; antisymmetry in (i,j) is exact
        by construction (diagonal zero, mirror negated)."""
        n = self.n
        zero = ex.num(0.0)
        rb = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    for l in range(n):
                        total: ex.Node | None = None
                        for m in range(n):
                            # component of R(e_i, e_j) e_k along e_m, lowered with g
                            up = ex.sub(self._dgamma[i][m][j][k],
                                        self._dgamma[j][m][i][k])
                            for p in range(n):
                                up = ex.add(up, ex.sub(
                                    ex.mul(self._gamma[m][i][p], self._gamma[p][j][k]),
                                    ex.mul(self._gamma[m][j][p], self._gamma[p][i][k])))
                            term = ex.mul(self._g[l][m], up)
                            total = term if total is None else ex.add(total, term)
                        rb[i][j][k][l] = total
                        rb[j][i][k][l] = ex.neg(total)
        return rb

    @cached_property
    def _drbar(self):
        n = self.n
        out = []
        for m, c in enumerate(self.coords):
            memo = self._diff_memos[m]
            out.append([[[[ex.diff_node(self._rbar[i][j][k][l], c, memo)
                           for l in range(n)] for k in range(n)]
                         for j in range(n)] for i in range(n)])
        return out

    # -- evaluation ----------------------------------------------------------

    def _env(self, point: Sequence[float]) -> dict[str, float]:
        if len(point) != self.n:
            raise DimensionMismatch(
                f"point has {len(point)} components, expected {self.n}")
        return dict(zip(self.coords, (float(v) for v in point)))

    def _eval(self, nodes, env, memo) -> np.ndarray:
        # one memo per point query: expressions here share subtrees heavily
        if isinstance(nodes, list):
            return np.array([self._eval(sub, env, memo) for sub in nodes])
        return ex.eval_node(nodes, env, memo)

    def metric_at(self, point: Sequence[float]) -> Metric:
        """Evaluate the metric; raises SingularMetric where the chart degenerates."""
        return Metric(self._eval(self._g, self._env(point), {}))

    def christoffel(self, point: Sequence[float]) -> np.ndarray:
        """Christoffel symbols gamma[k,i,j] at the point (exactly symmetric in i,j)."""
        env = self._env(point)
        memo: dict = {}
        Metric(self._eval(self._g, env, memo))  # validity check
        return self._eval(self._gamma, env, memo)

    def scalar_curvature_expression(self) -> ex.Expression:
        """The scalar curvature as a symbolic Expression of the coordinates."""
        return ex.Expression(self._r, self.coords)

    def curvature_bundle(self, point: Sequence[float]) -> CurvatureBundle:
        """Evaluate the full curvature package at a point."""
        env = self._env(point)
        memo: dict = {}
        g = Metric(self._eval(self._g, env, memo))
        gamma = self._eval(self._gamma, env, memo)
        dgamma = self._eval(self._dgamma, env, memo)
        # R(0,4) assembled from the evaluated symbolic pieces
        up = (np.einsum("iljk->lijk", dgamma) - np.einsum("jlik->lijk", dgamma)
              + np.einsum("lim,mjk->lijk", gamma, gamma)
              - np.einsum("ljm,mik->lijk", gamma, gamma))
        riemann = Tensor04(np.einsum("lm,mijk->ijkl", g.mat, up), riemann_like=True)
        ricci = self._eval(self._ricci, env, memo)
        r = float(ex.eval_node(self._r, env, memo))
        dricci = self._eval(self._dricci, env, memo)
        nabla_ricci = (dricci
                       - np.einsum("lij,lk->ijk", gamma, ricci)
                       - np.einsum("lik,jl->ijk", gamma, ricci))
        dr = self._eval(self._dr, env, memo)
        bundle = CurvatureBundle(
            g=g, riemann=riemann, ricci=ricci, ricci_op=ricci_operator(ricci, g),
            r=r, point=tuple(float(v) for v in point),
            nabla_ricci=nabla_ricci, dr=dr)
        _check_bundle(bundle)
        return bundle

    def nabla_riemann(self, point: Sequence[float]) -> np.ndarray:
        """Covariant derivative of the (0,4) curvature: out[m,i,j,k,l] =
        (nabla_m R)(e_i,e_j,e_k,e_l)."""
        env = self._env(point)
        memo: dict = {}
        Metric(self._eval(self._g, env, memo))  # validity check
        gamma = self._eval(self._gamma, env, memo)
        rb = self._eval(self._rbar, env, memo)
        drb = self._eval(self._drbar, env, memo)
        return (drb
                - np.einsum("pmi,pjkl->mijkl", gamma, rb)
                - np.einsum("pmj,ipkl->mijkl", gamma, rb)
                - np.einsum("pmk,ijpl->mijkl", gamma, rb)
                - np.einsum("pml,ijkp->mijkl", gamma, rb))


def _check_bundle(bundle: CurvatureBundle) -> None:
    """Internal consistency of a chart-produced bundle."""
    ns = bundle.nabla_ricci
    sym = max_abs(ns - np.swapaxes(ns, 1, 2))
    if sym > 1e-9 * (1.0 + max_abs(ns)):
        raise DimensionMismatch(
            f"nabla_ricci lost its (j,k) symmetry: residual {sym:g}")
    trace_gap = abs(bundle.r - scalar_curvature(bundle.ricci, bundle.g))
    if trace_gap > 1e-12 * (1.0 + abs(bundle.r)):
        raise DimensionMismatch(
            f"scalar curvature disagrees with the Ricci trace by {trace_gap:g}")


# Module-level conveniences mirroring the method API.

def christoffel(field: MetricField, point: Sequence[float]) -> np.ndarray:
    return field.christoffel(point)


def curvature_bundle(field: MetricField, point: Sequence[float]) -> CurvatureBundle:
    return field.curvature_bundle(point)


def nabla_riemann(field: MetricField, point: Sequence[float]) -> np.ndarray:
    return field.nabla_riemann(point)
