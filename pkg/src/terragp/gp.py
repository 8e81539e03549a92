"""Terrain-class-masked Gaussian Process over per-cell energy cost.

The covariance between two cells is zero unless they share a terrain
class; within a class it is a squared exponential in the distance between
cell centers with that class's signal std and length scale. Class priors
are handled by subtracting each measurement's class prior mean before the
solve and adding the query cell's class prior back to the prediction, so
the regression itself runs on a zero-mean process.

Because cross-class covariance is exactly zero, the joint Gram matrix is a
(permuted) block-diagonal matrix with one block per terrain class. Both
solve routes are provided: :meth:`GpEnergyModel.posterior` factors the
joint matrix, :meth:`GpEnergyModel.posterior_by_class_blocks` solves one
independent GP per class. They agree to solver roundoff and are tested
against each other.

Solves use Cholesky factorizations with a jitter ladder: the first attempt
is unjittered, then jitter * sigma_f^2 scaled by 10x per retry, three
escalations, after which :class:`~terragp.errors.GpSolveError` is raised
rather than silently patching the matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import GpSolveError
from .terrain import CellId, TerrainClassParams, TerrainGrid

JITTER_ESCALATIONS = 3


@dataclass(frozen=True)
class Measurement:
    """One unit-distance energy sample at a cell center."""

    cell: CellId
    position: tuple[float, float]
    energy: float
    class_id: int

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise ValueError(f"measurement at cell {self.cell.index} has non-finite energy")


@dataclass
class Posterior:
    """Per-cell posterior mean and variance for the queried cells."""

    mean: np.ndarray
    variance: np.ndarray
    queried_cells: list[CellId]
    jitter_used: float = 0.0


def _se_cross(params: TerrainClassParams, a_pos: np.ndarray, b_pos: np.ndarray) -> np.ndarray:
    """Squared-exponential covariance block between two position sets."""
    diff = a_pos[:, None, :] - b_pos[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return params.signal_std**2 * np.exp(-0.5 * d2 / params.length_scale**2)


class GpEnergyModel:
    """Measurement set plus kernel config; answers posterior queries over cells."""

    def __init__(
        self,
        class_table: Sequence[TerrainClassParams],
        noise_std: float = 0.0,
        jitter: float = 1e-10,
    ):
        if noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if jitter <= 0:
            raise ValueError("jitter must be > 0")
        self.class_table = list(class_table)
        self._params = {p.class_id: p for p in self.class_table}
        self.noise_std = float(noise_std)
        self.jitter = float(jitter)
        self.measurements: list[Measurement] = []
        self._by_cell: dict[int, int] = {}  # cell index -> position in measurements

    # -- kernel ----------------------------------------------------------

    def params_for(self, class_id: int) -> TerrainClassParams:
        try:
            return self._params[class_id]
        except KeyError:
            raise ValueError(f"unknown terrain class id {class_id}") from None

    def kernel(
        self,
        a_pos: tuple[float, float],
        a_class: int,
        b_pos: tuple[float, float],
        b_class: int,
    ) -> float:
        """Class-masked squared-exponential covariance between two points."""
        pa = self.params_for(a_class)
        pb = self.params_for(b_class)
        if a_class != b_class:
            return 0.0
        d2 = (a_pos[0] - b_pos[0]) ** 2 + (a_pos[1] - b_pos[1]) ** 2
        return pa.signal_std**2 * math.exp(-0.5 * d2 / pa.length_scale**2)

    # -- measurements -----------------------------------------------------

    def add_measurements(self, batch: Iterable[Measurement]) -> None:
        """Append a measurement batch.

        With noise_std == 0 a repeated cell replaces its older value in
        place (duplicate noiseless rows would make the Gram matrix
        singular); with noise present duplicates are kept.
        """
        batch = list(batch)
        if not batch:
            raise ValueError("measurement batch must be non-empty")
        for m in batch:
            self.params_for(m.class_id)
            if self.noise_std == 0.0 and m.cell.index in self._by_cell:
                self.measurements[self._by_cell[m.cell.index]] = m
            else:
                self._by_cell[m.cell.index] = len(self.measurements)
                self.measurements.append(m)

    def measured_classes(self) -> set[int]:
        return {m.class_id for m in self.measurements}

    # -- posterior ----------------------------------------------------------

    def posterior(self, query_cells: Sequence[CellId], grid: TerrainGrid) -> Posterior:
        """Posterior via one joint dense solve over all measurements."""
        qidx = self._check_queries(query_cells, grid)
        mean, var, jit = self._posterior_joint(qidx, grid)
        return Posterior(mean, var, list(query_cells), jit)

    def posterior_by_class_blocks(self, query_cells: Sequence[CellId], grid: TerrainGrid) -> Posterior:
        """Posterior via one independent solve per terrain class.

        Identical contract to :meth:`posterior`; exploits the zero
        cross-class covariance to factor small per-class blocks.
        """
        qidx = self._check_queries(query_cells, grid)
        mean, var, jit = self._posterior_blocks(qidx, grid)
        return Posterior(mean, var, list(query_cells), jit)

    # -- internals -----------------------------------------------------------

    def _check_queries(self, query_cells: Sequence[CellId], grid: TerrainGrid) -> np.ndarray:
        qidx = np.asarray([c.index for c in query_cells], dtype=np.int64)
        if qidx.size and (qidx.min() < 0 or qidx.max() >= grid.n_cells):
            raise ValueError("query cell out of bounds")
        self._check_measurements(grid)
        return qidx

    def _check_measurements(self, grid: TerrainGrid) -> None:
        for m in self.measurements:
            if grid.class_of[m.cell.index] != m.class_id:
                raise ValueError(
                    f"measurement at cell {m.cell.index} has class {m.class_id} "
                    f"but grid says {int(grid.class_of[m.cell.index])}"
                )

    def _measurement_arrays(self):
        pos = np.asarray([m.position for m in self.measurements], dtype=np.float64).reshape(-1, 2)
        cls = np.asarray([m.class_id for m in self.measurements], dtype=np.int64)
        e = np.asarray([m.energy for m in self.measurements], dtype=np.float64)
        return pos, cls, e

    def _prior_for(self, class_ids: np.ndarray) -> np.ndarray:
        lut = np.zeros(max(self._params) + 1, dtype=np.float64)
        for cid, p in self._params.items():
            lut[cid] = p.prior_mean
        return lut[class_ids]

    def _sigma_f2_for(self, class_ids: np.ndarray) -> np.ndarray:
        lut = np.zeros(max(self._params) + 1, dtype=np.float64)
        for cid, p in self._params.items():
            lut[cid] = p.signal_std**2
        return lut[class_ids]

    def _factor_with_jitter(self, gram: np.ndarray, scale: float):
        """Cholesky with jitter escalation; returns (factor, jitter used)."""
        ladder = [0.0] + [self.jitter * scale * 10.0**k for k in range(JITTER_ESCALATIONS + 1)]
        for jit in ladder:
            k = gram if jit == 0.0 else gram + jit * np.eye(gram.shape[0])
            try:
                return cho_factor(k, lower=True), jit
            except LinAlgError:
                continue
        raise GpSolveError(
            f"Gram matrix of {gram.shape[0]} measurements is numerically singular "
            f"even with jitter {ladder[-1]:.3e}"
        )

    def _posterior_joint(self, qidx: np.ndarray, grid: TerrainGrid):
        nq = qidx.size
        q_cls = grid.class_of[qidx].astype(np.int64)
        prior_q = self._prior_for(q_cls)
        var_prior = self._sigma_f2_for(q_cls)
        if not self.measurements or nq == 0:
            return prior_q, var_prior, 0.0

        m_pos, m_cls, e = self._measurement_arrays()
        nm = m_pos.shape[0]
        q_pos = grid.centers(qidx)

        gram = np.zeros((nm, nm), dtype=np.float64)
        k_star = np.zeros((nq, nm), dtype=np.float64)
        for cid in sorted(set(m_cls.tolist())):
            p = self._params[cid]
            mi = np.nonzero(m_cls == cid)[0]
            block = _se_cross(p, m_pos[mi], m_pos[mi])
            gram[np.ix_(mi, mi)] = block
            qi = np.nonzero(q_cls == cid)[0]
            if qi.size:
                k_star[np.ix_(qi, mi)] = _se_cross(p, q_pos[qi], m_pos[mi])
        gram[np.diag_indices(nm)] += self.noise_std**2

        scale = max(self._params[cid].signal_std ** 2 for cid in set(m_cls.tolist()))
        factor, jit = self._factor_with_jitter(gram, scale)
        alpha = cho_solve(factor, e - self._prior_for(m_cls))
        mean = prior_q + k_star @ alpha
        v = cho_solve(factor, k_star.T)
        var = var_prior - np.einsum("ij,ji->i", k_star, v)
        np.maximum(var, 0.0, out=var)
        return mean, var, jit

    def _posterior_blocks(self, qidx: np.ndarray, grid: TerrainGrid):
        q_cls = grid.class_of[qidx].astype(np.int64)
        mean = self._prior_for(q_cls)
        var = self._sigma_f2_for(q_cls)
        if not self.measurements or qidx.size == 0:
            return mean, var, 0.0

        m_pos, m_cls, e = self._measurement_arrays()
        q_pos = grid.centers(qidx)
        jit_used = 0.0
        for cid in sorted(set(m_cls.tolist())):
            qi = np.nonzero(q_cls == cid)[0]
            if qi.size == 0:
                continue
            p = self._params[cid]
            mi = np.nonzero(m_cls == cid)[0]
            gram = _se_cross(p, m_pos[mi], m_pos[mi])
            gram[np.diag_indices(mi.size)] += self.noise_std**2
            factor, jit = self._factor_with_jitter(gram, p.signal_std**2)
            jit_used = max(jit_used, jit)
            k_star = _se_cross(p, q_pos[qi], m_pos[mi])
            alpha = cho_solve(factor, e[mi] - p.prior_mean)
            mean[qi] = p.prior_mean + k_star @ alpha
            v = cho_solve(factor, k_star.T)
            block_var = p.signal_std**2 - np.einsum("ij,ji->i", k_star, v)
            var[qi] = np.maximum(block_var, 0.0)
        return mean, var, jit_used
