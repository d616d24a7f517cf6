"""Multi-resolution rigid registration driven by the patch-local MI loss."""

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from fibrostage.core.errors import GeometryError, HistogramError, RegistrationError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.constants import REFERENCE_MODALITY
from fibrostage.modules.imgcore.schemas import Geometry, Mask, Study, Volume
from fibrostage.modules.mi.ncc import PatchwiseNCC
from fibrostage.modules.mi.schemas import BinningMode, HistogramConfig
from fibrostage.modules.mi.service import PatchwiseMI, resolve_intensity_ranges
from fibrostage.modules.reg.constants import (
    ERROR_MESSAGES,
    FD_ROTATION_STEP,
    FD_TRANSLATION_FRACTION,
    FILL_VALUE,
)
from fibrostage.modules.reg.resample import (
    downsample_mask,
    downsample_volume,
    forward_differences,
    linear_derivatives,
    moving_coordinates,
    resample_linear,
    resample_nearest,
    world_grid,
)
from fibrostage.modules.reg.schemas import (
    LevelTrace,
    RegistrationConfig,
    RegistrationResult,
    RegistrationStatus,
    RigidTransform,
)

logger = get_logger("modules.reg.service")

Objective = Callable[[RigidTransform], float]


class LevelObjective:
    """Loss of one pyramid level as a function of the transform, with its 6-parameter gradient.

    Soft-binned MI is differentiated analytically: the per-voxel MI gradient is chained with
    the slope of the trilinear interpolant and the derivative of the sample points with
    respect to the parameters. NCC and hard binning fall back to central differences.
    """

    def __init__(
        self,
        fixed: Volume,
        moving: Volume,
        mask: Mask | None,
        cfg: RegistrationConfig,
        hist: HistogramConfig,
        factor: int,
    ) -> None:
        fixed_l = downsample_volume(fixed, factor)
        self.moving = downsample_volume(moving, factor)
        self.target = fixed_l.geometry
        self.factor = factor
        self.spacing = float(np.mean(self.target.spacing))
        self.metric = self._build_metric(fixed_l, mask, cfg, hist, factor)

        self._data = self.moving.data.astype(np.float64)
        self._analytic = isinstance(self.metric, PatchwiseMI) and self.metric.mode is BinningMode.SOFT
        self._differences = forward_differences(self._data) if self._analytic else None
        self._world = world_grid(self.target) if self._analytic else None
        self._fd_steps = np.array([FD_ROTATION_STEP] * 3 + [FD_TRANSLATION_FRACTION * self.spacing] * 3)

    @staticmethod
    def _build_metric(
        fixed_l: Volume,
        mask: Mask | None,
        cfg: RegistrationConfig,
        hist: HistogramConfig,
        factor: int,
    ) -> PatchwiseMI | PatchwiseNCC:
        mask_l = downsample_mask(mask, factor) if mask is not None else None
        grid = cfg.grid.fitted(fixed_l.dims)

        def build(restriction: Mask | None) -> PatchwiseMI | PatchwiseNCC:
            g = grid.with_mask(restriction)
            if cfg.metric == "ncc":
                return PatchwiseNCC(fixed_l.data, g)
            return PatchwiseMI(fixed_l.data, g, hist, cfg.binning)

        try:
            return build(mask_l)
        except HistogramError as e:
            if mask_l is None or factor == 1:
                msg = ERROR_MESSAGES["NO_PATCHES"].format(factor=factor, error=e)
                raise RegistrationError(msg) from e
            logger.warning("Mask too coarse at level %dx, using unrestricted patches", factor)
            return build(None)

    def _sample(self, coords: np.ndarray) -> np.ndarray:
        return ndimage.map_coordinates(
            self._data, coords, output=np.float64, order=1, mode="constant", cval=FILL_VALUE
        )

    def __call__(self, t: RigidTransform) -> float:
        return self.metric.loss(self._sample(moving_coordinates(self.moving.geometry, t, self.target)))

    def gradient(self, t: RigidTransform) -> np.ndarray:
        """d loss / d (rx, ry, rz, tx, ty, tz)."""
        if not self._analytic:
            return _fd_gradient(self, t, self._fd_steps)
        assert self._differences is not None
        assert self._world is not None
        assert isinstance(self.metric, PatchwiseMI)

        coords = moving_coordinates(self.moving.geometry, t, self.target)
        d_loss = self.metric.gradient(self._sample(coords))
        slopes = linear_derivatives(self._differences, coords)
        spacing = np.asarray(self.moving.geometry.spacing, dtype=np.float64)[:, None, None, None]
        # loss change per mm of displacement of each sample point in moving space
        d_point = slopes * d_loss[None] / spacing

        grad = np.zeros(6, dtype=np.float64)
        grad[3:] = d_point.sum(axis=(1, 2, 3))
        rel = self._world - np.asarray(t.center)[:, None, None, None]
        moments = d_point.reshape(3, -1) @ rel.reshape(3, -1).T
        for j, d_matrix in enumerate(_rotation_jacobian(t)):
            grad[j] = float(np.sum(d_matrix * moments))
        return grad


def _rotation_jacobian(t: RigidTransform) -> np.ndarray:
    """Central-difference derivatives of the rotation matrix w.r.t. the three angles, (3, 3, 3)."""
    params = t.parameters()
    out = np.empty((3, 3, 3), dtype=np.float64)
    for j in range(3):
        delta = np.zeros(6)
        delta[j] = FD_ROTATION_STEP
        plus = t.with_parameters(params + delta).matrix()
        minus = t.with_parameters(params - delta).matrix()
        out[j] = (plus - minus) / (2.0 * FD_ROTATION_STEP)
    return out


def _fd_gradient(objective: Objective, t: RigidTransform, steps: np.ndarray) -> np.ndarray:
    params = t.parameters()
    grad = np.zeros(6, dtype=np.float64)
    for k in range(6):
        delta = np.zeros(6)
        delta[k] = steps[k]
        plus = objective(t.with_parameters(params + delta))
        minus = objective(t.with_parameters(params - delta))
        grad[k] = (plus - minus) / (2.0 * steps[k])
    return grad


def _optimize_level(
    objective: LevelObjective,
    start: RigidTransform,
    cfg: RegistrationConfig,
    max_iterations: int,
    radius: float,
) -> tuple[RigidTransform, LevelTrace]:
    """Normalized gradient descent with backtracking in (radius * angle, mm) coordinates.

    The step halves (``step_shrink``) until the loss decreases and is relaxed back by the same
    factor after every accepted move, capped at ``step_init`` voxels. The level converges when
    no step above ``min_step`` decreases the loss or the relative decrease drops below
    ``converge_tol``.
    """
    factor = objective.factor
    scale = np.array([radius, radius, radius, 1.0, 1.0, 1.0])
    max_step = cfg.step_init * objective.spacing
    min_step = cfg.min_step * objective.spacing
    step = max_step

    current = start
    loss = objective(current)
    start_loss = loss
    converged = False
    iterations = 0

    while iterations < max_iterations:
        iterations += 1
        grad_q = objective.gradient(current) / scale
        norm = float(np.linalg.norm(grad_q))
        if norm == 0.0 or not np.isfinite(norm):
            converged = True
            break
        direction = -grad_q / norm

        accepted: tuple[RigidTransform, float] | None = None
        while step >= min_step:
            trial = current.with_parameters(current.parameters() + step * direction / scale)
            trial_loss = objective(trial)
            if trial_loss < loss:
                accepted = (trial, trial_loss)
                break
            step *= cfg.step_shrink
        if accepted is None:
            converged = True
            break

        previous = loss
        current, loss = accepted
        logger.debug("level %dx iter %d loss %.8f step %.4g", factor, iterations, loss, step)
        if (previous - loss) / max(abs(previous), 1e-12) < cfg.converge_tol:
            converged = True
            break
        step = min(step / cfg.step_shrink, max_step)

    trace = LevelTrace(
        factor=factor,
        iterations=iterations,
        start_loss=start_loss,
        final_loss=loss,
        converged=converged,
    )
    return current, trace


def register_rigid(
    fixed: Volume,
    moving: Volume,
    cfg: RegistrationConfig,
    fixed_mask: Mask | None = None,
) -> RegistrationResult:
    """Find the rigid transform minimizing the patch-local loss between ``fixed`` and ``moving``.

    Args:
        fixed: Reference volume; the result maps its physical space into ``moving``'s.
        moving: Volume to align, on any grid.
        cfg: Pyramid, optimizer, metric and histogram settings.
        fixed_mask: Optional organ mask restricting the patches.

    Returns:
        RegistrationResult with the best transform, its full-resolution loss, the loss at
        identity and a status. A result worse than identity is replaced by identity and
        reported as DIVERGED.

    Raises:
        GeometryError: If ``fixed_mask`` is not on the fixed grid.
        RegistrationError: If no patch overlaps at full resolution.
    """
    if fixed_mask is not None and not fixed_mask.geometry.matches(fixed.geometry):
        raise GeometryError(ERROR_MESSAGES["MASK_GEOMETRY"])

    hist = cfg.hist
    if cfg.metric == "mi":
        hist = resolve_intensity_ranges(cfg.hist, fixed.data, moving.data, fixed_mask)

    radius = max(0.5 * float(np.linalg.norm(fixed.geometry.extent)), 1e-6)
    current = RigidTransform.identity(fixed.geometry.center)
    traces: list[LevelTrace] = []
    full_objective: LevelObjective | None = None

    for factor, max_iterations in cfg.levels:
        objective = LevelObjective(fixed, moving, fixed_mask, cfg, hist, factor)
        if factor == 1:
            full_objective = objective
        current, trace = _optimize_level(objective, current, cfg, max_iterations, radius)
        traces.append(trace)
        logger.info(
            "Level %dx: %d iterations, loss %.6f -> %.6f",
            factor,
            trace.iterations,
            trace.start_loss,
            trace.final_loss,
        )

    if full_objective is None:
        full_objective = LevelObjective(fixed, moving, fixed_mask, cfg, hist, 1)

    identity = RigidTransform.identity(fixed.geometry.center)
    identity_loss = full_objective(identity)
    final_loss = full_objective(current)
    status = (
        RegistrationStatus.CONVERGED
        if all(trace.converged for trace in traces)
        else RegistrationStatus.MAX_ITERATIONS
    )
    if final_loss > identity_loss:
        logger.warning(
            "Registration ended above the identity loss (%.6f > %.6f), keeping identity",
            final_loss,
            identity_loss,
        )
        current, final_loss, status = identity, identity_loss, RegistrationStatus.DIVERGED

    return RegistrationResult(
        transform=current,
        loss=final_loss,
        identity_loss=identity_loss,
        status=status,
        levels=traces,
    )


def propagate_mask(mask: Mask, t: RigidTransform, target: Geometry | Volume) -> Mask:
    """Carry a fixed-space mask into the moving image's space.

    ``t`` maps fixed to moving points, so the mask is sampled through its inverse.
    """
    return resample_nearest(mask, t.inverse(), target)


class AlignedStudy(BaseModel):
    """A study resampled onto its reference grid, with one registration per moving modality."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    study: Study
    results: dict[str, RegistrationResult]


def align_study(study: Study, cfg: RegistrationConfig) -> AlignedStudy:
    """Register every modality to GED4 and resample it onto the GED4 grid."""
    fixed = study.reference
    aligned: dict[str, Volume] = {}
    results: dict[str, RegistrationResult] = {}
    for name, moving in study.modalities.items():
        if name == REFERENCE_MODALITY:
            aligned[name] = fixed
            continue
        result = register_rigid(fixed, moving, cfg, study.mask)
        logger.info(
            "%s -> %s: loss %.6f (identity %.6f), %s",
            name,
            REFERENCE_MODALITY,
            result.loss,
            result.identity_loss,
            result.status.value,
        )
        results[name] = result
        aligned[name] = resample_linear(moving, result.transform, fixed.geometry)
    return AlignedStudy(study=study.model_copy(update={"modalities": aligned}), results=results)
