"""Gauss-Newton refinement and the deflate-until-regular driver."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .deflate import (
    AugmentedSystem,
    deflate_first_order,
    deflate_higher_order,
    predict_order,
)
from .errors import (
    AlreadyRegularError,
    InconclusivePredictionError,
    NotARootError,
    OrderTooLowError,
)
from .linalg import DEFAULT_RANK_TOL, RankReport, least_squares, numerical_rank
from .poly import PolySystem, _as_vector


@dataclass(frozen=True)
class NewtonOptions:
    """Settings for the least-squares Newton iteration.

    ``tol_residual`` is a reporting threshold only: iteration stops on the
    step-size criterion (or ``max_iters``), never on the residual, because
    near a multiple root the residual of a degree-k equation is the k-th
    power of the distance to the root and passes any absolute threshold
    while the point is still far away.
    """

    tol_residual: float = 1e-12
    tol_step: float = 1e-14
    max_iters: int = 60
    tol_rank: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        for name in ("tol_residual", "tol_step", "tol_rank"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class NewtonTrace:
    iterates: tuple[np.ndarray, ...]
    residual_norms: tuple[float, ...]
    step_norms: tuple[float, ...]
    converged: bool

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def gauss_newton(
    F: PolySystem, x0: Sequence[complex], opts: NewtonOptions = NewtonOptions()
) -> NewtonTrace:
    """Least-squares Newton iteration x += argmin ||J dx + F(x)||.

    Convergence is judged by the step size only. Near a multiple root the
    residual of a degree-k equation scales like the k-th power of the
    distance to the root, so any residual threshold is met long before the
    point itself is accurate; the step size has no such blind spot.
    """
    x = _as_vector(x0, F.nvars).copy()
    iterates = [x.copy()]
    residuals = [float(np.linalg.norm(F.evaluate(x)))]
    steps = [0.0]
    converged = False
    for _ in range(opts.max_iters):
        r = F.evaluate(x)
        J = F.jacobian_at(x)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(J))):
            raise ValueError("non-finite evaluation during Newton iteration")
        r_norm = float(np.linalg.norm(r))
        if r_norm == 0.0:
            converged = True
            break
        dx, _ = least_squares(J, -r)
        threshold = opts.tol_step * max(1.0, float(np.linalg.norm(x)))
        if float(np.linalg.norm(dx)) <= threshold:
            # a vanishing correction is convergence regardless of whether it
            # nudges the residual
            x = x + dx
            iterates.append(x.copy())
            residuals.append(float(np.linalg.norm(F.evaluate(x))))
            steps.append(float(np.linalg.norm(dx)))
            converged = True
            break
        # Accept only steps that reduce the residual, backtracking by
        # halving. At a singular root the least-squares solve amplifies
        # roundoff in a ~1e-16 residual through near-zero singular values
        # into an O(1e-3) step; without this guard the iterate walks away
        # from a root it has already found.
        scale = 1.0
        accepted = None
        while scale >= 2.0 ** -16:
            trial = x + scale * dx
            if float(np.linalg.norm(F.evaluate(trial))) < r_norm:
                accepted = trial
                break
            scale *= 0.5
        if accepted is None:
            break
        x = accepted
        iterates.append(x.copy())
        residuals.append(float(np.linalg.norm(F.evaluate(x))))
        steps.append(float(np.linalg.norm(scale * dx)))
        if steps[-1] <= opts.tol_step * max(1.0, float(np.linalg.norm(x))):
            converged = True
            break
    return NewtonTrace(tuple(iterates), tuple(residuals), tuple(steps), converged)


def is_regular(
    F: PolySystem, x: Sequence[complex], tol_rank: float = DEFAULT_RANK_TOL
) -> tuple[bool, RankReport]:
    """Whether the Jacobian at x has full column rank."""
    report = numerical_rank(F.jacobian_at(x), tol_rank, scale=F.jacobian_scale())
    return report.corank == 0, report


@dataclass(frozen=True)
class DriverConfig:
    order_policy: str | int = "auto"  # "auto", "first", or a fixed integer order
    tol_rank: float = DEFAULT_RANK_TOL
    tol_coeff: float = 1e-4
    tol_root: float = 1e-4
    max_stages: int = 10
    seed: int = 0
    newton: NewtonOptions = field(default_factory=NewtonOptions)

    def __post_init__(self):
        if isinstance(self.order_policy, int):
            if self.order_policy < 1:
                raise ValueError("fixed deflation order must be >= 1")
        elif self.order_policy not in ("auto", "first"):
            raise ValueError(f"unknown order policy {self.order_policy!r}")


@dataclass(frozen=True)
class DriverResult:
    refined_point: np.ndarray  # original variables only
    extended_point: np.ndarray  # including multipliers of the final stage
    stages: tuple[AugmentedSystem, ...]
    per_stage_rank: tuple[RankReport, ...]
    traces: tuple[NewtonTrace, ...]
    final_system: PolySystem
    final_regular: bool
    multiplicity_before: int | None = None

    @property
    def stage_count(self) -> int:
        return len(self.stages)


def deflation_driver(
    F: PolySystem,
    x0: Sequence[complex],
    config: DriverConfig = DriverConfig(),
    multiplicity: int | None = None,
) -> DriverResult:
    """Deflate until the root is regular, refining with Gauss-Newton throughout.

    Each stage refines the current point, checks regularity, and if singular
    appends one deflation (order chosen by the configured policy) and extends
    the point with the least-squares multiplier estimate. When a stage fails
    to reduce the corank the order is escalated by one instead of aborting.
    """
    x = _as_vector(x0, F.nvars)
    if F.residual(x) > config.tol_root:
        raise NotARootError(
            f"relative residual {F.residual(x):.3e} exceeds {config.tol_root:.1e}"
        )
    rng = np.random.default_rng(config.seed)
    cap = config.max_stages
    if multiplicity is not None:
        cap = min(cap, max(multiplicity - 1, 1))

    current: PolySystem = F
    point = x.copy()
    stages: list[AugmentedSystem] = []
    ranks: list[RankReport] = []
    traces: list[NewtonTrace] = []
    prev_corank: int | None = None
    escalate = 0
    failed_attempts = 0
    final_regular = False

    while True:
        trace = gauss_newton(current, point, config.newton)
        traces.append(trace)
        point = trace.final
        # A rank decision at a point known only to accuracy e cannot trust
        # singular values below ~e times the Jacobian scale (roots away from
        # the origin stall at the cancellation-noise floor ~sqrt(eps)), so
        # widen the tolerance by the size of the last Newton step; a stalled
        # iteration (no step satisfied the step criterion) is assumed to be
        # no better than the double-precision floor ~1e-8 regardless of how
        # small its last accepted step was.
        stall_floor = 0.0 if trace.converged else 1e-8
        tol_eff = min(
            max(config.tol_rank, 10.0 * max(trace.step_norms[-1], stall_floor)),
            1e-2,
        )
        regular, report = is_regular(current, point, tol_eff)
        ranks.append(report)
        if regular:
            final_regular = True
            break
        if len(stages) >= cap:
            break
        # Corank counts are only comparable within the growing tower loosely:
        # a strict increase signals a failed stage and escalates the order.
        if (
            prev_corank is not None
            and report.corank > prev_corank
            and config.order_policy != "first"
        ):
            escalate += 1
        prev_corank = report.corank

        d = _choose_order(current, point, config, rng, tol_eff)
        if config.order_policy != "first":
            d += escalate
        stage_no = len(stages) + 1
        try:
            if d <= 1:
                aug = deflate_first_order(
                    current, point, tol_eff, rng, stage=stage_no
                )
            else:
                aug = deflate_higher_order(
                    current, d, point, tol_eff, rng, stage=stage_no
                )
        except OrderTooLowError:
            escalate += 1
            failed_attempts += 1
            if failed_attempts > 3:
                break
            continue
        stages.append(aug)
        point = aug.extend_point(point)
        current = aug.system

    original = point[: F.nvars]
    return DriverResult(
        refined_point=original,
        extended_point=point,
        stages=tuple(stages),
        per_stage_rank=tuple(ranks),
        traces=tuple(traces),
        final_system=current,
        final_regular=final_regular,
        multiplicity_before=multiplicity,
    )


def _choose_order(
    system: PolySystem, point: np.ndarray, config: DriverConfig, rng, tol_rank: float
) -> int:
    if config.order_policy == "first":
        return 1
    if isinstance(config.order_policy, int):
        return config.order_policy
    try:
        return predict_order(
            system, point, tol_rank, config.tol_coeff, rng
        ).d
    except (InconclusivePredictionError, AlreadyRegularError):
        warnings.warn(
            "order prediction inconclusive; falling back to first-order deflation",
            RuntimeWarning,
        )
        return 1
