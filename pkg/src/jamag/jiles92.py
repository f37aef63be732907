"""Loop-feature parameter estimation (Jiles' 1992 procedure).

Given the nine measured features of a hysteresis loop, the procedure pins
the model parameters to closed-form relations at four special points of the
loop: the origin (initial susceptibilities give c and a first aJ), the
coercive point (gives k), remanence (a nonlinear equation in alpha) and the
loop tip (a nonlinear equation updating aJ).  After each pass the loop is
re-simulated; the pass repeats until the mean squared error between
simulated and measured magnetization (mu0-scaled) drops below ``fit_tol``.
On failure the estimate restarts from the next alpha seed, and the
best-so-far answer is returned flagged rather than discarded.

Conventions at the special points: the anhysteretic magnetization and its
slope are evaluated at the effective field of the loop state, i.e. at
Hc/aJ on the coercive point (M = 0), at alpha*Mr/aJ at remanence (H = 0)
and at (Hm + alpha*Mm)/aJ at the tip.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from .core import (
    MU0,
    AnhystereticParams,
    MaterialSpec,
    _slope_raw,
    langevin,
)
from .dataio import LoopFeatures, MagnetizationCurve, split_branches
from .errors import (
    DegenerateC,
    NoConvergence,
    NonPhysicalParameterWarning,
    RootFindError,
    SingularDenominator,
    SingularSlope,
    UnstableParams,
    ZeroDenominator,
)
from .rootfind import RootConfig, expand_bracket, find_root
from .simulate import FieldWaveform, HysteresisParams, integrate

_ROOT_CFG = RootConfig(abs_tol=1e-12, rel_tol=1e-10, max_iter=200)

_logger = getLogger(__name__)


@dataclass(frozen=True)
class Jiles92Config:
    """Iteration and restart policy for :func:`estimate`.

    ``fit_tol`` is the MSE threshold on mu0-scaled magnetization, in T^2.
    ``sim_steps``/``sim_cycles`` control the re-simulation used for the
    fit check (the last cycle is compared against the measured loop).
    """

    alpha_seed: float = 1.0e-4
    restart_seeds: tuple[float, ...] = (1.0e-3, 1.0e-2, 1.0e-1)
    max_outer_iter: int = 8
    fit_tol: float = 1.0e-3
    sim_steps: int = 600
    sim_cycles: int = 2

    def __post_init__(self) -> None:
        for s in (self.alpha_seed, *self.restart_seeds):
            if not s > 0.0:
                raise ValueError(f"alpha seeds must be positive, got {s}")
        if self.max_outer_iter < 1:
            raise ValueError(f"max_outer_iter must be at least 1, got {self.max_outer_iter}")
        if not self.fit_tol > 0.0:
            raise ValueError(f"fit_tol must be positive, got {self.fit_tol}")
        if self.sim_steps < 2 or self.sim_cycles < 1:
            raise ValueError("sim_steps must be >= 2 and sim_cycles >= 1")

    @property
    def seeds(self) -> tuple[float, ...]:
        return (self.alpha_seed, *self.restart_seeds)


@dataclass(frozen=True)
class Jiles92Result:
    """Estimated parameters plus the quality of the final re-simulation."""

    params: HysteresisParams
    mse: float
    fit_condition_met: bool
    seed: float
    iterations: int


def c_from_susceptibilities(chi_in: float, chi_an: float) -> float:
    """Reversibility fraction c = chi_in / chi_an (expected in (0, 1])."""
    if chi_an == 0.0:
        raise ZeroDenominator("chi_an is zero")
    c = chi_in / chi_an
    if c > 1.0 or c <= 0.0:
        warnings.warn(
            f"c = {c:.6g} outside the physical range (0, 1]",
            NonPhysicalParameterWarning,
            stacklevel=2,
        )
    return c


def aj_initial(Ms: float, chi_an: float, alpha: float) -> float:
    """First shape-parameter guess, aJ = (Ms/3) * (1/chi_an + alpha)."""
    if chi_an == 0.0:
        raise ZeroDenominator("chi_an is zero")
    return (Ms / 3.0) * (1.0 / chi_an + alpha)


def k_from_coercive(features: LoopFeatures, c: float, p: AnhystereticParams, Ms: float) -> float:
    """Pinning strength from the coercive point of the loop.

    k = M_an(Hc)/(1-c) * [alpha + 1/( chi_max/(1-c) - c*M_an'(Hc)/(1-c) )]
    with the anhysteretic curve taken at M = 0 (the loop state at Hc).
    """
    if c == 1.0:
        raise DegenerateC("c = 1: the pinning term drops out of the loop equations")
    man_c = Ms * langevin(features.Hc / p.aJ)
    slope_c = _slope_raw(features.Hc, 0.0, p.aJ, p.alpha, Ms)
    inner = features.chi_max / (1.0 - c) - c * slope_c / (1.0 - c)
    if inner == 0.0:
        raise SingularDenominator("chi_max/(1-c) - c*M_an'(Hc)/(1-c) vanished")
    return man_c / (1.0 - c) * (p.alpha + 1.0 / inner)


def alpha_update(
    features: LoopFeatures, c: float, k: float, aJ: float, Ms: float, *, guess: float
) -> float:
    """Coupling from the remanence balance, solved around ``guess``.

    Root of  Mr = M_an(Mr) + k / [ alpha/(1-c) + 1/(chi_r - c*M_an'(Mr)) ]
    where the anhysteretic curve sits at H = 0, M = Mr.
    """
    if c == 1.0:
        raise DegenerateC("c = 1: remanence equation degenerates")
    Mr = features.Mr
    chi_r = features.chi_r

    def g(alpha: float) -> float:
        man_r = Ms * langevin(alpha * Mr / aJ)
        slope_r = _slope_raw(0.0, Mr, aJ, alpha, Ms)
        inner = chi_r - c * slope_r
        if inner == 0.0:
            raise SingularDenominator("chi_r - c*M_an'(Mr) vanished")
        outer = alpha / (1.0 - c) + 1.0 / inner
        if outer == 0.0:
            raise SingularDenominator("remanence denominator vanished")
        return man_r + k / outer - Mr

    bracket = expand_bracket(g, guess, lo_limit=0.0)
    return find_root(g, _ROOT_CFG, bracket=bracket)


def aj_update(
    features: LoopFeatures, c: float, k: float, alpha: float, Ms: float, *, guess: float
) -> float:
    """Shape parameter from the loop-tip balance, solved around ``guess``.

    Root of  Mm = M_an(Hm) - (1-c)*k*chi_m / (alpha*chi_m + 1)
    with the anhysteretic curve at the tip effective field (Hm + alpha*Mm)/aJ.
    """
    denom = alpha * features.chi_m + 1.0
    if denom == 0.0:
        raise SingularDenominator("alpha*chi_m + 1 vanished")
    pinned = (1.0 - c) * k * features.chi_m / denom
    he = features.Hm + alpha * features.Mm

    def g(aJ: float) -> float:
        return Ms * langevin(he / aJ) - pinned - features.Mm

    bracket = expand_bracket(g, guess, lo_limit=1e-30)
    return find_root(g, _ROOT_CFG, bracket=bracket)


def _loop_mse(sim: MagnetizationCurve, measured: MagnetizationCurve) -> float:
    """MSE of mu0-scaled magnetization, simulated vs measured, per branch."""
    (Hd, Md), (Ha, Ma) = split_branches(measured)
    (Hds, Mds), (Has, Mas) = split_branches(sim)
    md_hat = np.interp(Hd, Hds[::-1], Mds[::-1])
    ma_hat = np.interp(Ha, Has, Mas)
    err = MU0 * np.concatenate([md_hat - Md, ma_hat - Ma])
    return float(np.mean(err * err))


def estimate(
    features: LoopFeatures,
    material: MaterialSpec,
    cfg: Jiles92Config,
    loop: MagnetizationCurve,
) -> Jiles92Result:
    """Run the full estimation loop against a measured hysteresis loop.

    ``loop`` supplies the measured data for the fit condition.  Seeds are
    tried in order; within a seed the closed-form/root-solve pass and the
    re-simulation alternate up to ``max_outer_iter`` times.  Returns as
    soon as the fit condition is met, otherwise the lowest-MSE candidate
    with ``fit_condition_met=False``.  Raises :class:`DegenerateC` when
    c = 1 and :class:`NoConvergence` when no seed produces a candidate.
    """
    Ms = material.Ms
    c = c_from_susceptibilities(features.chi_in, features.chi_an)
    if c == 1.0:
        raise DegenerateC("c = chi_in/chi_an = 1; loop equations are degenerate")

    waveform = FieldWaveform.cyclic(
        features.Hm, cycles=cfg.sim_cycles, steps_per_segment=cfg.sim_steps
    )
    best: Jiles92Result | None = None

    for seed in cfg.seeds:
        alpha = seed
        aJ = aj_initial(Ms, features.chi_an, alpha)
        try:
            for it in range(1, cfg.max_outer_iter + 1):
                p = AnhystereticParams.from_shape(aJ, alpha, material.T)
                k = k_from_coercive(features, c, p, Ms)
                if not (np.isfinite(k) and k > 0.0):
                    break
                alpha = alpha_update(features, c, k, aJ, Ms, guess=alpha)
                if not (np.isfinite(alpha) and alpha >= 0.0):
                    break
                aJ = aj_update(features, c, k, alpha, Ms, guess=aJ)
                if not (np.isfinite(aJ) and aJ > 0.0):
                    break

                params = HysteresisParams(aJ=aJ, alpha=alpha, c=c, k=k, Ms=Ms)
                sim = integrate(params, waveform, M0=0.0)
                mse = _loop_mse(sim, loop)
                cand = Jiles92Result(
                    params=params, mse=mse, fit_condition_met=mse <= cfg.fit_tol,
                    seed=seed, iterations=it,
                )
                if best is None or mse < best.mse:
                    best = cand
                if cand.fit_condition_met:
                    return cand
        except (RootFindError, SingularDenominator, SingularSlope, UnstableParams, ValueError) as err:
            _logger.debug("seed %.3g aborted: %s", seed, err)
            continue

    if best is None:
        raise NoConvergence("no alpha seed produced a simulatable parameter set")
    return best
