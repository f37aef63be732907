"""Measured-curve ingestion and loop feature extraction.

Input files are delimited text with one (H, M) sample per line.  The M
column may be magnetization (A/m), polarization J = mu0*M (T), or flux
density B = mu0*(H + M) (T); everything is converted to A/m on load.

``extract_features`` reduces a first-magnetization curve, a full hysteresis
loop and an anhysteretic curve to the nine scalar features the loop-fitting
procedure consumes.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from logging import getLogger
from pathlib import Path

import numpy as np

from .core import MU0
from .errors import (
    EmptyFile,
    InsufficientSamples,
    MissingBranch,
    NonPhysicalParameterWarning,
    ParseError,
    UnitError,
)

_MIN_BRANCH_SAMPLES = 10

_logger = getLogger(__name__)


class Unit(enum.Enum):
    """Interpretation of the M column.  Values match the CLI flag."""

    M_A_PER_M = "m"
    J_TESLA = "j"
    B_TESLA = "b"


class CurveKind(enum.Enum):
    ANHYSTERETIC = "anhysteretic"
    FIRST_MAGNETIZATION = "first_magnetization"
    LOOP_BRANCH = "loop_branch"
    FULL_LOOP = "full_loop"


_MONOTONE_KINDS = (CurveKind.ANHYSTERETIC, CurveKind.FIRST_MAGNETIZATION)


@dataclass(frozen=True)
class MagnetizationCurve:
    """An ordered set of (H, M) samples in A/m.

    ``source_units`` records what the M column looked like on disk.  For
    anhysteretic and first-magnetization kinds H must be strictly
    increasing; loop kinds are time-ordered instead.
    """

    H: np.ndarray
    M: np.ndarray
    kind: CurveKind
    source_units: Unit = Unit.M_A_PER_M

    def __post_init__(self) -> None:
        H = np.asarray(self.H, dtype=np.float64)
        M = np.asarray(self.M, dtype=np.float64)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "M", M)
        if H.ndim != 1 or H.shape != M.shape:
            raise ValueError(f"H and M must be 1-d and equal length, got {H.shape} and {M.shape}")
        if H.size == 0:
            raise ValueError("curve must contain at least one sample")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(M))):
            raise ValueError("curve contains non-finite values")
        if self.kind in _MONOTONE_KINDS and H.size > 1 and not np.all(np.diff(H) > 0.0):
            raise ValueError(f"{self.kind.value} curve requires strictly increasing H")

    def __len__(self) -> int:
        return int(self.H.size)

    def check_amplitude(self, Ms: float) -> None:
        """Warn when |M| exceeds the stated saturation by more than 10%."""
        peak = float(np.max(np.abs(self.M)))
        if peak > 1.1 * Ms:
            warnings.warn(
                f"|M| reaches {peak:.4g} A/m, above 1.1*Ms = {1.1 * Ms:.4g}",
                NonPhysicalParameterWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class LoopFeatures:
    """Scalar features of a measured hysteresis loop.

    chi_in:  initial slope of the first-magnetization curve
    chi_an:  initial slope of the anhysteretic curve
    chi_max: slope of the loop at the coercive point
    chi_r:   slope of the descending branch at remanence
    chi_m:   slope at the loop tip
    Hc, Mr:  coercive field and remanence (both reported positive)
    Hm, Mm:  tip field and tip magnetization
    """

    chi_in: float
    chi_an: float
    chi_max: float
    chi_r: float
    chi_m: float
    Hc: float
    Mr: float
    Hm: float
    Mm: float

    def __post_init__(self) -> None:
        for name in ("chi_in", "chi_an", "chi_max", "chi_r", "chi_m"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
            if v == 0.0:
                warnings.warn(f"{name} is zero", NonPhysicalParameterWarning, stacklevel=2)
        if not np.isfinite(self.Hc) or self.Hc < 0.0:
            raise ValueError(f"Hc must be finite and non-negative, got {self.Hc}")
        if self.Hc == 0.0:
            warnings.warn("Hc is zero (lossless loop)", NonPhysicalParameterWarning, stacklevel=2)
        if abs(self.Mr) > abs(self.Mm):
            raise ValueError(f"|Mr| = {abs(self.Mr):.6g} exceeds |Mm| = {abs(self.Mm):.6g}")
        if not self.Hm > self.Hc:
            raise ValueError(f"Hm = {self.Hm:.6g} must exceed Hc = {self.Hc:.6g}")


def _convert_m(h: np.ndarray, raw: np.ndarray, unit: Unit) -> np.ndarray:
    if unit is Unit.M_A_PER_M:
        return raw
    if unit is Unit.J_TESLA:
        return raw / MU0
    if unit is Unit.B_TESLA:
        return raw / MU0 - h
    raise UnitError(f"unknown unit {unit!r}")


def parse_curve(
    path: str | Path,
    *,
    kind: CurveKind,
    unit: Unit = Unit.M_A_PER_M,
    delimiter: str | None = None,
    h_col: int = 0,
    m_col: int = 1,
    skip_header: int | None = None,
) -> MagnetizationCurve:
    """Read a delimited text file into a :class:`MagnetizationCurve`.

    ``delimiter`` defaults to auto-detection among comma, semicolon and tab
    (falling back to whitespace).  ``skip_header=None`` skips one leading
    row if and only if none of its cells parse as numbers; pass an integer
    to skip exactly that many rows.  Curves whose kind requires monotone H
    are sorted by H before validation.  Raises :class:`ParseError` (with
    the 1-based line number), :class:`UnitError` or :class:`EmptyFile`.
    """
    if isinstance(unit, str):
        try:
            unit = Unit(unit)
        except ValueError:
            raise UnitError(f"unknown unit {unit!r}; expected one of m, j, b") from None

    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()

    def split(line: str) -> list[str]:
        if delimiter is not None:
            return [c.strip() for c in line.split(delimiter)]
        for cand in (",", ";", "\t"):
            if cand in line:
                return [c.strip() for c in line.split(cand)]
        return line.split()

    rows: list[tuple[float, float]] = []
    skipped = 0
    auto_header = skip_header is None
    to_skip = 0 if auto_header else skip_header
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if skipped < to_skip:
            skipped += 1
            continue
        cells = split(line)
        if max(h_col, m_col) >= len(cells):
            raise ParseError(
                f"line {lineno}: expected at least {max(h_col, m_col) + 1} columns, got {len(cells)}",
                line=lineno,
            )
        try:
            h = float(cells[h_col])
            m = float(cells[m_col])
        except ValueError:
            if auto_header and not rows and skipped == 0:
                # A fully non-numeric first row is a header.
                if all(not _is_number(c) for c in cells if c):
                    skipped += 1
                    continue
            raise ParseError(f"line {lineno}: non-numeric cell in {cells!r}", line=lineno) from None
        rows.append((h, m))

    if not rows:
        raise EmptyFile(f"{path}: no data rows")

    arr = np.asarray(rows, dtype=np.float64)
    H = arr[:, 0]
    M = _convert_m(H, arr[:, 1], unit)
    if kind in _MONOTONE_KINDS:
        order = np.argsort(H, kind="stable")
        H, M = H[order], M[order]
    return MagnetizationCurve(H=H, M=M, kind=kind, source_units=unit)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def split_branches(loop: MagnetizationCurve) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Split a time-ordered loop into its last descending and ascending runs.

    Returns ``((H_desc, M_desc), (H_asc, M_asc))`` in traversal order.
    Raises :class:`MissingBranch` when either run is absent and
    :class:`InsufficientSamples` when a branch has fewer than 10 samples.
    """
    H, M = loop.H, loop.M
    if H.size < 2:
        raise MissingBranch("loop has fewer than two samples")
    d = np.sign(np.diff(H))
    # maximal runs of constant, non-zero direction
    runs: list[tuple[int, int, float]] = []  # (start, stop) sample indices, direction
    start = 0
    cur = d[0]
    for i in range(1, d.size):
        if d[i] != cur:
            if cur != 0.0:
                runs.append((start, i + 1, cur))
            start = i
            cur = d[i]
    if cur != 0.0:
        runs.append((start, d.size + 1, cur))

    desc = [r for r in runs if r[2] < 0.0]
    asc = [r for r in runs if r[2] > 0.0]
    if not desc or not asc:
        raise MissingBranch("loop must contain both a descending and an ascending branch")
    sd, ed, _ = desc[-1]
    sa, ea, _ = asc[-1]
    for s, e, label in ((sd, ed, "descending"), (sa, ea, "ascending")):
        if e - s < _MIN_BRANCH_SAMPLES:
            raise InsufficientSamples(
                f"{label} branch has {e - s} samples; at least {_MIN_BRANCH_SAMPLES} required"
            )
    return (H[sd:ed], M[sd:ed]), (H[sa:ea], M[sa:ea])


def _origin_slope(H: np.ndarray, M: np.ndarray, points: int) -> float:
    """Least-squares slope over the first ``points`` samples."""
    if H.size < 2:
        raise InsufficientSamples("need at least 2 samples for a slope")
    n = min(max(points, 2), H.size)
    h, m = H[:n], M[:n]
    hm = h - h.mean()
    denom = float(np.dot(hm, hm))
    if denom == 0.0:
        raise InsufficientSamples("degenerate field values in slope window")
    return float(np.dot(hm, m - m.mean()) / denom)


def _branch_slope_fn(Hb: np.ndarray, Mb: np.ndarray):
    """Slope lookup on a branch: central differences on a uniform regrid."""
    order = np.argsort(Hb, kind="stable")
    Hs, Ms_ = Hb[order], Mb[order]
    n = Hs.size
    Hg = np.linspace(Hs[0], Hs[-1], n)
    Mg = np.interp(Hg, Hs, Ms_)
    Sg = np.gradient(Mg, Hg)
    return lambda h: float(np.interp(h, Hg, Sg))


def _crossing(x: np.ndarray, y: np.ndarray, level: float = 0.0) -> float:
    """First x where y crosses ``level``, linearly interpolated."""
    s = y - level
    for j in range(s.size - 1):
        if s[j] == 0.0:
            return float(x[j])
        if (s[j] < 0.0) != (s[j + 1] < 0.0):
            frac = s[j] / (s[j] - s[j + 1])
            return float(x[j] + frac * (x[j + 1] - x[j]))
    if s[-1] == 0.0:
        return float(x[-1])
    raise MissingBranch(f"no crossing of level {level} on branch")


def extract_features(
    first_mag: MagnetizationCurve,
    loop: MagnetizationCurve,
    anhysteretic: MagnetizationCurve,
    *,
    slope_points: int = 5,
) -> LoopFeatures:
    """Measure the loop features used by the loop-fitting procedure.

    Initial slopes come from a least-squares fit over the first
    ``slope_points`` samples of the first-magnetization and anhysteretic
    curves.  Hc, Mr and the branch slopes are read off the descending
    branch with linear interpolation; the tip slope is taken at the end of
    the ascending branch.
    """
    for curve, label in ((first_mag, "first_mag"), (anhysteretic, "anhysteretic")):
        if len(curve) < _MIN_BRANCH_SAMPLES:
            raise InsufficientSamples(f"{label} curve has {len(curve)} samples; need {_MIN_BRANCH_SAMPLES}")

    (Hd, Md), (Hasc, Masc) = split_branches(loop)

    i_tip = int(np.argmax(loop.H))
    Hm = float(loop.H[i_tip])
    Mm = float(loop.M[i_tip])

    h_cross = _crossing(Hd, Md)  # descending branch crosses M=0 at -Hc
    Hc = abs(h_cross)
    if not (Hd.min() < 0.0 < Hd.max()):
        raise MissingBranch("descending branch does not span H = 0")
    Mr = float(np.interp(0.0, Hd[::-1], Md[::-1]))

    desc_slope = _branch_slope_fn(Hd, Md)
    asc_slope = _branch_slope_fn(Hasc, Masc)
    chi_max = desc_slope(h_cross)
    chi_r = desc_slope(0.0)
    chi_m = asc_slope(float(np.max(Hasc)))

    chi_in = _origin_slope(first_mag.H, first_mag.M, slope_points)
    chi_an = _origin_slope(anhysteretic.H, anhysteretic.M, slope_points)

    return LoopFeatures(
        chi_in=chi_in,
        chi_an=chi_an,
        chi_max=chi_max,
        chi_r=chi_r,
        chi_m=chi_m,
        Hc=Hc,
        Mr=abs(Mr),
        Hm=Hm,
        Mm=Mm,
    )
