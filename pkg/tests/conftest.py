import numpy as np
import pytest

from jamag.core import AnhystereticParams, MaterialSpec
from jamag.dataio import CurveKind, MagnetizationCurve
from jamag.validation import synthetic_curve

MS = 1.6e6
T = 303.5


@pytest.fixture
def material() -> MaterialSpec:
    return MaterialSpec(Ms=MS, T=T)


@pytest.fixture
def steel_params() -> AnhystereticParams:
    return AnhystereticParams.from_shape(972.0, 1.4e-3, T)


@pytest.fixture
def steel_curve(material) -> MagnetizationCurve:
    return synthetic_curve(972.0, 1.4e-3, material, 200, 1.0e4)


def write_curve_file(path, H, M, header: str | None = "H,M", sep: str = ",") -> None:
    with open(path, "w", encoding="utf-8") as f:
        if header is not None:
            f.write(header + "\n")
        for h, m in zip(H, M):
            f.write(f"{float(h)!r}{sep}{float(m)!r}\n")


def linear_curve(n: int = 20, chi: float = 100.0, kind=CurveKind.ANHYSTERETIC) -> MagnetizationCurve:
    H = np.linspace(1.0, float(n), n)
    return MagnetizationCurve(H=H, M=chi * H, kind=kind)
