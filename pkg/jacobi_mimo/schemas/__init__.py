"""
Pydantic schemas for configurations and results.

This package contains the validated data carriers exchanged between the
numerical core and the command-line surface.
"""

from jacobi_mimo.schemas.channel import (
    ChannelConfig,
    REFERENCE_PRESETS,
)

from jacobi_mimo.schemas.numerics import (
    LogDet,
    SeriesControl,
    SignedLog,
)

from jacobi_mimo.schemas.results import (
    ApproximationReport,
    CurveKind,
    CurveMethod,
    DistCurve,
    EmpiricalCurve,
    KlReport,
    McEnsemble,
    MgfGrid,
    MomentSet,
    RunManifest,
    RunOptions,
    ScanRow,
    SweepResult,
    WeibullParams,
)

__all__ = [
    # Channel schemas
    "ChannelConfig",
    "REFERENCE_PRESETS",

    # Numerical carriers
    "LogDet",
    "SeriesControl",
    "SignedLog",

    # Result schemas
    "ApproximationReport",
    "CurveKind",
    "CurveMethod",
    "DistCurve",
    "EmpiricalCurve",
    "KlReport",
    "McEnsemble",
    "MgfGrid",
    "MomentSet",
    "RunManifest",
    "RunOptions",
    "ScanRow",
    "SweepResult",
    "WeibullParams",
]
