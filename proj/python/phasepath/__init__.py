"""Propagation inequality, Wigner phase space and scan analysis."""

import json
from pathlib import Path

from ._phasepath import (
    AreaOutOfRange,
    ConfigError,
    FitDiverged,
    LabParams,
    MissingPlane,
    NaturalUnits,
    OverlapOutOfRange,
    PhasepathError,
    PropagationTriple,
    QuasiProbabilities,
    RegionReport,
    RunConfig,
    bound_report,
    defect_probability,
    defect_sweep,
    ideal_triple,
    minimal_joint_probability,
    plane_densities,
    predict_PM,
    quasi_from_envelope,
    quasi_from_marginals,
    reproduce,
    simulate,
    wigner,
    wigner_files,
)
from . import _phasepath

PLANES = ("t0_pos", "t0_mom", "tM")


def analyze(config, scans):
    """Analysis report of three scan files as a dict."""
    return json.loads(_phasepath.analyze_json(config, [Path(s) for s in scans]))


def analyze_files(config, scans, out_dir):
    """Writes analysis.json, densities.csv and figures.plt; returns the exit code."""
    return _phasepath.analyze_files(config, [Path(s) for s in scans], Path(out_dir))


def acceptance(seed=7, which=()):
    """Acceptance results as a list of dicts, one per criterion."""
    return json.loads(_phasepath.acceptance_json(seed, list(which)))


__all__ = [name for name in dir() if not name.startswith("_") and name not in ("json", "Path")]
