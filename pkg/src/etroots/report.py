"""End-to-end analysis of one polynomial and its JSON report."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .circle import h_measure, jensen_sum, log_abs_integral
from .discrepancy import (angular_discrepancy, clustering_count, gap_cv, region_census)
from .errors import DegenerateInputError
from .poly import FamilySpec, Polynomial, TrigView, format_coeff_pairs, normalize_leading
from .rootfind import DEFAULT_TOL, angular_sample, find_roots
from .trig import count_real_roots

DEFAULT_ALPHAS = (0.5, 0.75, 0.9)
DEFAULT_RTOL = 1e-6


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.cause = exc


@dataclass
class AnalysisConfig:
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    factor: float = 5.0
    tol: float = DEFAULT_TOL
    rtol: float = DEFAULT_RTOL
    seed: int = 0
    case_c: float = 0.01
    timings: bool = False


@dataclass
class AnalysisReport:
    """Every computed quantity for one input. ``to_json`` is deterministic."""

    tool: str
    version: str
    status: str
    input: dict
    n: int
    roots: dict
    h: dict
    log_integral: dict
    trig: dict
    discrepancy: float
    et_bound: float
    bound_holds: bool
    gap_cv: float | None
    clusters: list
    origin_root_count: int
    inside_root_count: int
    min_modulus: float
    jensen_residual: float
    config: dict
    notes: list = field(default_factory=list)
    timings: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["timings"] is None:
            del d["timings"]
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"


def _fmt(x: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return json.dumps(str(x))
        s = f"{x:.17g}"
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_fmt(v, indent, level + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        x = list(x)
        if not x:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in x):
            return "[" + ", ".join(_fmt(v, indent, level + 1) for v in x) + "]"
        items = [pad + _fmt(v, indent, level + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits, keys in insertion order."""
    return _fmt(obj, indent, 0)


def coeff_hash(coeffs: np.ndarray) -> str:
    return hashlib.sha256(format_coeff_pairs(coeffs).encode()).hexdigest()


def _stage(name: str, timings: dict, fn, *args, **kw):
    t0 = time.perf_counter()
    try:
        return fn(*args, **kw)
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - t0


def _integral_dict(r) -> dict:
    return {"value": r.value, "error_estimate": r.error_estimate, "converged": r.converged,
            "rtol": r.tol, "nodes_used": r.nodes_used, "refined_windows": r.refined_windows}


def analyze(p_input: Polynomial, config: AnalysisConfig | None = None,
            family: FamilySpec | None = None, notes: list[str] | None = None,
            source: str | None = None) -> AnalysisReport:
    """Run the full pipeline on ``p_input`` (normalized internally to |a_n| = 1)."""
    cfg = config or AnalysisConfig()
    if p_input.degree < 1:
        raise StageError("normalize", DegenerateInputError("analysis needs degree >= 1"))
    timings: dict[str, float] = {}
    p = _stage("normalize", timings, normalize_leading, p_input)
    n = p.degree
    rs = _stage("find_roots", timings, find_roots, p, cfg.tol)
    s = angular_sample(rs)
    status = "ok" if rs.certified else "advisory"
    report_notes = list(notes or [])
    if not rs.certified:
        report_notes.append(f"roots uncertified: {rs.diagnostic}")

    if abs(p.coeffs[0]) > 0:
        h = _stage("h_measure", timings, h_measure, p, cfg.rtol)
        h_dict = _integral_dict(h)
        h_val = h.value
    else:
        h_dict = {"value": None, "note": "undefined for a_0 = 0"}
        h_val = None
    li = _stage("log_abs_integral", timings, log_abs_integral, p, cfg.rtol)
    tr = _stage("count_real_roots", timings, count_real_roots, TrigView(p))
    disc = _stage("angular_discrepancy", timings, angular_discrepancy, s) if s.angles.size else 1.0
    bound = 8.0 / math.pi * math.sqrt(max(h_val, 0.0) / n) if h_val is not None else None
    for name, ok in (("h_measure", h_dict.get("converged", True)),
                     ("log_abs_integral", li.converged)):
        if not ok:
            status = "advisory"
            report_notes.append(f"{name} quadrature did not reach rtol {cfg.rtol:g}")

    clusters = []
    t0 = time.perf_counter()
    for alpha in cfg.alphas:
        cr = clustering_count(s, alpha, cfg.factor, X=tr.X, log_integral=li.value)
        census = [asdict(region_census(rs, J, alpha, cfg.factor, cfg.case_c))
                  for J in cr.chosen_intervals]
        d = {k: v for k, v in asdict(cr).items() if k != "detail"}
        d["chosen_intervals"] = [list(J) for J in cr.chosen_intervals]
        d["census"] = census
        clusters.append(d)
    timings["clustering_count"] = time.perf_counter() - t0

    radii = np.abs(rs.roots)
    jres = abs(li.value - jensen_sum(rs))
    coeffs = np.asarray(p_input.coeffs)
    return AnalysisReport(
        tool="etroots", version=__version__, status=status,
        input={"source": source or ("family" if family else "coefficients"),
               "family": family.label() if family else None,
               "sha256": coeff_hash(coeffs), "scale": abs(p_input.leading),
               "coefficients": [[c.real, c.imag] for c in coeffs]},
        n=n,
        roots={"certified": rs.certified, "iterations": rs.iterations, "tol": rs.tol,
               "method": rs.method, "max_residual": float(rs.residuals.max()),
               "diagnostic": rs.diagnostic,
               "values": [[z.real, z.imag] for z in rs.roots],
               "residuals": rs.residuals.tolist()},
        h=h_dict, log_integral=_integral_dict(li),
        trig={"X": tr.X, "sign_changes": tr.sign_changes, "tangential": tr.tangential,
              "borderline": len(tr.borderline), "method": tr.method},
        discrepancy=disc, et_bound=bound,
        bound_holds=bool(bound is not None and disc <= bound),
        gap_cv=gap_cv(s) if s.angles.size >= 2 else None,
        clusters=clusters,
        origin_root_count=s.origin_count,
        inside_root_count=int(np.sum(radii < 1.0)),
        min_modulus=float(radii.min()),
        jensen_residual=jres,
        config={"alphas": list(cfg.alphas), "factor": cfg.factor, "tol": cfg.tol,
                "rtol": cfg.rtol, "seed": cfg.seed, "case_c": cfg.case_c},
        notes=report_notes,
        timings=timings if cfg.timings else None,
    )


def write_report(report: AnalysisReport, path: str | Path) -> None:
    Path(path).write_text(report.to_json())


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def report_roots(data: dict) -> np.ndarray:
    return np.array([complex(a, b) for a, b in data["roots"]["values"]], dtype=complex)
