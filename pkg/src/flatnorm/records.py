"""JSON result records and CSV sweep tables.

Every record is a JSON object with the keys ``command``, ``inputs_digest``
(SHA-256 over the input files and the canonical parameter JSON),
``outputs`` and ``timing_ms``.  Exact rationals are written as
``{"exact": "p/q", "decimal": <float>}``; chains as lists of
``[[vertex ids], coefficient]`` pairs.  Keys are sorted so identical inputs
give byte-identical records apart from ``timing_ms``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

from .deform import BoundComparison, DeformationBounds, RefinementRow, RetractionTrace, SullivanBounds
from .geometry import RegularityReport
from .msfn import MsfnResult, SweepResult
from .rational import fmt_rational
from .simplicial import Chain, SimplicialComplex
from .tu import TuCertificate


def exact(q) -> dict:
    q = Fraction(q)
    return {"exact": fmt_rational(q), "decimal": float(q)}


def real(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def chain_json(K: SimplicialComplex, c: Chain) -> list:
    return [[list(K.simplex(c.dim, i)), v] for i, v in c.items()]


def msfn_json(K: SimplicialComplex, r: MsfnResult, input_mass=None) -> dict:
    out = {
        "lambda": exact(r.lam),
        "flat_norm": exact(r.flat_norm),
        "x_mass": exact(r.x_mass),
        "s_mass": exact(r.s_mass),
        "x": chain_json(K, r.x),
        "s": chain_json(K, r.s),
        "lp_was_integral": r.lp_was_integral,
        "solver_path": r.solver_path.value,
        "proven_optimal": r.proven_optimal,
        "node_count": r.node_count,
    }
    if r.lp_objective is not None:
        out["lp_objective"] = exact(r.lp_objective)
    if input_mass is not None:
        out["input_mass"] = exact(input_mass)
    return out


def weights_json(w) -> list[str]:
    return [fmt_rational(v) for v in w]


def certificate_json(K: SimplicialComplex, d: int, cert: TuCertificate) -> dict:
    out = cert.to_dict()
    if cert.cycle:
        out["cycle_simplices"] = [list(K.simplex(d + 1, j)) for j in cert.cycle]
    if cert.det is not None:
        out["row_simplices"] = [list(K.simplex(d, i)) for i in cert.rows]
        out["col_simplices"] = [list(K.simplex(d + 1, j)) for j in cert.cols]
    return out


def regularity_json(R: RegularityReport, full: bool = False) -> dict:
    out = {
        "dim": R.dim,
        "kappa1": real(R.kappa1),
        "kappa2": real(R.kappa2),
        "delta": real(R.delta),
        "theta": real(R.theta),
        "kappa1_at": list(R.kappa1_at),
        "kappa2_at": list(R.kappa2_at),
        "n_simplices": len(R.per_simplex),
    }
    if full:
        out["per_simplex"] = [
            {k: real(v) if isinstance(v, float) else v for k, v in dataclasses.asdict(g).items()} for g in R.per_simplex
        ]
    return out


def bounds_json(b: DeformationBounds | SullivanBounds | BoundComparison) -> dict:
    if isinstance(b, BoundComparison):
        return {
            "ours": bounds_json(b.ours),
            "sullivan": bounds_json(b.sullivan),
            "flat_ratio": real(b.flat_ratio),
            "ours_strictly_smaller": b.ours_strictly_smaller,
        }
    return {k: real(v) if isinstance(v, float) else v for k, v in dataclasses.asdict(b).items()}


def trace_json(K: SimplicialComplex, tr: RetractionTrace) -> dict:
    return {
        "snapped": chain_json(K, tr.snapped),
        "mass_before": real(tr.mass_before),
        "mass_after": real(tr.mass_after),
        "pushed_mass": real(tr.pushed_mass),
        "expansion_bound": real(tr.expansion_bound),
        "within_bound": tr.within_bound,
        "closed": tr.closed,
        "resamples": tr.resamples,
        "per_level": [
            {"level": s.level, "simplex": s.simplex, "center": [real(v) for v in s.center],
             "factor": real(s.factor), "allowed": real(s.allowed)}
            for s in tr.per_level
        ],
    }


def refinement_json(rows: list[RefinementRow]) -> list[dict]:
    return [{k: real(v) if isinstance(v, float) else v for k, v in dataclasses.asdict(r).items()} for r in rows]


def _default(o):
    if isinstance(o, Fraction):
        return exact(o)
    if isinstance(o, Enum):
        return o.value
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return real(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def inputs_digest(files=(), params=None) -> str:
    h = hashlib.sha256()
    for f in files:
        data = Path(f).read_bytes()
        h.update(len(data).to_bytes(8, "little"))
        h.update(data)
    h.update(json.dumps(params or {}, sort_keys=True, default=_default).encode())
    return h.hexdigest()


def make_record(command: str, digest: str, outputs, timing_ms: float | None) -> dict:
    return {
        "command": command,
        "inputs_digest": digest,
        "outputs": outputs,
        "timing_ms": None if timing_ms is None else round(timing_ms, 3),
    }


SWEEP_COLUMNS = ("lambda", "F", "x_mass", "s_mass", "solver_path")


def sweep_csv(sweep: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for lam, r in sweep.results:
        w.writerow([fmt_rational(lam), fmt_rational(r.flat_norm), fmt_rational(r.x_mass), fmt_rational(r.s_mass),
                    r.solver_path.value])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in SWEEP_COLUMNS[:4]:
            row[key] = Fraction(row[key])
    return rows
