"""
JSON codecs for every value that leaves the process.

Complex numbers are [re, im] pairs, polynomial coefficients are ascending, and
reports are written with sorted keys so identical runs give identical bytes.
"""
import json
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from gaudin.algebra.characters import QSeries
from gaudin.algebra.poly import Polynomial
from gaudin.core.errors import ConfigError
from gaudin.model.averaging import InterpolationReport, ProbeReport
from gaudin.model.master import CriticalPointT, SolveReport
from gaudin.model.schubert import PolySpace
from gaudin.model.tensor_space import Partition, TensorVector

logger = logging.getLogger(__name__)


def _clean(x: float) -> Optional[float]:
    # JSON has no NaN; -0.0 would break byte-identical output
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return None
    return float(x) + 0.0


def complex_to_json(c: complex) -> List[float]:
    c = complex(c)
    return [_clean(c.real), _clean(c.imag)]


def complex_from_json(pair: Any) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    try:
        re_, im_ = pair
        return complex(float(re_), float(im_))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"expected an [re, im] pair, got {pair!r}") from e


def polynomial_to_json(p: Polynomial) -> List[List[float]]:
    return [complex_to_json(c) for c in p.coeffs]


def polynomial_from_json(data: Sequence[Any]) -> Polynomial:
    return Polynomial(tuple(complex_from_json(c) for c in data))


def tensor_vector_to_json(v: TensorVector) -> Dict[str, Any]:
    return {
        "N": v.N,
        "n": v.n,
        "entries": [{"J": list(J), "c": complex_to_json(c)} for J, c in v.items()],
    }


def tensor_vector_from_json(data: Dict[str, Any]) -> TensorVector:
    return TensorVector.from_items(
        data["N"], data["n"], ((tuple(e["J"]), complex_from_json(e["c"])) for e in data["entries"])
    )


def critical_point_to_json(T: CriticalPointT) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "z": [complex_to_json(x) for x in T.z],
        "t": {str(a): [complex_to_json(x) for x in T.level(a)] for a in range(1, T.N)},
    }
    if T.hess is not None:
        out["hessian"] = complex_to_json(T.hess)
        out["nondegenerate"] = T.nondegenerate
    if T.residual is not None:
        out["residual"] = _clean(T.residual)
    return out


def critical_point_from_json(data: Dict[str, Any]) -> CriticalPointT:
    """Rebuild a point; solver tags are dropped so every check recomputes them."""
    try:
        z = [complex_from_json(x) for x in data["z"]]
        levels = data.get("t", {})
        t = [[complex_from_json(x) for x in levels[str(a)]] for a in range(1, len(levels) + 1)]
    except KeyError as e:
        raise ConfigError(f"critical point JSON is missing {e}") from e
    return CriticalPointT.of(z, t)


def poly_space_to_json(X: PolySpace) -> Dict[str, Any]:
    return {"lambda": list(X.lam.parts), "flag_basis": [polynomial_to_json(f) for f in X.basis]}


def poly_space_from_json(data: Dict[str, Any]) -> PolySpace:
    return PolySpace(Partition(tuple(data["lambda"])), tuple(polynomial_from_json(f) for f in data["flag_basis"]))


def qseries_to_json(q: QSeries) -> List[int]:
    return list(q.coeffs)



def solve_report_to_json(r: SolveReport) -> Dict[str, Any]:
    return {
        "lambda": list(r.lam),
        "z": [complex_to_json(x) for x in r.z],
        "seed": r.seed,
        "expected": r.expected,
        "found": r.found,
        "count_mismatch": r.count_mismatch,
        "starts": r.starts,
        "converged_starts": r.converged_starts,
        "cell_starts": r.cell_starts,
        "attempts": r.attempts,
        "residuals": [_clean(x) for x in r.residuals],
        "hessians": [complex_to_json(h) for h in r.hessians],
        "nondegenerate": list(r.nondegenerate),
    }


def interpolation_report_to_json(r: InterpolationReport) -> Dict[str, Any]:
    return {
        "lambda": list(r.lam),
        "F": r.F,
        "declared_degree": r.declared_degree,
        "heldout_residual": _clean(r.heldout_residual),
        "above_degree_energy": _clean(r.above_degree_energy),
        "samples_used": r.samples_used,
        "heldout_used": r.heldout_used,
        "dropped": r.dropped,
        "passed": r.passed,
        "coefficients": {
            J: [{"exponents": list(e), "c": complex_to_json(c)} for e, c in terms]
            for J, terms in r.coefficients.items()
        },
    }


def probe_report_to_json(r: ProbeReport) -> Dict[str, Any]:
    return {
        "s": [_clean(s) for s in r.s_values],
        "norms": [_clean(x) for x in r.norms],
        "failures": [_clean(s) for s in r.failures],
        "max_norm": _clean(r.max_norm),
        "median_norm": _clean(r.median_norm),
        "bounded": r.bounded,
        "complete": r.complete,
        "shrinking": r.shrinking,
        "monotone_blowup": r.monotone_blowup,
    }


def _default(obj: Any) -> Any:
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _clean(float(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (tuple, np.ndarray)):
        return list(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_default, ensure_ascii=False, allow_nan=False)


def write_report(report: Dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_report(report))
        fh.write("\n")
    logger.info("wrote report to %s", path)


def read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read JSON from {path}: {e}") from e
