r"""Finite-key secure-key-rate model and sweep engine.

The extractable key length is a reconstructed finite-key expression,
assembled from standard ingredients rather than copied from any single
published formula; treat absolute numbers as model output, while the
structural properties (ordering in the sifted length, monotone decay in
the error rate, and the gap between leakage models) are the supported
conclusions.  Every term:

    length(Q) = max(0, floor( k * (1 - h2(Q + mu))      raw randomness,
                                                        penalized by the
                                                        statistical allowance
                                                        mu = sqrt(ln(1/eps_pe) / (2k))
                              - leak(k, Q)              syndrome-hiding cost,
                                                        conventional or strict model
                              - log2(2 / eps_ec)        correction-verification cost
                              - 2 * log2(1 / (2 eps_pa))  hashing cost ))

with h2 the binary entropy and k the sifted length.  The rate is
normalized per sifted bit (length / k); multiply by the sifting factor
and sampling retention for a per-pulse figure.

The security-parameter split defaults to eps_pe = eps_ec = eps_pa =
2^(-52), composing to a total near the 2^(-50) benchmark scale.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .numerics import Log2Value, binary_entropy
from .postproc import leak_conventional, leak_yuen

_LN2 = math.log(2.0)

CSV_HEADER = "q,rate,model,xi,sifted_len,eps_pe,eps_ec,eps_pa"


@dataclass(frozen=True)
class RateModelParams:
    """Sifted length, security-parameter split, and leakage model."""

    sifted_len: int
    eps_pe: Log2Value = field(default_factory=lambda: Log2Value(-52))
    eps_ec: Log2Value = field(default_factory=lambda: Log2Value(-52))
    eps_pa: Log2Value = field(default_factory=lambda: Log2Value(-52))
    leak_model: str = "conventional"
    xi: float = 1.1

    def __post_init__(self):
        if self.sifted_len < 1:
            raise ValueError("sifted_len must be >= 1")
        for name in ("eps_pe", "eps_ec", "eps_pa"):
            v = getattr(self, name)
            if v.is_zero or v.exponent > 0:
                raise ValueError("%s must be a nonzero probability" % name)
        if self.leak_model not in ("conventional", "yuen"):
            raise ValueError("leak_model must be 'conventional' or 'yuen'")
        if not 1.0 <= self.xi <= 2.0:
            raise ValueError("xi must lie in [1, 2]")

    def leak(self, q: float) -> float:
        if self.leak_model == "yuen":
            return leak_yuen(self.sifted_len, q)
        return leak_conventional(self.sifted_len, q, self.xi)


@dataclass
class RateCurve:
    """Rate-versus-error-rate curve; points are (Q, length/k)."""

    points: List[Tuple[float, float]]
    params: RateModelParams


def secure_key_length_report(params: RateModelParams, q: float) -> dict:
    """Key length plus a term-by-term breakdown and clamp flags."""
    if not 0.0 <= q < 0.5:
        raise ValueError("error rate must lie in [0, 0.5), got %r" % q)
    k = params.sifted_len
    mu = math.sqrt((-params.eps_pe.exponent) * _LN2 / (2.0 * k))
    report = {
        "sifted_len": k,
        "q": q,
        "mu": mu,
        "finite_size_dominated": False,
        "leak_diverged": False,
        "length": 0,
    }
    if q + mu >= 0.5:
        report["finite_size_dominated"] = True
        return report
    raw = k * (1.0 - binary_entropy(q + mu))
    if params.leak_model == "yuen" and 1.0 - binary_entropy(q) < 1e-6:
        report["leak_diverged"] = True
        return report
    leak = params.leak(q)
    ec_cost = 1.0 - params.eps_ec.exponent            # log2(2 / eps_ec)
    pa_cost = 2.0 * (-1.0 - params.eps_pa.exponent)   # 2 * log2(1 / (2 eps_pa))
    report.update(raw=raw, leak=leak, ec_cost=ec_cost, pa_cost=pa_cost)
    report["length"] = max(0, math.floor(raw - leak - ec_cost - pa_cost))
    return report


def secure_key_length(params: RateModelParams, q: float) -> int:
    """Extractable key length in bits at error rate q (0 when clamped)."""
    return secure_key_length_report(params, q)["length"]


def rate_curve(params: RateModelParams, q_grid: Sequence[float]) -> RateCurve:
    """Evaluate length/k over a sorted error-rate grid.

    The curve is checked to be nonincreasing after computation; a
    violation would mean the model lost its monotonicity and is raised
    as an error rather than returned.
    """
    grid = [float(q) for q in q_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("error-rate grid must be strictly increasing")
    if grid and (grid[0] < 0.0 or grid[-1] >= 0.5):
        raise ValueError("error-rate grid must lie within [0, 0.5)")
    k = params.sifted_len
    points = [(q, secure_key_length(params, q) / k) for q in grid]
    for (q1, r1), (q2, r2) in zip(points, points[1:]):
        if r2 > r1 + 1e-15:
            raise ValueError("rate increased from Q=%g to Q=%g (%g -> %g)"
                             % (q1, q2, r1, r2))
    return RateCurve(points=points, params=params)


def default_q_grid(q_max: float = 0.12, q_step: float = 0.002) -> List[float]:
    if q_step <= 0 or q_max < 0 or q_max >= 0.5:
        raise ValueError("need q_step > 0 and 0 <= q_max < 0.5")
    n_steps = int(round(q_max / q_step))
    grid = [round(i * q_step, 12) for i in range(n_steps + 1)]
    return [q for q in grid if q <= q_max + 1e-15]


def cutoff_qber(params: RateModelParams, tol: float = 1e-6) -> float:
    """Largest error rate with a positive key length, by bisection."""
    lo, hi = 0.0, 0.499999
    if secure_key_length(params, lo) == 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if secure_key_length(params, mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


# ----------------------------------------------------------------------
# CSV emission
# ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.12g" % x


def curve_rows(curves: Sequence[RateCurve]) -> List[str]:
    """CSV rows (no header) for a family of curves.

    Epsilon columns carry base-2 exponents; q and rate are printed with
    12 significant digits so emitted files re-parse bit-exactly.
    """
    rows = []
    for curve in curves:
        p = curve.params
        for q, rate in curve.points:
            rows.append(",".join([
                _fmt(q), _fmt(rate), p.leak_model, _fmt(p.xi), str(p.sifted_len),
                _fmt(p.eps_pe.exponent), _fmt(p.eps_ec.exponent), _fmt(p.eps_pa.exponent),
            ]))
    return rows


def curves_to_csv(curves: Sequence[RateCurve]) -> str:
    return "\n".join([CSV_HEADER] + curve_rows(curves)) + "\n"


def write_csv_atomic(path: str, text: str) -> None:
    """Write-then-rename so a failed run never leaves a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".keyrate-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_csv(text: str) -> List[dict]:
    """Parse an emitted CSV back into row dicts (round-trip safe)."""
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    names = CSV_HEADER.split(",")
    return [dict(zip(names, line.split(","))) for line in lines[1:]]


def rows_to_csv(rows: Sequence[dict]) -> str:
    names = CSV_HEADER.split(",")
    lines = [CSV_HEADER] + [",".join(r[c] for c in names) for r in rows]
    return "\n".join(lines) + "\n"
