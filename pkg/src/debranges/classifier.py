"""Dichotomy classifier: which structural regime does the data sit in.

A space is "strong" (every exact kernel system with complete biorthogonal
admits synthesis) in exactly two regimes: finite total mass, or a
lacunary grid whose masses satisfy the two-sided comparison

    sum_{|t_k| <= |t_n|} mu_k  +  t_n^2 sum_{|t_k| > |t_n|} mu_k / t_k^2
        <= C mu_n  for all n.

Everything here is computed on the stored prefix plus the declared tail
model; whenever the prefix plus tail cannot settle a limit question the
verdict is Undetermined rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import SpectralData, tail_sums

# regression slope below which a scaled gap profile counts as decaying
_SLOPE_TOL = 0.05
_SEPARATION_GRID = tuple(range(0, 11))


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str  # StrongViaFiniteMeasure | StrongViaLacunary | NotStrong | Undetermined
    case: str | None  # I..IV when NotStrong
    mass_sum: dict
    lacunarity_inf: float
    C_constants: tuple
    C_sup: float
    separation: dict
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict if self.case is None else f"{self.verdict}({self.case})",
            "case": self.case,
            "mass_sum": self.mass_sum,
            "lacunarity_inf": self.lacunarity_inf,
            "C_constants": list(self.C_constants),
            "C_sup": self.C_sup,
            "separation": self.separation,
            "witnesses": self.witnesses,
        }


def check_finite_mass(data: SpectralData):
    """Three-valued test of sum mu_n < infinity.

    Returns (True/False/None, summary dict); None means the tail model
    is absent and the limit cannot be settled from the prefix.
    """
    partial = float(math.fsum(data.mu))
    ts = tail_sums(data)
    if not ts.known:
        return None, {"partial": partial, "tail": None, "total": None}
    total = partial + ts.mass
    return math.isfinite(total), {"partial": partial, "tail": ts.mass, "total": total}


def check_lacunary(data: SpectralData):
    """(verdict, inf ratio) for liminf |t_{n+1}/t_n| > 1.

    The prefix contributes its minimal consecutive ratio; the declared
    tail contributes its limiting ratio (the geometric node ratio, or 1
    for a power tail).  Without a tail model the prefix value is
    reported and the verdict is the prefix's alone.
    """
    t = np.abs(data.nodes)
    if len(t) < 2:
        return False, 1.0
    ratios = t[1:] / t[:-1]
    inf_ratio = float(np.min(ratios))
    tail = data.tail
    if tail.kind == "geometric":
        # the liminf along the idealized sequence is the tail ratio; the
        # reported infimum still folds in the stored prefix
        return float(tail.ratio) > 1.0, float(min(inf_ratio, tail.ratio))
    if tail.kind == "power":
        return False, 1.0
    return inf_ratio > 1.0, inf_ratio


def comparison_constants(data: SpectralData) -> list:
    """Per-node constants C_n of the two-sided mass comparison.

    C_n = (sum_{|t_k|<=|t_n|} mu_k + t_n^2 sum_{|t_k|>|t_n|} mu_k/t_k^2
           + tail terms) / mu_n, ordered by |t| exactly as printed in
    the defining inequality.
    """
    t = np.abs(data.nodes)
    mu = data.masses
    ts = tail_sums(data)
    tail_mass_over_t2 = ts.mass_over_t2 if ts.known else 0.0
    out = []
    for n in range(len(t)):
        inner = float(mu[t <= t[n]].sum())
        outer = float((mu[t > t[n]] / t[t > t[n]] ** 2).sum()) + tail_mass_over_t2
        out.append((inner + t[n] ** 2 * outer) / mu[n])
    return out


def _tail_comparison_limit(data: SpectralData) -> float:
    """Limit of C_n along an idealized geometric tail (inf if unbounded)."""
    tail = data.tail
    if tail.kind != "geometric":
        return math.inf
    q, rho = tail.ratio, tail.mass_ratio
    if rho <= 1.0 or rho >= q * q:
        return math.inf
    return rho / (rho - 1.0) + (rho / q**2) / (1.0 - rho / q**2)


def check_power_separated(data: SpectralData, grid=_SEPARATION_GRID):
    """Least N in the grid with gaps d_n >= c |t_n|^{-N} along the prefix.

    For each candidate N the profile v_n = d_n |t_n|^N is fit by least
    squares in log-log against |t_n|; N is accepted when the slope is
    not materially negative (the profile does not decay), and c is the
    profile minimum.  Returns (found, c, N).
    """
    t = np.abs(data.nodes)
    d = data.gaps
    if len(d) < 1:
        return True, 0.0, 0
    if np.any(d <= 0):
        return False, 0.0, None
    for n_exp in grid:
        v = d * t[:-1] ** n_exp
        if len(v) == 1:
            return True, float(v[0]), int(n_exp)
        x = np.log(t[:-1])
        y = np.log(v)
        if np.ptp(x) == 0:
            slope = 0.0
        else:
            slope = float(np.polyfit(x, y, 1)[0])
        if slope >= -_SLOPE_TOL:
            return True, float(np.min(v)), int(n_exp)
    return False, 0.0, None


# ---------------------------------------------------------------------------
# case witnesses (finite-sample policies, recorded so they can be rechecked)


def _witness_case_i(data: SpectralData, mass_divergent: bool):
    """Decreasing-mass subsequence with empirically summable masses.

    Finite-sample reading of "inf mu = 0 while sum mu diverges": the
    prefix must contain a run of masses decaying by at least a factor 2
    per pick (length >= 3) while the declared tail keeps the total mass
    infinite.
    """
    if not mass_divergent:
        return None
    mu = data.masses
    idx = [0]
    for i in range(1, len(mu)):
        if mu[i] <= mu[idx[-1]] / 2.0:
            idx.append(i)
    if len(idx) >= 3 and mu[idx[-1]] <= mu[idx[0]] / 8.0:
        return {"indices": idx, "mass_head": float(mu[idx[0]]), "mass_tail": float(mu[idx[-1]])}
    # also try starting from the running maximum
    start = int(np.argmax(mu))
    idx = [start]
    for i in range(start + 1, len(mu)):
        if mu[i] <= mu[idx[-1]] / 2.0:
            idx.append(i)
    if len(idx) >= 3 and mu[idx[-1]] <= mu[idx[0]] / 8.0:
        return {"indices": idx, "mass_head": float(mu[idx[0]]), "mass_tail": float(mu[idx[-1]])}
    return None


def _witness_case_iii(data: SpectralData):
    """Indices whose gaps are super-polynomially short: d_n <= |t_n|^-2
    and the scaled profile keeps decaying at the top of the grid range."""
    t = np.abs(data.nodes)
    d = data.gaps
    cand = [i for i in range(len(d)) if d[i] <= t[i] ** -2.0 and t[i] > 1]
    if len(cand) < 2:
        return None
    v = d[cand] * t[cand] ** max(_SEPARATION_GRID)
    if np.all(np.diff(np.log(v)) < 0):
        return {"indices": cand, "gaps": [float(d[i]) for i in cand]}
    return None


def _witness_case_ii(data: SpectralData):
    """Indices with d_n = o(|t_n|) but power-bounded-below gaps."""
    t = np.abs(data.nodes)
    d = data.gaps
    ratios = d / t[:-1]
    cand = [i for i in range(len(d)) if ratios[i] <= 0.5]
    if len(cand) < 2 or ratios[cand[-1]] > 0.5 * ratios[cand[0]] + 1e-12:
        return None
    # separation of the witness gaps themselves
    v_ok, c, n_exp = _profile_separation(t[cand], d[cand])
    if not v_ok:
        return None
    return {"indices": cand, "ratio_head": float(ratios[cand[0]]), "ratio_tail": float(ratios[cand[-1]]), "c": c, "N": n_exp}


def _profile_separation(tvals, dvals, grid=_SEPARATION_GRID):
    for n_exp in grid:
        v = dvals * tvals**n_exp
        if len(v) == 1:
            return True, float(v[0]), int(n_exp)
        x = np.log(tvals)
        slope = 0.0 if np.ptp(x) == 0 else float(np.polyfit(x, np.log(v), 1)[0])
        if slope >= -_SLOPE_TOL:
            return True, float(np.min(v)), int(n_exp)
    return False, 0.0, None


def _witness_case_iv(data: SpectralData, constants):
    """Growing comparison constants along a lacunary-like grid."""
    c = np.asarray(constants)
    if len(c) < 4:
        return None
    head = float(np.median(c[: max(2, len(c) // 4)]))
    grow = [i for i in range(len(c)) if c[i] >= 2.0 * head]
    if not grow or float(np.max(c)) < 4.0 * head:
        return None
    return {"indices": grow, "C_head": head, "C_max": float(np.max(c))}


def classify(data: SpectralData) -> ClassificationReport:
    """Verdict of the strong/not-strong dichotomy with computed evidence.

    Case priority when not strong: I, III, II, IV (overlapping witness
    conditions are resolved by this fixed order).
    """
    finite_mass, mass_info = check_finite_mass(data)
    lac, inf_ratio = check_lacunary(data)
    constants = comparison_constants(data)
    c_sup = max(constants) if constants else math.inf
    tail_limit = _tail_comparison_limit(data)
    sep_ok, sep_c, sep_n = check_power_separated(data)
    separation = {"power_separated": sep_ok, "c": sep_c, "N": sep_n}

    if finite_mass is True:
        return ClassificationReport(
            "StrongViaFiniteMeasure", None, mass_info, inf_ratio, tuple(constants), c_sup, separation
        )
    if finite_mass is None:
        return ClassificationReport(
            "Undetermined", None, mass_info, inf_ratio, tuple(constants), c_sup, separation,
            {"reason": "no tail model; mass sum cannot be settled"},
        )
    if lac and math.isfinite(tail_limit):
        c_sup = max(c_sup, tail_limit)
        return ClassificationReport(
            "StrongViaLacunary", None, mass_info, inf_ratio, tuple(constants), c_sup, separation
        )

    c_sup = max(c_sup, tail_limit) if lac else c_sup
    w = _witness_case_i(data, mass_divergent=True)
    if w is not None:
        return ClassificationReport(
            "NotStrong", "I", mass_info, inf_ratio, tuple(constants), c_sup, separation, {"case": "I", **w}
        )
    w = _witness_case_iii(data)
    if w is not None:
        return ClassificationReport(
            "NotStrong", "III", mass_info, inf_ratio, tuple(constants), c_sup, separation, {"case": "III", **w}
        )
    w = _witness_case_ii(data)
    if w is not None:
        return ClassificationReport(
            "NotStrong", "II", mass_info, inf_ratio, tuple(constants), c_sup, separation, {"case": "II", **w}
        )
    if lac:
        w = _witness_case_iv(data, constants)
        if w is not None:
            return ClassificationReport(
                "NotStrong", "IV", mass_info, inf_ratio, tuple(constants), c_sup, separation, {"case": "IV", **w}
            )
    return ClassificationReport(
        "Undetermined", None, mass_info, inf_ratio, tuple(constants), c_sup, separation,
        {"reason": "no deciding witness on the stored prefix"},
    )


def recheck_witness(data: SpectralData, report: ClassificationReport) -> bool:
    """Re-derive the stored witness conditions from the raw data."""
    if report.verdict != "NotStrong":
        return True
    w = report.witnesses
    idx = w.get("indices", [])
    t = np.abs(data.nodes)
    d = data.gaps
    mu = data.masses
    if report.case == "I":
        seq = mu[idx]
        return bool(np.all(np.diff(seq) < 0) and seq[-1] <= seq[0] / 8.0)
    if report.case == "III":
        return all(d[i] <= t[i] ** -2.0 for i in idx)
    if report.case == "II":
        ratios = d[idx] / t[idx]
        return bool(ratios[-1] <= 0.5 and ratios[0] <= 0.5)
    if report.case == "IV":
        consts = comparison_constants(data)
        return all(consts[i] >= 2.0 * w["C_head"] for i in idx)
    return False
