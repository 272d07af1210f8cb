"""Spectral data model: node/mass sequences, tail models, generators, JSON.

A de Branges-type space is identified here by its atomic spectral data:
a strictly increasing real node sequence t (0 excluded) with positive
masses mu, such that sum mu_n / (t_n^2 + 1) converges.  Finite prefixes
stand in for infinite sequences; the ``tail`` tag declares the idealized
continuation beyond the stored prefix so that every tail-sensitive
computation can state what it assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergentTail,
    EmptySelection,
    InvalidExponent,
    InvalidRatio,
    ValidationError,
)

TAIL_KINDS = ("none", "geometric", "power")


@dataclass(frozen=True)
class Tail:
    """Idealized continuation of the data beyond the stored prefix.

    geometric: nodes continue by factor ``ratio`` (> 1), masses by factor
    ``mass_ratio`` per step, starting from the outermost stored node.
    power: nodes continue along t_K * ((K+j)/K)**exponent with masses
    held constant at the outermost stored mass.
    """

    kind: str = "none"
    ratio: float | None = None
    mass_ratio: float | None = None
    exponent: float | None = None


@dataclass(frozen=True)
class SpectralData:
    """Validated spectral data (T, mu) plus its declared tail model.

    ``origin`` marks the index of the first nonnegative node for
    two-sided grids; None means the grid is treated as one-sided.
    """

    t: tuple
    mu: tuple
    tail: Tail = field(default_factory=Tail)
    origin: int | None = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def nodes(self) -> np.ndarray:
        return np.asarray(self.t, dtype=float)

    @property
    def masses(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=float)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.nodes)


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients of a space element in the orthogonal node basis."""

    a: tuple

    def __len__(self) -> int:
        return len(self.a)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.a)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def coefficients(values) -> CoefficientVector:
    vals = [complex(v) if isinstance(v, complex) else float(v) for v in np.asarray(values).tolist()]
    return CoefficientVector(tuple(vals))


def _tail_checks(t, mu, tail: Tail):
    """Return the list of violations contributed by the tail declaration."""
    bad = []
    if tail.kind not in TAIL_KINDS:
        bad.append(("DivergentTail", f"unknown tail kind {tail.kind!r}"))
        return bad
    if tail.kind == "geometric":
        if tail.ratio is None or tail.ratio <= 1:
            bad.append(("DivergentTail", "geometric tail needs node ratio > 1"))
        if tail.mass_ratio is None or tail.mass_ratio <= 0:
            bad.append(("DivergentTail", "geometric tail needs mass_ratio > 0"))
        if tail.ratio and tail.mass_ratio and tail.mass_ratio >= tail.ratio**2:
            # sum mu_n / t_n^2 over the tail is geometric with ratio
            # mass_ratio / ratio^2; it must converge.
            bad.append(
                (
                    "DivergentTail",
                    "geometric tail diverges: mass_ratio >= ratio^2",
                )
            )
    elif tail.kind == "power":
        if tail.exponent is None or tail.exponent <= 0.5:
            # constant-mass continuation needs node exponent > 1/2 for
            # sum mu_n / t_n^2 to converge
            bad.append(("DivergentTail", "power tail needs exponent > 1/2"))
    return bad


def validate(t, mu, tail: Tail | None = None, origin: int | None = None) -> SpectralData:
    """Check all invariants for raw node/mass lists and build SpectralData.

    Raises ValidationError carrying every violated invariant; codes are
    NonIncreasingNodes, ZeroNode, NonPositiveMass, DivergentTail.
    """
    tail = tail or Tail()
    violations = []
    t = [float(x) for x in t]
    mu = [float(x) for x in mu]
    if not t or not mu:
        violations.append(("NonIncreasingNodes", "node/mass lists must be nonempty"))
    if len(t) != len(mu):
        violations.append(("NonPositiveMass", "node and mass lists differ in length"))
    if any(x == 0.0 for x in t):
        violations.append(("ZeroNode", "node at 0"))
    if any(b <= a for a, b in zip(t, t[1:])):
        violations.append(("NonIncreasingNodes", "nodes not strictly increasing"))
    if any(m <= 0 or not math.isfinite(m) for m in mu):
        violations.append(("NonPositiveMass", "non-positive or non-finite mass"))
    if any(not math.isfinite(x) for x in t):
        violations.append(("NonIncreasingNodes", "non-finite node"))
    violations.extend(_tail_checks(t, mu, tail))
    if origin is not None and t and not (0 <= origin <= len(t)):
        violations.append(("NonIncreasingNodes", "origin outside index range"))
    if violations:
        raise ValidationError(violations)
    return SpectralData(tuple(t), tuple(mu), tail, origin)


# ---------------------------------------------------------------------------
# mass rules for the generators


def _masses(rule, t):
    """Evaluate a mass rule on a node list.

    Accepted forms: "const:c", "prop-t", "t2-over:p" (mu_n = t_n^2 / n^p),
    or an explicit list of positive numbers.
    """
    if isinstance(rule, (list, tuple, np.ndarray)):
        vals = [float(x) for x in rule]
        if len(vals) != len(t):
            raise ValidationError([("NonPositiveMass", "custom mass list has wrong length")])
        return vals
    if isinstance(rule, str):
        if rule.startswith("const:"):
            c = float(rule.split(":", 1)[1])
            return [c] * len(t)
        if rule == "prop-t":
            return [abs(x) for x in t]
        if rule.startswith("t2-over:"):
            p = float(rule.split(":", 1)[1])
            return [x * x / (n + 1) ** p for n, x in enumerate(t)]
    raise ValidationError([("NonPositiveMass", f"unknown mass rule {rule!r}")])


def _tail_mass_ratio(rule, q, count):
    """Asymptotic per-step mass ratio implied by a rule on a q-geometric grid.

    For the t^2/n^p rule the true step ratio increases towards q^2; we
    declare the next-step ratio, which over-estimates the tail mass sum
    and therefore keeps convergence verdicts conservative.
    """
    if isinstance(rule, str):
        if rule.startswith("const:"):
            return 1.0
        if rule == "prop-t":
            return q
        if rule.startswith("t2-over:"):
            p = float(rule.split(":", 1)[1])
            return q * q * (count / (count + 1)) ** p
    return None


def gen_lacunary(ratio: float, count: int, mass_rule="const:1", t1: float = 1.0) -> SpectralData:
    """Geometric node grid t_n = t1 * ratio^(n-1) with masses per rule."""
    if ratio <= 1:
        raise InvalidRatio(f"lacunary ratio must exceed 1, got {ratio}")
    if count < 1:
        raise InvalidRatio("count must be >= 1")
    t = [t1 * ratio ** n for n in range(count)]
    mu = _masses(mass_rule, t)
    rho = _tail_mass_ratio(mass_rule, ratio, count)
    if rho is None:
        tail = Tail()
    else:
        tail = Tail(kind="geometric", ratio=float(ratio), mass_ratio=rho)
    return validate(t, mu, tail)


def gen_power_separated(exponent: float, count: int, mass_rule="const:1") -> SpectralData:
    """Polynomial node grid t_n = n^exponent, n = 1..count."""
    if exponent <= 0:
        raise InvalidExponent(f"exponent must be positive, got {exponent}")
    if count < 1:
        raise InvalidExponent("count must be >= 1")
    t = [float(n) ** exponent for n in range(1, count + 1)]
    if any(b <= a for a, b in zip(t, t[1:])):
        raise InvalidExponent("node grid collides after rounding")
    mu = _masses(mass_rule, t)
    tail = Tail(kind="power", exponent=float(exponent)) if exponent > 0.5 else Tail()
    return validate(t, mu, tail)


def restrict(data: SpectralData, index_set) -> SpectralData:
    """Sub-data (T°, mu°) over the given indices, order preserved.

    The complement is recoverable via restriction_complement; lifting a
    certificate back to the full grid needs the index set, so callers
    keep it alongside the sub-data.
    """
    idx = sorted(set(int(i) for i in index_set))
    if not idx:
        raise EmptySelection("empty index selection")
    if idx[0] < 0 or idx[-1] >= len(data):
        raise EmptySelection(f"indices out of range 0..{len(data) - 1}")
    t = [data.t[i] for i in idx]
    mu = [data.mu[i] for i in idx]
    tail = data.tail if idx[-1] == len(data) - 1 else Tail()
    return validate(t, mu, tail)


def restriction_complement(data: SpectralData, index_set):
    """Indices of T \\ T° for a selection made by restrict."""
    chosen = set(int(i) for i in index_set)
    return tuple(i for i in range(len(data)) if i not in chosen)


# ---------------------------------------------------------------------------
# closed-form tail sums


@dataclass(frozen=True)
class TailSums:
    """Closed-form series contributions of the declared tail.

    mass: sum of tail masses (may be inf); mass_over_t2: sum of tail
    mu/t^2; known: False when tail kind is "none" and nothing can be said.
    """

    mass: float
    mass_over_t2: float
    known: bool


def tail_sums(data: SpectralData) -> TailSums:
    tail = data.tail
    if tail.kind == "none" or len(data) == 0:
        return TailSums(0.0, 0.0, False)
    t_edge = max(abs(data.t[0]), abs(data.t[-1]))
    mu_edge = data.mu[-1] if abs(data.t[-1]) >= abs(data.t[0]) else data.mu[0]
    if tail.kind == "geometric":
        q, rho = tail.ratio, tail.mass_ratio
        mass = mu_edge * rho / (1 - rho) if rho < 1 else math.inf
        x = rho / (q * q)
        over_t2 = (mu_edge / t_edge**2) * x / (1 - x)
        return TailSums(mass, over_t2, True)
    # power tail: constant masses, nodes t_edge * ((K+j)/K)^p
    p = tail.exponent
    k = len(data)
    # integral upper bound for sum_{m>K} (m/K)^(-2p)
    over_t2 = (mu_edge / t_edge**2) * k / (2 * p - 1)
    return TailSums(math.inf, over_t2, True)


# ---------------------------------------------------------------------------
# JSON schema: exact field names, unknown fields rejected

_TOP_FIELDS = {"t", "mu", "tail", "origin"}
_TAIL_FIELDS = {"kind", "ratio", "mass_ratio", "exponent"}


def data_to_dict(data: SpectralData) -> dict:
    tail = {"kind": data.tail.kind}
    for name in ("ratio", "mass_ratio", "exponent"):
        value = getattr(data.tail, name)
        if value is not None:
            tail[name] = value
    out = {"t": list(data.t), "mu": list(data.mu), "tail": tail}
    if data.origin is not None:
        out["origin"] = data.origin
    return out


def data_from_dict(obj: dict) -> SpectralData:
    if not isinstance(obj, dict):
        raise ValidationError([("NonIncreasingNodes", "spectral data must be a JSON object")])
    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise ValidationError([("NonIncreasingNodes", f"unknown fields {sorted(unknown)}")])
    if "t" not in obj or "mu" not in obj:
        raise ValidationError([("NonIncreasingNodes", "fields t and mu are required")])
    tail_obj = obj.get("tail", {"kind": "none"})
    unknown = set(tail_obj) - _TAIL_FIELDS
    if unknown:
        raise ValidationError([("DivergentTail", f"unknown tail fields {sorted(unknown)}")])
    tail = Tail(
        kind=tail_obj.get("kind", "none"),
        ratio=tail_obj.get("ratio"),
        mass_ratio=tail_obj.get("mass_ratio"),
        exponent=tail_obj.get("exponent"),
    )
    return validate(obj["t"], obj["mu"], tail, obj.get("origin"))
