"""Dependence coefficients and variance quantities for the model families.

The coefficients gamma_k bound |Cov(f(X_I), g(X_J))| by
||f|| ||g|| sum_{i,j} gamma_{|i-j|} over all Lipschitz pairs (f, g) on
disjoint index sets.  For a moving average the exact envelope is the
absolute-coefficient convolution through the shared innovations; raw
signed covariances can understate the supremum, the envelope cannot.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .models import IID, CumSumTransform, ModelSpec, MovingAverage, is_stationary, sample_path


@dataclass(frozen=True)
class FiniteGamma:
    """Finitely supported coefficients gamma_1..gamma_K (empty means independence)."""

    values: tuple[float, ...]
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if any(v < 0 for v in self.values):
            raise ValueError("dependence coefficients must be nonnegative")

    def gamma(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"coefficient index must be >= 1, got {k}")
        return self.values[k - 1] if k <= len(self.values) else 0.0

    def tail_sum(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"tail index must be >= 1, got {n}")
        return float(sum(self.values[n - 1 :]))

    def total(self) -> float:
        return float(sum(self.values))


@dataclass(frozen=True)
class GeometricGamma:
    """gamma_k = amplitude * rate^k; closed-form tails amplitude*rate^n/(1-rate)."""

    amplitude: float
    rate: float
    note: str = ""

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if not 0.0 < self.rate < 1.0:
            raise ValueError(f"rate must lie in (0, 1), got {self.rate}")

    def gamma(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"coefficient index must be >= 1, got {k}")
        return self.amplitude * self.rate ** k

    def tail_sum(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"tail index must be >= 1, got {n}")
        return self.amplitude * self.rate ** n / (1.0 - self.rate)

    def total(self) -> float:
        return self.tail_sum(1)


GammaSequence = Union[FiniteGamma, GeometricGamma]


def gamma_to_json(gamma: GammaSequence) -> str:
    if isinstance(gamma, FiniteGamma):
        return json.dumps({"variant": "finite", "values": list(gamma.values), "note": gamma.note})
    return json.dumps(
        {"variant": "geometric", "amplitude": gamma.amplitude, "rate": gamma.rate, "note": gamma.note}
    )


def gamma_from_json(text: str) -> GammaSequence:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed coefficient JSON: {exc}") from exc
    variant = d.get("variant")
    if variant == "finite":
        return FiniteGamma(values=tuple(d["values"]), note=d.get("note", ""))
    if variant == "geometric":
        return GeometricGamma(amplitude=d["amplitude"], rate=d["rate"], note=d.get("note", ""))
    raise ValueError(f"unknown coefficient variant {variant!r}")


def gamma_sequence(model: ModelSpec) -> FiniteGamma:
    """Exact dependence coefficients of an i.i.d. or moving-average model.

    Moving average with coefficients a_1..a_p:
        gamma_k = sigma_xi^2 * sum_j |a_j a_{j+k}|,  1 <= k <= p-1,
    zero beyond; the i.i.d. case is the empty sequence.
    """
    if isinstance(model, IID):
        return FiniteGamma(values=(), note="iid")
    if isinstance(model, MovingAverage):
        a = model.coeffs
        p = len(a)
        s2 = model.law.variance
        values = tuple(
            s2 * sum(abs(a[j] * a[j + k]) for j in range(p - k)) for k in range(1, p)
        )
        return FiniteGamma(values=values, note=f"moving_average(p={p}) envelope")
    raise ValueError("cumulative-sum models have no stationary coefficient sequence")


def cox_grimmett(gamma: GammaSequence, n: int) -> float:
    """Tail sum v(n) = sum_{k >= n} gamma_k."""
    return gamma.tail_sum(n)


def total_dependence(gamma: GammaSequence) -> float:
    """D = sum_{k >= 1} gamma_k = v(1)."""
    return gamma.total()


def newman_discrepancy_bound(gamma: GammaSequence, n: int, t: float) -> float:
    """Bound 4 t^2 sum_{j=1}^{n-1} (n - j) gamma_j on the gap between the
    joint characteristic function of (X_1..X_n) and the product of marginals."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return 4.0 * t * t * sum((n - j) * gamma.gamma(j) for j in range(1, n))


@dataclass(frozen=True)
class VarianceEstimate:
    """Long-run variance sigma^2 = lim E S_n^2 / n with provenance."""

    sigma2: float
    method: str  # "analytic" | "monte_carlo"
    standard_error: Optional[float] = None
    n: Optional[int] = None
    replicates: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"long-run variance must be finite and positive, got {self.sigma2}")


def long_run_variance(
    model: ModelSpec,
    method: str = "analytic",
    n: int = 4096,
    replicates: int = 10_000,
    seed: int = 0,
) -> VarianceEstimate:
    """Long-run variance sigma^2 of a stationary model.

    Analytic for i.i.d. / moving-average models: sigma^2 = sigma_xi^2 (sum_j a_j)^2.
    The Monte Carlo route averages S_n^2 / n across replicates (defaults
    n = 2^12, replicates = 10^4) and reports a standard error; a degenerate
    or nonpositive estimate is an error, not a value.
    """
    if isinstance(model, CumSumTransform):
        raise ValueError("cumulative-sum models are nonstationary; no long-run variance")
    if method == "analytic":
        if isinstance(model, IID):
            sigma2 = model.law.variance
        else:
            total = sum(model.coeffs)
            sigma2 = model.law.variance * total * total
        if sigma2 <= 0:
            raise ValueError(f"degenerate model: long-run variance {sigma2} is not in (0, inf)")
        return VarianceEstimate(sigma2=sigma2, method="analytic")
    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")
    vals = np.empty(replicates)
    for r in range(replicates):
        s = sample_path(model, n, [seed, r]).values.sum()
        vals[r] = s * s / n
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(replicates))
    if est <= 0:
        raise ValueError(f"monte carlo long-run variance estimate {est} is not positive")
    return VarianceEstimate(sigma2=est, method="monte_carlo", standard_error=se, n=n, replicates=replicates)


def _jackknife_se(values: np.ndarray) -> float:
    """Delete-one jackknife standard error of the mean statistic."""
    values = np.asarray(values, dtype=float)
    r = len(values)
    if r < 2:
        return float("nan")
    loo = (values.sum() - values) / (r - 1)
    return float(math.sqrt((r - 1) / r * np.sum((loo - loo.mean()) ** 2)))


def empirical_covariance(
    model: ModelSpec, lag: int, n: int, replicates: int, seed: int = 0
) -> tuple[float, float]:
    """Across-replicate estimate of Cov(X_1, X_{1+lag}) with jackknife SE.

    Each replicate contributes the lag-product mean pooled over the path
    (the variables are centered by construction, so no mean subtraction).
    """
    if n <= lag:
        raise ValueError(f"need n > lag, got n={n}, lag={lag}")
    if not is_stationary(model):
        raise ValueError("empirical covariance requires a stationary model")
    per_rep = np.empty(replicates)
    for r in range(replicates):
        x = sample_path(model, n, [seed, r]).values
        if lag == 0:
            per_rep[r] = float(np.mean(x * x))
        else:
            per_rep[r] = float(np.mean(x[:-lag] * x[lag:]))
    return float(per_rep.mean()), _jackknife_se(per_rep)
