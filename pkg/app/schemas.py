"""Pydantic schemas describing scheme parameters and every serialized result."""
from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, confloat, conint, model_validator

Family = Literal["primal_even", "dual_even", "primal_odd", "dual_odd"]

FAMILY_ALIASES: Dict[str, str] = {
    "primal-even": "primal_even",
    "dual-even": "dual_even",
    "primal-odd": "primal_odd",
    "dual-odd": "dual_odd",
}


def normalize_family(name: str) -> str:
    key = name.strip().lower()
    return FAMILY_ALIASES.get(key, key)


class SchemeSpec(BaseModel):
    """Family selector, locality n and fitting degree of a least squares scheme.

    Even families use 2n data points per rule, odd families 2n+1.
    """

    family: Family = Field(..., description="primal/dual evaluation with 2n or 2n+1 point stencils.")
    n: conint(ge=1) = Field(..., description="Locality parameter.")
    degree: conint(ge=1) = Field(1, description="Degree of the least squares polynomials.")

    class Config:
        extra = "forbid"
        frozen = True

    @model_validator(mode="before")
    @classmethod
    def _accept_cli_family_names(cls, data):
        if isinstance(data, dict) and isinstance(data.get("family"), str):
            data = {**data, "family": normalize_family(data["family"])}
        return data

    @model_validator(mode="after")
    def _check_degree_bound(self) -> "SchemeSpec":
        if self.degree > self.max_degree:
            raise ValueError(
                f"{self.family} with n={self.n} requires degree < {self.max_degree + 1}, got {self.degree}"
            )
        return self

    @property
    def is_primal(self) -> bool:
        return self.family.startswith("primal")

    @property
    def is_dual(self) -> bool:
        return self.family.startswith("dual")

    @property
    def is_odd(self) -> bool:
        return self.family.endswith("odd")

    @property
    def point_count(self) -> int:
        return 2 * self.n + 1 if self.is_odd else 2 * self.n

    @property
    def max_degree(self) -> int:
        return self.point_count - 1

    @property
    def support(self) -> tuple[int, int]:
        """Index range of the mask, which is also the support of the basic limit function."""
        n = self.n
        return {
            "primal_even": (-(2 * n - 1), 2 * n - 1),
            "dual_even": (-2 * n, 2 * n - 1),
            "primal_odd": (-2 * n, 2 * n),
            "dual_odd": (-(2 * n + 1), 2 * n),
        }[self.family]

    def label(self) -> str:
        return f"{self.family}(n={self.n}, d={self.degree})"


class MaskRecord(BaseModel):
    family: Optional[Family] = None
    n: Optional[int] = None
    degree: Optional[int] = None
    first_index: int
    numerators: Optional[List[int]] = None
    denominator: Optional[int] = None
    coefficients: Optional[List[float]] = None

    class Config:
        extra = "forbid"


class RegularityReport(BaseModel):
    """Hölder regularity lower bound ν = m − log2(‖S_b^L‖_∞)/L."""

    family: Optional[Family] = None
    n: Optional[int] = None
    degree: Optional[int] = None
    m: conint(ge=0)
    L: conint(ge=1)
    iterated_norm: confloat(gt=0.0)
    lower_bound: float

    class Config:
        extra = "forbid"


class NoiseModel(BaseModel):
    """Independent normal noise with standard deviation ``sigma`` from a seeded generator."""

    sigma: confloat(ge=0.0) = 0.0
    seed: int = 42

    class Config:
        extra = "forbid"
        frozen = True


class PsiStats(BaseModel):
    degree: Optional[int] = None
    n: Optional[int] = None
    min: float
    max: float
    integral: float
    grid_step: confloat(gt=0.0)

    class Config:
        extra = "forbid"


class ErrorDecomposition(BaseModel):
    """σ²ψ(x) plus squared deterministic bias at one abscissa."""

    x: float
    sigma: confloat(ge=0.0)
    variance_term: confloat(ge=0.0)
    bias_sq_term: confloat(ge=0.0)
    total: float

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def _total_is_sum(self) -> "ErrorDecomposition":
        if self.total != self.variance_term + self.bias_sq_term:
            raise ValueError("total must equal variance_term + bias_sq_term")
        return self


class ConjectureReport(BaseModel):
    K: int
    rows: List[PsiStats]
    max_decreasing_in_n: Dict[int, bool] = Field(
        default_factory=dict, description="Per degree: max ψ strictly decreases as n grows."
    )
    integral_increasing_in_d: Dict[int, bool] = Field(
        default_factory=dict, description="Per n: ∫ψ strictly increases as the degree grows."
    )

    class Config:
        extra = "forbid"


class BandwidthReport(BaseModel):
    bandwidth: confloat(gt=0.0)
    candidates: List[float]
    loo_scores: List[Optional[float]]
    policy: str = "leave-one-out cross-validation, ties to the smaller bandwidth"

    class Config:
        extra = "forbid"


class DenoiseErrors(BaseModel):
    function_id: str
    sigma: float
    seed: int
    spec: SchemeSpec
    limit_l2: float
    llr_l2: Optional[float] = None
    llr_bandwidth: Optional[float] = None

    class Config:
        extra = "forbid"


class ExperimentManifest(BaseModel):
    """Everything needed to re-run one command into a fresh directory."""

    command: str
    argv: List[str]
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    grid: Dict[str, float] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    version: str

    class Config:
        extra = "forbid"


class MaskRequest(BaseModel):
    family: str
    n: conint(ge=1)
    degree: conint(ge=1) = 1

    class Config:
        extra = "forbid"


class RegularityRequest(MaskRequest):
    L: conint(ge=1, le=24) = 16


class PsiStatsRequest(MaskRequest):
    K: conint(ge=9, le=14) = 10


class MaskResponse(BaseModel):
    record: MaskRecord
    fraction: Optional[str] = None
