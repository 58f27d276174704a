"""Run configuration for the command-line front end."""

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from core.config import get_settings
from formal.scalars import GaussianRational, parse_gaussian

settings = get_settings()

Subcommand = Literal[
    "coeffs",
    "verify-algebra",
    "verify-recursion",
    "verify-trivialisation",
    "verify-forms",
    "landau",
]

Experiment = Literal[
    "commutation",
    "dtdelta",
    "first-step",
    "decay",
    "flatness",
    "trivialisation",
    "obstruction",
    "symbols",
    "spectrum",
]

DEFAULT_S_GRID = [2.0 ** n for n in range(4, 11)]


class RunConfig(BaseModel):
    """Parameters of one invocation; embedded verbatim in every report."""

    subcommand: Subcommand
    experiment: Optional[Experiment] = None

    k: int = Field(default_factory=lambda: settings.default_level, ge=1)
    max_order: int = Field(default=4, ge=0, le=40)
    adiff_order: Optional[int] = Field(default=None, ge=1, le=40)
    N: int = Field(default_factory=lambda: settings.basis_cutoff, ge=4)

    sigma: List[float] = Field(default_factory=lambda: [0.0, 1.0], min_length=2, max_length=2)
    sigma_end: List[float] = Field(default_factory=lambda: [1.0, 1.0], min_length=2, max_length=2)
    direction: List[float] = Field(default_factory=lambda: [1.0, 0.0], min_length=2, max_length=2)
    second_direction: List[float] = Field(default_factory=lambda: [0.0, 1.0], min_length=2, max_length=2)

    s: float = Field(default=4.0)
    s_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_S_GRID), min_length=2)
    h: float = Field(default_factory=lambda: settings.fd_step, gt=0)
    h_mixed: float = Field(default_factory=lambda: settings.fd_step_mixed, gt=0)
    step: float = Field(default=1e-2, gt=0, le=0.5)

    f: Union[str, List[List[float]]] = "x"

    diagonal: Literal["zero", "random"] = "zero"
    diagonal_values: Optional[List[str]] = None
    random_tables: int = Field(default=3, ge=0)

    seed: int = Field(default_factory=lambda: settings.random_seed)
    samples: int = Field(default=200, ge=1)
    numeric: bool = False
    output_dir: str = Field(default_factory=lambda: settings.output_dir)

    @field_validator("sigma", "sigma_end")
    @classmethod
    def validate_upper_half_plane(cls, v):
        if v[1] <= 0:
            raise ValueError(f"Teichmueller point must have positive imaginary part, got {v}")
        return v

    @field_validator("s_grid")
    @classmethod
    def validate_s_grid(cls, v):
        if any(s <= 0 for s in v):
            raise ValueError("s_grid values must be positive")
        return sorted(v)

    @field_validator("f")
    @classmethod
    def validate_f(cls, v):
        if isinstance(v, list) and any(len(term) != 3 for term in v):
            raise ValueError("f terms must be [i, j, c] triples")
        return v

    @field_validator("diagonal_values")
    @classmethod
    def validate_diagonal_values(cls, v):
        if v is not None:
            for text in v:
                parse_gaussian(text)
        return v

    @model_validator(mode="after")
    def validate_subcommand(self):
        if self.subcommand == "landau" and self.experiment is None:
            raise ValueError("landau runs need an experiment")
        if self.diagonal_values is not None and len(self.diagonal_values) < self.max_order:
            raise ValueError(f"diagonal_values needs {self.max_order} entries, got {len(self.diagonal_values)}")
        return self

    @property
    def sigma_point(self) -> complex:
        return complex(*self.sigma)

    @property
    def sigma_end_point(self) -> complex:
        return complex(*self.sigma_end)

    @property
    def V(self) -> complex:
        return complex(*self.direction)

    @property
    def W(self) -> complex:
        return complex(*self.second_direction)

    def explicit_diagonal(self) -> Optional[List[GaussianRational]]:
        if self.diagonal_values is None:
            return None
        return [parse_gaussian(text) for text in self.diagonal_values[: self.max_order]]
