# colorlab/schemas.py
"""
Pydantic schemas for the file formats colorlab reads
Includes: the JSON instance document and the experiment configuration
"""
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

RationalText = Union[str, int]


class EdgeDocument(BaseModel):
    u: str = Field(..., description="First endpoint")
    v: str = Field(..., description="Second endpoint")
    color: str = Field(..., description="Color id; must appear in bounds")
    profit: RationalText = Field("1/1", description="Exact profit as 'p/q'")


class InstanceDocument(BaseModel):
    """JSON instance format; rationals are 'num/den' strings, never floats"""
    vertices: List[str] = Field(..., description="Ordered vertex ids")
    edges: List[EdgeDocument] = Field(default_factory=list)
    bounds: Dict[str, RationalText] = Field(..., description="Color id -> w_j as 'p/q'")
    bipartition: Optional[List[List[str]]] = Field(None, description="Optional [[left...], [right...]]")
    name: Optional[str] = Field(None, description="Instance label used in reports")

    @field_validator("bipartition")
    @classmethod
    def two_sides(cls, value):
        if value is not None and len(value) != 2:
            raise ValueError("bipartition must have exactly two sides")
        return value


Operation = Literal["validate", "lp", "sa", "candidate", "cert", "bichrom", "gap", "latin"]
FamilyName = Literal["hypercube", "c4chain", "cyclic", "cyclic_square", "exemplar", "rainbow_c4"]


class ItemConfig(BaseModel):
    """One batch item: an instance source plus the pipelines to run on it"""
    name: Optional[str] = Field(None, description="Label for artifacts; defaults to the source")
    file: Optional[str] = Field(None, description="Path to a JSON instance")
    family: Optional[FamilyName] = Field(None, description="Generator family")
    param: Optional[Union[int, Literal["left", "right"]]] = Field(None, description="ℓ, k or exemplar side")
    eps: Optional[str] = Field(None, description="ε as 'p/q' for the hypercube family")
    operations: List[Operation] = Field(default_factory=lambda: ["gap"])
    sa_levels: List[int] = Field(default_factory=list, description="SA levels for gap/sa pipelines")
    expect: Dict[str, str] = Field(default_factory=dict, description="Expected exact values, checked after the run")

    @model_validator(mode="after")
    def one_source(self):
        if (self.file is None) == (self.family is None):
            raise ValueError("exactly one of 'file' or 'family' must be given")
        return self


class ExperimentConfig(BaseModel):
    """Batch experiment: items, sweeps, outputs and budgets"""
    items: List[ItemConfig] = Field(..., min_length=1)
    eps_sweep: List[str] = Field(default_factory=list, description="ε values for hypercube sweeps")
    output_dir: str = Field("results", description="Directory for JSON/CSV artifacts")
    csv_name: str = Field("gap_report.csv", description="Merged CSV file name")
    sa_budget: Optional[int] = Field(None, gt=0, description="Lifted-variable budget for SA lifts")
    mu_limit: Optional[int] = Field(None, gt=0, description="Exhaustive matching/packing limit")
    ilp_limit: Optional[int] = Field(None, gt=0, description="Colorful matching DFS edge limit")
    broker_url: Optional[str] = Field(None, description="Celery broker; unset runs items in-process")

    def resolve_files(self, base: Path) -> List[Path]:
        """Item files resolved against base; used for the existence check at parse time"""
        return [
            (Path(item.file) if Path(item.file).is_absolute() else base / item.file)
            for item in self.items if item.file is not None
        ]


SCHEMAS = {
    "instance.schema.json": InstanceDocument,
    "experiment_config.schema.json": ExperimentConfig,
}
