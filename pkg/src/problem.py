"""
Problem files
Pydantic models for the JSON problem format and construction of rings, distributions and maps
"""

import json
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator, validator

from src.diffmod import Distribution, OneForm, VectorField
from src.foliation import RingMorphism
from src.logger import get_logger
from src.poly import IDENTIFIER, Poly, PolyRing


logger = get_logger(__name__)


class ProblemError(ValueError):
    """Raised when a well-formed problem file describes an unusable problem"""


class RingSpec(BaseModel):
    """Ambient ring: variables and inverted denominators"""
    variables: List[str]
    inverted: List[str] = Field(default_factory=list)
    order: str = "grevlex"

    @validator('variables')
    def validate_variables(cls, v):
        """Validate variable names are distinct identifiers"""
        if not v:
            raise ValueError("at least one variable is required")
        if len(set(v)) != len(v):
            raise ValueError(f"variable names must be distinct: {v}")
        for name in v:
            if not IDENTIFIER.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
        return v


class DistributionSpec(BaseModel):
    """Relation one-forms or tangent vector fields, each a map variable -> expression"""
    one_forms: Optional[List[Dict[str, str]]] = None
    vector_fields: Optional[List[Dict[str, str]]] = None

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.one_forms is None) == (self.vector_fields is None):
            raise ValueError("give exactly one of one_forms or vector_fields")
        return self


class OptionsSpec(BaseModel):
    """Per-problem overrides of the search and probe configuration"""
    degree_bound: Optional[int] = Field(default=None, ge=0)
    d_alg: Optional[int] = Field(default=None, ge=1)
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None


class ProblemSpec(BaseModel):
    """A problem file"""
    name: str = ""
    ring: RingSpec
    distribution: DistributionSpec
    charts: List[str] = Field(default_factory=list)
    options: OptionsSpec = Field(default_factory=OptionsSpec)

    @model_validator(mode="after")
    def keys_are_variables(self):
        variables = set(self.ring.variables)
        entries = self.distribution.one_forms or self.distribution.vector_fields or []
        for entry in entries:
            unknown = sorted(set(entry) - variables)
            if unknown:
                raise ValueError(f"unknown variables {unknown} in distribution")
        return self


class MapSpec(BaseModel):
    """A ring map into the problem ring: source variables and their images"""
    source: List[str]
    images: Dict[str, str]

    @model_validator(mode="after")
    def images_cover_source(self):
        if set(self.images) != set(self.source):
            raise ValueError(f"images must be given for exactly {self.source}")
        return self


def _read_json(path: str) -> dict:
    file = Path(path)
    if not file.exists():
        raise FileNotFoundError(f"Problem file not found: {path}")
    with file.open('r') as f:
        return json.load(f)


def load_problem(path: str) -> ProblemSpec:
    """
    Load and validate a problem file

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If the JSON or its structure is invalid
    """
    spec = ProblemSpec(**_read_json(path))
    logger.debug(f"loaded problem {spec.name or path} over {spec.ring.variables}")
    return spec


def load_map(path: str) -> MapSpec:
    return MapSpec(**_read_json(path))


def build_ring(spec: ProblemSpec) -> PolyRing:
    """The ambient ring; inverted denominators are parsed in the plain ring"""
    plain = PolyRing(spec.ring.variables, order=spec.ring.order)
    inverted = [plain.poly(text) for text in spec.ring.inverted]
    if any(f.is_zero for f in inverted):
        raise ProblemError("inverted denominators must be nonzero")
    return PolyRing(spec.ring.variables, inverted, spec.ring.order)


def build_distribution(spec: ProblemSpec, ring: PolyRing) -> Distribution:
    """
    One-forms become the relation module; vector fields are dualized on load

    Raises:
        ParseError: an expression does not parse
    """
    if spec.distribution.one_forms is not None:
        forms = [OneForm(ring, entry) for entry in spec.distribution.one_forms]
        return Distribution(ring, forms)
    fields = [VectorField(ring, entry) for entry in spec.distribution.vector_fields]
    return Distribution.from_vector_fields(ring, fields)


def chart_denominators(spec: ProblemSpec, ring: PolyRing) -> List[Poly]:
    """Chart denominators in file order; the whole space when none are listed"""
    denominators = [ring.poly(text) for text in spec.charts] or [ring.one]
    for text, f in zip(spec.charts, denominators):
        if f.is_zero:
            raise ProblemError(f"chart denominator {text!r} is zero")
    return denominators


def build_map(spec: MapSpec, source: PolyRing, target: PolyRing) -> RingMorphism:
    return RingMorphism(source, target, {v: target.poly(spec.images[v]) for v in spec.source})


def map_source(spec: MapSpec) -> PolyRing:
    return PolyRing(spec.source)
