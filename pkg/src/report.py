"""
Result documents
Pydantic models for the JSON the command-line front end writes, with canonical rendering
"""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from src.verdicts import Verdict


SCHEMA_VERSION = 1


class VerdictReport(BaseModel):
    """A verdict with its witness"""
    status: str
    witness: Dict[str, Any] = Field(default_factory=dict)
    detail: str = ""

    @classmethod
    def of(cls, verdict: Verdict) -> "VerdictReport":
        return cls(status=verdict.status, witness=verdict.witness, detail=verdict.detail)


class Report(BaseModel):
    """Base document: every output carries the schema version and problem name"""
    schema_version: int = SCHEMA_VERSION
    problem: str = ""
    command: str

    def render(self) -> str:
        return render(self)


class InvolutivityReport(Report):
    command: str = "involutive"
    ring: str
    rank: int
    corank: int
    verdict: VerdictReport


class AlgebraReport(Report):
    command: str = "first-integrals"
    chart: Optional[str] = None
    ring: str
    degree_bound: int
    generators: List[str]
    tags: List[str]
    relations: List[str]
    complete: bool
    transcendence_degree: int
    checks: Dict[str, VerdictReport] = Field(default_factory=dict)


class InvarianceReport(Report):
    command: str = "invariance"
    images: Dict[str, str]
    verdict: VerdictReport


class CertificateReport(BaseModel):
    chart: str
    denominator: str
    generators: List[str]
    smooth: VerdictReport
    relative_dimension: VerdictReport
    connected_fibres: VerdictReport
    invariant: VerdictReport
    overall: str
    trusted: List[str]


class StabilityReport(Report):
    command: str = "stability"
    certificate: CertificateReport


class TransitionReport(BaseModel):
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    overlap_generators: List[str]
    localizer_from: str
    localizer_to: str
    images: Dict[str, str]

    model_config = {"populate_by_name": True}


class ChartReport(BaseModel):
    id: str
    denominator: str
    generators: List[str]
    tags: List[str]
    relations: List[str]
    certificate: str


class AtlasReport(Report):
    command: str = "quotient"
    charts: List[ChartReport]
    transitions: List[TransitionReport]
    disjoint: List[List[str]]
    chart_checks: Dict[str, Dict[str, VerdictReport]]
    cocycle_ok: bool
    cocycle_witness: Optional[Dict[str, Any]] = None
    separated: VerdictReport
    classification: str


class LeafReportDocument(Report):
    command: str = "leaf"
    chart: str
    point: List[str]
    ideal: List[str]
    dimension: int
    expected_dimension: int
    smooth: bool
    irreducible: str
    tangent: bool
    leaf: bool


class ErrorReport(Report):
    command: str = "error"
    error: str
    message: str
    position: Optional[int] = None


def render(report: BaseModel) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline"""
    return json.dumps(report.model_dump(by_alias=True), sort_keys=True, indent=2) + "\n"
