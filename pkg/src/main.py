"""
Main application orchestrator
Coordinates problem loading, first-integral searches, certification and gluing
"""

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.config import Config, load_config
from src.diffmod import Distribution, saturate_torsion
from src.first_integrals import (
    FirstIntegralAlgebra,
    closedness_probe,
    compute_algebra,
    exactness_check,
    integrability_check,
)
from src.foliation import is_invariant, is_involutive, restrict_to_open
from src.logger import setup_logging
from src.plot import render_svg
from src.poly import Poly, PolyRing
from src.problem import (
    ProblemError,
    ProblemSpec,
    build_distribution,
    build_map,
    build_ring,
    chart_denominators,
    load_map,
    load_problem,
    map_source,
)
from src.quotient import Atlas, Chart, build_atlas, chart_prefix, leaf_fibre
from src.report import (
    AlgebraReport,
    AtlasReport,
    CertificateReport,
    ChartReport,
    InvarianceReport,
    InvolutivityReport,
    LeafReportDocument,
    StabilityReport,
    TransitionReport,
    VerdictReport,
)
from src.stability import certify_chart


DEFAULT_CONFIG = "config.yaml"


def resolve_config(config_path: str = DEFAULT_CONFIG) -> Config:
    """Load the config file; only a missing default file falls back to built-in defaults"""
    if config_path == DEFAULT_CONFIG and not Path(config_path).exists():
        return Config()
    return load_config(config_path)


class QuotientPipeline:
    """Runs the quotient pipeline for one problem file"""

    def __init__(
        self,
        problem_path: str,
        config: Optional[Config] = None,
        log_level: Optional[str] = None,
    ):
        # Load configuration
        self.config: Config = config or resolve_config()

        # Setup logging
        self.logger = setup_logging(
            log_level=log_level or self.config.application.log_level,
            log_file=self.config.application.log_file,
        )

        self.problem_path = problem_path
        self.problem: Optional[ProblemSpec] = None
        self.ring: Optional[PolyRing] = None
        self.distribution: Optional[Distribution] = None
        self.denominators: List[Poly] = []
        self._charts: Dict[int, Chart] = {}

    def initialize(self) -> None:
        """
        Load the problem file and build its ring and distribution

        Raises:
            FileNotFoundError, ValueError: for unreadable or invalid problems
        """
        self.logger.info(f"Loading problem {self.problem_path}")
        self.problem = load_problem(self.problem_path)
        self.ring = build_ring(self.problem)
        self.distribution = build_distribution(self.problem, self.ring)
        self.denominators = chart_denominators(self.problem, self.ring)
        self.logger.info(
            f"Problem {self.name}: rank {self.distribution.rank}, "
            f"corank {self.distribution.corank}, {len(self.problem.charts)} charts"
        )

    # -- options ------------------------------------------------------------

    @property
    def name(self) -> str:
        return self.problem.name if self.problem and self.problem.name else Path(self.problem_path).stem

    @property
    def degree_bound(self) -> int:
        override = self.problem.options.degree_bound if self.problem else None
        return self.config.search.degree_bound if override is None else override

    @property
    def d_alg(self) -> int:
        override = self.problem.options.d_alg if self.problem else None
        return self.config.search.d_alg if override is None else override

    @property
    def samples(self) -> int:
        override = self.problem.options.samples if self.problem else None
        return self.config.probes.closedness_samples if override is None else override

    @property
    def seed(self) -> int:
        override = self.problem.options.seed if self.problem else None
        return self.config.probes.seed if override is None else override

    # -- charts ---------------------------------------------------------------

    def denominator(self, chart: Optional[str]) -> Poly:
        """A chart index into the problem's list, or a denominator expression"""
        if chart is None:
            return self.ring.one
        if chart.isdigit():
            index = int(chart)
            if index >= len(self.problem.charts):
                raise ProblemError(f"chart index {index} out of range ({len(self.problem.charts)} charts)")
            return self.denominators[index]
        f = self.ring.poly(chart)
        if f.is_zero:
            raise ProblemError("chart denominator must be nonzero")
        return f

    def chart(self, index: int) -> Chart:
        """Certified chart for the problem's index-th denominator"""
        if index not in self._charts:
            f = self.denominators[index]
            local = restrict_to_open(self.distribution, f)
            algebra = compute_algebra(saturate_torsion(local), self.degree_bound, chart_prefix(index))
            chart_id = f"D({f})"
            certificate = certify_chart(chart_id, local, algebra, self.d_alg)
            self._charts[index] = Chart(chart_id, f, local, algebra, certificate)
        return self._charts[index]

    def charts(self) -> List[Chart]:
        return [self.chart(i) for i in range(len(self.problem.charts))]

    def _chart_index(self, chart: Optional[str]) -> int:
        if chart is None or not chart.isdigit():
            raise ProblemError("--chart must be an index into the problem's charts")
        index = int(chart)
        if index >= len(self.problem.charts):
            raise ProblemError(f"chart index {index} out of range ({len(self.problem.charts)} charts)")
        return index

    # -- commands -------------------------------------------------------------

    def involutivity(self) -> InvolutivityReport:
        verdict = is_involutive(self.distribution)
        self.logger.info(f"Involutivity of {self.name}: {verdict.status}")
        return InvolutivityReport(
            problem=self.name,
            ring=repr(self.ring),
            rank=self.distribution.rank,
            corank=self.distribution.corank,
            verdict=VerdictReport.of(verdict),
        )

    def first_integrals(self, chart: Optional[str] = None, degree: Optional[int] = None) -> AlgebraReport:
        D = self.degree_bound if degree is None else degree
        f = self.denominator(chart)
        local = saturate_torsion(restrict_to_open(self.distribution, f))
        algebra = compute_algebra(local, D)
        checks = {
            "exactness": exactness_check(algebra, local, D),
            "integrability": integrability_check(local, algebra),
            "closedness": closedness_probe(
                algebra, local, self.samples, self.config.probes.closedness_dmax, self.seed
            ),
        }
        return AlgebraReport(
            problem=self.name,
            chart=None if f.is_constant else f"D({f})",
            ring=repr(local.ring),
            degree_bound=D,
            generators=[str(g) for g in algebra.generators],
            tags=list(algebra.tag_names),
            relations=algebra.relation_strings(),
            complete=algebra.complete,
            transcendence_degree=algebra.transcendence_degree(),
            checks={name: VerdictReport.of(v) for name, v in checks.items()},
        )

    def invariance(self, map_path: str) -> InvarianceReport:
        spec = load_map(map_path)
        phi = build_map(spec, map_source(spec), self.ring)
        verdict = is_invariant(phi, saturate_torsion(self.distribution))
        return InvarianceReport(problem=self.name, images=phi.to_dict(), verdict=VerdictReport.of(verdict))

    def stability(self, chart: Optional[str]) -> StabilityReport:
        c = self.chart(self._chart_index(chart))
        cert = c.certificate
        return StabilityReport(
            problem=self.name,
            certificate=CertificateReport(
                chart=c.id,
                denominator=str(c.denominator),
                generators=[str(g) for g in c.algebra.generators],
                smooth=VerdictReport.of(cert.smooth),
                relative_dimension=VerdictReport.of(cert.relative_dimension),
                connected_fibres=VerdictReport.of(cert.connected_fibres),
                invariant=VerdictReport.of(cert.invariant),
                overall=cert.overall,
                trusted=cert.trusted,
            ),
        )

    def quotient(self) -> AtlasReport:
        """
        Raises:
            ChartNotCertifiedError, BoundExhaustedError, CocycleError
        """
        atlas = build_atlas(
            self.charts(),
            self.degree_bound,
            self.config.search.localizer_degree,
            self.config.search.max_degree_escalations,
        )
        data = atlas.to_dict()
        return AtlasReport(
            problem=self.name,
            charts=[
                ChartReport(
                    id=c.id,
                    denominator=str(c.denominator),
                    generators=[str(g) for g in c.algebra.generators],
                    tags=list(c.algebra.tag_names),
                    relations=c.algebra.relation_strings(),
                    certificate=c.certificate.overall,
                )
                for c in atlas.charts
            ],
            transitions=[TransitionReport(**t) for t in data["transitions"]],
            disjoint=data["disjoint"],
            chart_checks={
                cid: {name: VerdictReport.of(v) for name, v in checks.items()}
                for cid, checks in atlas.chart_checks.items()
            },
            cocycle_ok=atlas.cocycle_ok,
            cocycle_witness=atlas.cocycle_witness,
            separated=VerdictReport.of(atlas.separated),
            classification=atlas.classification,
        )

    def leaf(self, chart: Optional[str], point: Sequence[Fraction]) -> LeafReportDocument:
        c = self.chart(self._chart_index(chart))
        report = leaf_fibre(Atlas([c]), c.id, point)
        return LeafReportDocument(problem=self.name, chart=c.id, point=[str(v) for v in point], **report.to_dict())

    def plot(self, window: Optional[Sequence[float]] = None, density: Optional[int] = None) -> str:
        algebras: List[FirstIntegralAlgebra] = [c.algebra for c in self.charts()]
        if not algebras:
            algebras = [compute_algebra(saturate_torsion(self.distribution), self.degree_bound)]
        return render_svg(
            self.distribution,
            algebras,
            window or self.config.plot.window,
            density or self.config.plot.density,
            self.config.plot.levels,
        )

    def stop(self) -> None:
        """Flush handlers"""
        for handler in self.logger.handlers:
            handler.flush()
        self.logger.debug("Pipeline finished")

    def __enter__(self):
        """Context manager entry"""
        self.initialize()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Context manager exit"""
        if exc_type is not None and not issubclass(exc_type, (ValueError, FileNotFoundError)):
            self.logger.error(f"Pipeline failed: {exc_val}", exc_info=(exc_type, exc_val, exc_tb))
        self.stop()
