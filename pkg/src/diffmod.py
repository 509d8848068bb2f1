"""
Kaehler differentials and distributions
One-forms, vector fields, distributions presented as a quotient of the module of differentials
"""

import threading
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.matrices import DomainMatrix

from src import modules
from src.logger import get_logger
from src.poly import Poly, PolyRing, RingMismatchError


logger = get_logger(__name__)

Coefficient = Union[Poly, str, int]


def _format_coefficient(c: Poly, symbol: str) -> str:
    text = str(c)
    if c == 1:
        return symbol
    if c == -1:
        return f"-{symbol}"
    simple = len(c.rep) == 1 and "/" not in text or c.is_constant
    if simple:
        return f"{text}*{symbol}"
    return f"({text})*{symbol}"


def _join(pieces: List[str]) -> str:
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


class _LinearForm:
    """Shared storage for one-forms and vector fields: a map variable -> coefficient"""

    symbol = "{}"

    def __init__(self, ring: PolyRing, coeffs: Optional[Mapping[str, Coefficient]] = None):
        self.ring = ring
        stored: Dict[str, Poly] = {}
        for name, value in (coeffs or {}).items():
            if name not in ring.variables:
                raise RingMismatchError(f"{name!r} is not a variable of {ring}")
            poly = ring.poly(value)
            if not poly.is_zero:
                stored[name] = poly
        self.coeffs: Dict[str, Poly] = {v: stored[v] for v in ring.variables if v in stored}

    @classmethod
    def from_vector(cls, ring: PolyRing, vector: Sequence):
        """Build from internal ring elements, one per variable in ring order"""
        return cls(ring, {v: Poly(ring, c) for v, c in zip(ring.variables, vector) if c})

    @property
    def vector(self) -> modules.Vector:
        R = self.ring.internal
        return tuple(self.coeffs[v].rep if v in self.coeffs else R.zero for v in self.ring.variables)

    def coefficient(self, variable: str) -> Poly:
        return self.coeffs.get(variable, self.ring.zero)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "_LinearForm") -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} and {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} and {other.ring} differ")

    def __add__(self, other):
        self._check(other)
        names = set(self.coeffs) | set(other.coeffs)
        return type(self)(self.ring, {v: self.coefficient(v) + other.coefficient(v) for v in names})

    def __sub__(self, other):
        self._check(other)
        names = set(self.coeffs) | set(other.coeffs)
        return type(self)(self.ring, {v: self.coefficient(v) - other.coefficient(v) for v in names})

    def __neg__(self):
        return type(self)(self.ring, {v: -c for v, c in self.coeffs.items()})

    def __rmul__(self, scalar):
        if isinstance(scalar, Poly) and scalar.ring != self.ring:
            raise RingMismatchError(f"{scalar.ring} and {self.ring} differ")
        return type(self)(self.ring, {v: scalar * c for v, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.ring, tuple(self.coeffs.items())))

    def to_dict(self) -> Dict[str, str]:
        return {v: str(c) for v, c in self.coeffs.items()}

    def __str__(self) -> str:
        return _join([
            _format_coefficient(c, self.symbol.format(v)) for v, c in self.coeffs.items()
        ])

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


class OneForm(_LinearForm):
    """A one-form sum c_i dx_i; d of an inverse variable is expanded by the chain rule"""

    symbol = "d{}"

    @classmethod
    def d(cls, f: Poly) -> "OneForm":
        """Exterior derivative df = sum (df/dx_i) dx_i"""
        ring = f.ring
        return cls(ring, {v: f.diff(i) for i, v in enumerate(ring.variables)})

    def pairing(self, field: "VectorField") -> Poly:
        """Contraction <omega, v> = sum c_i a_i"""
        if field.ring != self.ring:
            raise RingMismatchError(f"{self.ring} and {field.ring} differ")
        total = self.ring.zero
        for v, c in self.coeffs.items():
            if v in field.coeffs:
                total = total + c * field.coeffs[v]
        return total


class VectorField(_LinearForm):
    """A derivation sum a_i d/dx_i"""

    symbol = "d/d{}"

    def apply(self, f: Poly) -> Poly:
        """Derivative of f along the field"""
        if f.ring != self.ring:
            raise RingMismatchError(f"{f.ring} and {self.ring} differ")
        total = self.ring.zero
        for v, a in self.coeffs.items():
            total = total + a * f.diff(v)
        return total


def generic_rank(rows: Sequence[Sequence[Poly]], ncols: int) -> int:
    """Rank over the fraction field of a matrix of ring elements"""
    rows = [list(r) for r in rows if any(not c.is_zero for c in r)]
    if not rows or ncols == 0:
        return 0
    exprs = [[c.to_expr() for c in row] for row in rows]
    return DomainMatrix.from_list_sympy(len(exprs), ncols, exprs).rank()


class Distribution:
    """
    A distribution F = Omega^1 / N presented by generators of N.

    On rings with variety relations r, the differentials d(r) are part of the
    ambient presentation of Omega^1 and are added to every module computation.
    """

    def __init__(self, ring: PolyRing, relations: Iterable[OneForm] = (), saturated: bool = False):
        self.ring = ring
        forms: List[OneForm] = []
        for form in relations:
            if form.ring != ring:
                raise RingMismatchError(f"relation {form} is not over {ring}")
            if not form.is_zero and form not in forms:
                forms.append(form)
        self.relations: Tuple[OneForm, ...] = tuple(forms)
        self.saturated = saturated
        self.logger = get_logger(__name__)

        self.ambient: Tuple[OneForm, ...] = tuple(
            OneForm.d(ring.from_base(r)) for r in ring.relations
        )
        n = ring.nvars
        ambient_rank = generic_rank([_row(w) for w in self.ambient], n)
        self.corank = generic_rank([_row(w) for w in self.relations + self.ambient], n) - ambient_rank
        self.rank = n - ambient_rank - self.corank

        self._gb: Optional[List[modules.Vector]] = None
        self._lock = threading.Lock()

    @classmethod
    def from_vector_fields(cls, ring: PolyRing, fields: Iterable[VectorField]) -> "Distribution":
        """The distribution whose tangent fields are spanned by fields: N = annihilator"""
        fields = [f for f in fields if not f.is_zero]
        if not fields:
            return cls(ring, [OneForm.d(g) for g in ring.gens()], saturated=True)
        vectors = [f.vector for f in fields]
        columns = [tuple(v[i] for v in vectors) for i in range(ring.nvars)]
        ann = modules.syzygies(columns, ring.internal, ring.defining_gb)
        ann = modules.minimal_generators(ann, ring.nvars, ring.internal, ring.defining_gb)
        return cls(ring, [OneForm.from_vector(ring, modules.primitive(v)) for v in ann], saturated=True)

    @property
    def presentation(self) -> List[modules.Vector]:
        return [w.vector for w in self.relations + self.ambient]

    def groebner(self) -> List[modules.Vector]:
        """Module Groebner basis of N (plus ambient relations), computed once"""
        with self._lock:
            if self._gb is None:
                self._gb = modules.module_groebner(
                    self.presentation, self.ring.nvars, self.ring.internal, self.ring.defining_gb
                )
                self.logger.debug(f"distribution basis has {len(self._gb)} elements")
        return self._gb

    def contains(self, form: OneForm) -> bool:
        return module_normal_form(form, self).is_zero

    def to_dict(self) -> dict:
        return {
            "ring": repr(self.ring),
            "relations": [w.to_dict() for w in self.relations],
            "rank": self.rank,
            "corank": self.corank,
            "saturated": self.saturated,
        }

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Distribution)
            and self.ring == other.ring
            and self.groebner() == other.groebner()
        )

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.groebner())))

    def __repr__(self) -> str:
        forms = ", ".join(str(w) for w in self.relations) or "0"
        return f"Distribution(N = ({forms}), rank={self.rank}, corank={self.corank})"


def _row(form: OneForm) -> List[Poly]:
    return [form.coefficient(v) for v in form.ring.variables]


def module_normal_form(form: OneForm, dist: Distribution) -> OneForm:
    """
    Canonical representative of the class of form in F = Omega^1 / N

    Raises:
        RingMismatchError: form and distribution live over different rings
    """
    if form.ring != dist.ring:
        raise RingMismatchError(f"{form} is not a form over {dist.ring}")
    if form.is_zero:
        return form
    remainder = modules.reduce_vector(form.vector, dist.groebner())
    return OneForm.from_vector(dist.ring, remainder)


def foliated_d(f: Poly, dist: Distribution) -> OneForm:
    """d_F f: the class of df in F; zero exactly when f is a first integral"""
    if f.ring != dist.ring:
        raise RingMismatchError(f"{f} is not an element of {dist.ring}")
    return module_normal_form(OneForm.d(f), dist)


def rank_corank(dist: Distribution) -> Tuple[int, int]:
    return dist.rank, dist.corank


def module_membership(form: OneForm, generators: Sequence[OneForm], ring: PolyRing) -> bool:
    """True when form lies in the submodule spanned by generators (modulo ring relations)"""
    basis = modules.module_groebner(
        [g.vector for g in generators], ring.nvars, ring.internal, ring.defining_gb
    )
    return modules.contains(basis, form.vector)


def _annihilator(ring: PolyRing, vectors: Sequence[modules.Vector]) -> List[modules.Vector]:
    """Generators of {v : sum_i w_i v_i = 0 for every w in vectors}"""
    n = ring.nvars
    if not vectors:
        return [tuple(ring.internal.one if i == j else ring.internal.zero for i in range(n))
                for j in range(n)]
    columns = [tuple(w[i] for w in vectors) for i in range(n)]
    syz = modules.syzygies(columns, ring.internal, ring.defining_gb)
    syz = modules.minimal_generators(syz, n, ring.internal, ring.defining_gb)
    return [modules.primitive(v) for v in syz]


def dual_vector_fields(dist: Distribution) -> List[VectorField]:
    """Generators of the tangent module T_F = {v : <w, v> = 0 for every w in N}"""
    ring = dist.ring
    fields = _annihilator(ring, dist.presentation)
    return [VectorField.from_vector(ring, v) for v in fields]


def saturate_torsion(dist: Distribution) -> Distribution:
    """
    Torsion saturation {w : b*w in N for some nonzero b}, computed as the
    annihilator of the tangent module.
    """
    if dist.saturated:
        return dist
    ring = dist.ring
    if not dist.relations:
        return Distribution(ring, (), saturated=True)
    tangent = _annihilator(ring, dist.presentation)
    forms = [OneForm.from_vector(ring, v) for v in _annihilator(ring, tangent)]
    # ambient relations stay in the presentation through Distribution itself
    ambient = set(dist.ambient)
    forms = [w for w in forms if w not in ambient]
    saturated = Distribution(ring, forms, saturated=True)
    logger.debug(f"saturated {len(dist.relations)} relations to {len(saturated.relations)}")
    return saturated
