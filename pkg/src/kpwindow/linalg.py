"""Exact sparse echelon engine over Q on top of sympy's DomainMatrix."""
import logging
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

Vector = Mapping[Hashable, Fraction]


def to_qq(c) -> object:
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def from_qq(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _columns(vectors: Iterable[Vector]) -> List[Hashable]:
    keys = set()
    for v in vectors:
        keys.update(k for k, c in v.items() if c)
    return sorted(keys)


def to_matrix(vectors: Sequence[Vector], columns: Sequence[Hashable]) -> DomainMatrix:
    position = {key: i for i, key in enumerate(columns)}
    dod: Dict[int, Dict[int, object]] = {}
    for r, v in enumerate(vectors):
        row = {position[k]: to_qq(c) for k, c in v.items() if c}
        if row:
            dod[r] = row
    return DomainMatrix.from_dod(dod, (len(vectors), len(columns)), QQ)


def rank(vectors: Sequence[Vector]) -> int:
    vectors = [v for v in vectors if any(v.values())]
    columns = _columns(vectors)
    if not vectors or not columns:
        return 0
    return to_matrix(vectors, columns).rank()


class EchelonSpace:
    """A subspace of Q^(columns) kept as reduced row-echelon rows.

    Columns are ordered by their natural sort order; the pivot of a row is its
    least column, so for monomials the pivot is the leading term.
    """

    def __init__(self, vectors: Iterable[Vector] = ()):
        vectors = [dict((k, Fraction(c)) for k, c in v.items() if c) for v in vectors]
        vectors = [v for v in vectors if v]
        self.columns = _columns(vectors)
        self.rows: List[Dict[Hashable, Fraction]] = []
        self.pivots: List[Hashable] = []
        if vectors and self.columns:
            reduced, pivots = to_matrix(vectors, self.columns).rref()
            dod = reduced.to_dod()
            for r, p in enumerate(pivots):
                row = {self.columns[c]: from_qq(v) for c, v in dod.get(r, {}).items()}
                self.rows.append(row)
                self.pivots.append(self.columns[p])
        logger.debug("echelon space of dimension %s on %s columns", len(self.rows), len(self.columns))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EchelonSpace):
            return NotImplemented
        return self.pivots == other.pivots and self.rows == other.rows

    def reduce(self, v: Vector) -> Dict[Hashable, Fraction]:
        """Residual of ``v`` after clearing every pivot column."""
        residual = {k: Fraction(c) for k, c in v.items() if c}
        for pivot, row in zip(self.pivots, self.rows):
            c = residual.get(pivot)
            if not c:
                continue
            for k, value in row.items():
                updated = residual.get(k, Fraction(0)) - c * value
                if updated:
                    residual[k] = updated
                else:
                    residual.pop(k, None)
        return residual

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def restricted_rank(self, keep: Callable[[Hashable], bool]) -> int:
        """Rank of the projection onto the columns selected by ``keep``."""
        return rank([{k: c for k, c in row.items() if keep(k)} for row in self.rows])

    def intersect_support(self, allowed: Callable[[Hashable], bool]) -> "EchelonSpace":
        """The subspace of vectors supported on allowed columns."""
        blocked = [{k: c for k, c in row.items() if not allowed(k)} for row in self.rows]
        if not any(blocked):
            return self
        columns = _columns(blocked)
        # a combination sum l_i row_i is allowed iff l lies in the left kernel of the blocked part
        kernel = to_matrix(blocked, columns).transpose().nullspace()
        combos = kernel.to_dod()
        vectors = []
        for r in range(kernel.shape[0]):
            weights = combos.get(r, {})
            combined: Dict[Hashable, Fraction] = {}
            for i, w in weights.items():
                w = from_qq(w)
                for k, c in self.rows[i].items():
                    combined[k] = combined.get(k, Fraction(0)) + w * c
            vectors.append(combined)
        return EchelonSpace(vectors)

    def intersection_dim(self, allowed: Callable[[Hashable], bool]) -> int:
        blocked = [{k: c for k, c in row.items() if not allowed(k)} for row in self.rows]
        return self.dim - rank(blocked)


def sum_dim(*families: Sequence[Vector]) -> int:
    vectors: List[Vector] = []
    for family in families:
        vectors.extend(family)
    return rank(vectors)
