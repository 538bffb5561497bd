"""Discrete body alphabets and inter-agent translation matrices.

Translation applies a matrix linearly to a body's coefficient vector over
its source alphabet.  All linear algebra here is exact (integers and
fractions); there are no tolerances anywhere in the language layer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import Body
from .errors import (
    AlphabetMismatchError,
    ChainDimensionError,
    NotInvertibleError,
    UntranslatableSymbolError,
)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of basis symbols for promise bodies."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be unique")
        object.__setattr__(self, "symbols", symbols)

    @property
    def dim(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.symbols

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(tuple(sorted(set(self.symbols) | set(other.symbols))))


@dataclass(frozen=True)
class TranslationMatrix:
    """Linear map from one alphabet to another, rows target-symbol-major."""

    from_alphabet: Alphabet
    to_alphabet: Alphabet
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(row) for row in self.entries)
        if len(entries) != self.to_alphabet.dim:
            raise ValueError(
                f"matrix has {len(entries)} rows, target alphabet needs {self.to_alphabet.dim}"
            )
        for row in entries:
            if len(row) != self.from_alphabet.dim:
                raise ValueError(
                    f"matrix row has {len(row)} columns, source alphabet needs {self.from_alphabet.dim}"
                )
        object.__setattr__(self, "entries", entries)

    def column(self, symbol: str) -> tuple:
        j = self.from_alphabet.index(symbol)
        return tuple(row[j] for row in self.entries)

    def apply(self, coefficients: Sequence) -> tuple:
        return tuple(
            sum(entry * c for entry, c in zip(row, coefficients)) for row in self.entries
        )

    def inverse(self) -> "TranslationMatrix":
        """Exact two-sided inverse; raises when no bijection of alphabets exists."""
        if not is_invertible(self):
            raise NotInvertibleError("translation matrix has no two-sided inverse")
        inv = _invert(self.entries)
        return TranslationMatrix(self.to_alphabet, self.from_alphabet, inv)

    def reversed_matrix(self) -> "TranslationMatrix":
        """Word-level partial reverse of a possibly non-invertible matrix.

        A target symbol defined as a pure renaming of a single source symbol
        translates back to it; a composite target symbol has no unique source
        expression, so its reverse column is zero and any attempt to carry it
        backwards raises an untranslatable-symbol error.
        """
        rows = []
        for i in range(self.from_alphabet.dim):
            rows.append([0] * self.to_alphabet.dim)
        for a_prime, row in enumerate(self.entries):
            support = [j for j, entry in enumerate(row) if entry != 0]
            if len(support) == 1 and row[support[0]] == 1:
                rows[support[0]][a_prime] = 1
        return TranslationMatrix(self.to_alphabet, self.from_alphabet, tuple(map(tuple, rows)))


def _rank(entries) -> int:
    """Rank over the rationals by fraction-exact Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in entries]
    rank = 0
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = m[row][col]
        m[row] = [x / inv for x in m[row]]
        for r in range(n_rows):
            if r != row and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == n_rows:
            break
    return rank


def _invert(entries):
    n = len(entries)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise NotInvertibleError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col]
        aug[col] = [x / inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def is_invertible(matrix: TranslationMatrix) -> bool:
    """True iff the matrix is square with full rank over the rationals."""
    if matrix.from_alphabet.dim != matrix.to_alphabet.dim:
        return False
    return _rank(matrix.entries) == matrix.from_alphabet.dim


def translate(body: Body, matrix: TranslationMatrix) -> Body:
    """Re-express a body over the target alphabet of a translation matrix.

    Each source symbol's column gives its target combination; a symbol whose
    column is all zero cannot be carried over and is reported by name.  Sign,
    type tag, valency and condition are preserved.
    """
    for symbol in body.symbol_set:
        if symbol not in matrix.from_alphabet:
            raise AlphabetMismatchError(
                f"symbol {symbol!r} is not in the source alphabet; translate it first"
            )
        if all(entry == 0 for entry in matrix.column(symbol)):
            raise UntranslatableSymbolError(symbol)
    coefficients = [body.coefficient(sym) for sym in matrix.from_alphabet.symbols]
    image = matrix.apply(coefficients)
    symbols = {}
    for sym, coeff in zip(matrix.to_alphabet.symbols, image):
        if coeff == 0:
            continue
        if coeff != int(coeff) or coeff < 0:
            raise UntranslatableSymbolError(sym)
        symbols[sym] = int(coeff)
    return replace(body, symbols=tuple(sorted(symbols.items())))


@dataclass(frozen=True)
class ContinuityReport:
    """Outcome of a patch-chain continuity check."""

    continuous: bool
    failing_boundary: Optional[int] = None

    def __bool__(self):
        return self.continuous


def continuity_check(
    patches: Sequence[tuple[Alphabet, Optional[TranslationMatrix]]]
) -> ContinuityReport:
    """Piecewise continuity: each neighbouring language pair must overlap.

    Every adjacent pair of patches must share at least one symbol after
    translating the patch language forward; the first failing boundary is
    reported.  A single patch is trivially continuous.
    """
    patches = list(patches)
    for boundary in range(len(patches) - 1):
        alphabet, matrix = patches[boundary]
        next_alphabet = patches[boundary + 1][0]
        if matrix is None:
            raise ChainDimensionError(f"patch {boundary} has no matrix to the next patch")
        if matrix.from_alphabet.symbols != alphabet.symbols:
            raise ChainDimensionError(
                f"patch {boundary}: matrix source does not match the patch alphabet"
            )
        if matrix.to_alphabet.symbols != next_alphabet.symbols:
            raise ChainDimensionError(
                f"patch {boundary}: matrix target does not match the next alphabet"
            )
        overlap = set()
        for symbol in alphabet.symbols:
            column = matrix.column(symbol)
            for target, entry in zip(matrix.to_alphabet.symbols, column):
                if entry != 0 and target in next_alphabet:
                    overlap.add(target)
        if not overlap:
            return ContinuityReport(False, boundary)
    return ContinuityReport(True)


def common_part(
    b1: Body, b2: Body, receiver_filter: Body, alphabet: Optional[Alphabet] = None
) -> frozenset[str]:
    """Symbols shared by two promisers and accepted by the receiver.

    An empty result means the receiver can distinguish the promisers.  All
    three bodies must already live in one alphabet; translate first if not.
    """
    if alphabet is not None:
        for b in (b1, b2, receiver_filter):
            stray = b.symbol_set - set(alphabet.symbols)
            if stray:
                raise AlphabetMismatchError(
                    f"symbols {sorted(stray)} are outside the shared alphabet; translate first"
                )
    return b1.symbol_set & b2.symbol_set & receiver_filter.symbol_set


def superagent_language(sub_alphabets: Iterable[Alphabet]) -> Alphabet:
    """Effective language of a super-agent: the union of its sub-languages."""
    symbols: set[str] = set()
    for alphabet in sub_alphabets:
        symbols |= set(alphabet.symbols)
    return Alphabet(tuple(sorted(symbols)))
