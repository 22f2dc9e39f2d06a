"""Formalized result and configuration schemas for pdflap output."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .errors import ValidationError

INPUT_FORMATS = ("flag", "distmat", "mol")
REDUCTION_MODES = ("auto", "exact", "float")
PAIR_SCHEDULES = ("consecutive", "diagonal", "all")


def format_value(value: float) -> str:
    """Render a filtration value; infinities become the literal ``inf``."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def parse_value(text: Any) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    return float(str(text).strip())


def parse_pairs(text: str) -> tuple[str, list[tuple[float, float]]]:
    """Parse a pair schedule.

    Either a named schedule (``consecutive``, ``diagonal``, ``all``) or an
    explicit ``a:b,a:b`` list where ``inf`` is accepted.
    """
    text = text.strip()
    if text in PAIR_SCHEDULES:
        return text, []
    pairs: list[tuple[float, float]] = []
    for chunk in text.split(","):
        lo, sep, hi = chunk.partition(":")
        if not sep:
            raise ValidationError(f"Pair '{chunk}' must look like 'a:b'.")
        try:
            a, b = parse_value(lo), parse_value(hi)
        except ValueError:
            raise ValidationError(f"Pair '{chunk}' is not numeric.") from None
        if math.isnan(a) or math.isnan(b):
            raise ValidationError(f"Pair '{chunk}' contains NaN.")
        if a > b:
            raise ValidationError(f"Pair '{chunk}' must satisfy a <= b.")
        pairs.append((a, b))
    return "explicit", pairs


@dataclass
class SpectraRecord:
    """Spectrum of one (persistent) Laplacian ``L_k^{a,b}``.

    ``b == a`` for a non-persistent Laplacian. ``eigenvectors`` (columns) are
    only kept when requested.
    """

    k: int
    a: float
    b: float
    eigenvalues: list[float]
    betti: int
    lambda_min_nonzero: Optional[float]
    zero_tol: float
    eigenvectors: Optional[list[list[float]]] = None
    oracle_betti: Optional[int] = None

    @property
    def key(self) -> tuple[int, float, float]:
        return (self.k, self.a, self.b)

    @property
    def n_eigenvalues(self) -> int:
        return len(self.eigenvalues)

    @property
    def verified(self) -> Optional[bool]:
        """Whether the oracle agrees; ``None`` when not checked."""
        if self.oracle_betti is None:
            return None
        return self.oracle_betti == self.betti

    def to_dict(self) -> dict:
        d: dict = {
            "dim": self.k,
            "a": format_value(self.a),
            "b": format_value(self.b),
            "betti": self.betti,
            "lambda_min_nonzero": self.lambda_min_nonzero,
            "eigenvalues": list(self.eigenvalues),
            "zero_tol": self.zero_tol,
        }
        if self.eigenvectors is not None:
            d["eigenvectors"] = self.eigenvectors
        if self.oracle_betti is not None:
            d["oracle_betti"] = self.oracle_betti
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SpectraRecord":
        return cls(
            k=int(data["dim"]),
            a=parse_value(data["a"]),
            b=parse_value(data["b"]),
            eigenvalues=[float(x) for x in data["eigenvalues"]],
            betti=int(data["betti"]),
            lambda_min_nonzero=data.get("lambda_min_nonzero"),
            zero_tol=float(data["zero_tol"]),
            eigenvectors=data.get("eigenvectors"),
            oracle_betti=data.get("oracle_betti"),
        )


@dataclass
class Report:
    """All spectra of a run plus a provenance block.

    Records are kept sorted by ``(k, a, b)``.
    """

    records: list[SpectraRecord] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.records.sort(key=lambda r: r.key)

    @property
    def mismatches(self) -> list[SpectraRecord]:
        return [r for r in self.records if r.verified is False]

    def for_dim(self, k: int) -> list[SpectraRecord]:
        return [r for r in self.records if r.k == k]

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(
            records=[SpectraRecord.from_dict(r) for r in data.get("records", [])],
            provenance=dict(data.get("provenance", {})),
        )


@dataclass
class RunConfig:
    """Validated settings of one end-to-end run."""

    input_path: str
    fmt: str = "flag"
    max_dim: int = 2
    cutoff: float = 8.0
    rounding: float = 0.001
    pairs: str = "consecutive"
    zero_tol: Optional[float] = None
    verify: bool = False
    out_csv: Optional[str] = None
    out_json: Optional[str] = None
    plot: Optional[str] = None
    strict: bool = False
    bonds_at_zero: bool = False
    all_ligand_pairs: bool = False
    electronegativity: Optional[str] = None
    reduction: str = "auto"
    workers: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.fmt not in INPUT_FORMATS:
            raise ValidationError(
                f"Unknown input format '{self.fmt}'. Choose from: {', '.join(INPUT_FORMATS)}."
            )
        if self.max_dim < 0:
            raise ValidationError(f"--max-dim must be >= 0, got {self.max_dim}.")
        if not self.cutoff > 0:
            raise ValidationError(f"--cutoff must be positive, got {self.cutoff}.")
        if not (self.rounding >= 0 and math.isfinite(self.rounding)):
            raise ValidationError(f"--round must be finite and >= 0, got {self.rounding}.")
        if self.zero_tol is not None and not self.zero_tol > 0:
            raise ValidationError(f"--zero-tol must be positive, got {self.zero_tol}.")
        if self.reduction not in REDUCTION_MODES:
            raise ValidationError(
                f"Unknown reduction mode '{self.reduction}'. "
                f"Choose from: {', '.join(REDUCTION_MODES)}."
            )
        if self.workers < 1:
            raise ValidationError(f"--workers must be a positive integer, got {self.workers}.")
        parse_pairs(self.pairs)

    def to_dict(self) -> dict:
        return asdict(self)
