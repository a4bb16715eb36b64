# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""JSON interchange documents.

Examples:
    Poly:         {"coeffs": [1, "1/2", 0.25]}
    LaguerreForm: {"C": 1, "l": 0, "alpha": "1/2", "betas": [2, 1]}
    Complex:      {"re": 0.5, "im": -1.0}

Raw documents are first checked against the JSON schemas below, so that errors point
at the offending location, and then converted through the pydantic models.
"""

import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

import jsonschema
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from laguerre_calculus.series import CalculusError, LaguerreForm, Poly, Scalar, ScalarMode

logger = logging.getLogger(__name__)

RATIONAL_PATTERN = r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$"

SCALAR_SCHEMA: Dict[str, Any] = {
    "anyOf": [
        {"type": "number"},
        {"type": "string", "pattern": RATIONAL_PATTERN},
        {
            "type": "object",
            "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
            "required": ["re", "im"],
            "additionalProperties": False,
        },
    ]
}

POLY_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {"coeffs": {"type": "array", "items": SCALAR_SCHEMA}},
    "required": ["coeffs"],
}

FORM_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "C": SCALAR_SCHEMA,
        "l": {"type": "integer", "minimum": 0},
        "alpha": {"anyOf": SCALAR_SCHEMA["anyOf"][:2]},
        "betas": {"type": "array", "items": {"anyOf": SCALAR_SCHEMA["anyOf"][:2]}},
    },
    "required": ["C", "l", "alpha", "betas"],
}


class DataValidationError(CalculusError):
    """Raised when an interchange document fails validation."""


class ComplexValue(BaseModel):
    """A complex scalar on the wire."""

    model_config = ConfigDict(frozen=True)

    re: float = Field(description="Real part.", examples=[0.5])
    im: float = Field(description="Imaginary part.", examples=[-1.0])


WireScalar = Union[int, float, str, ComplexValue]


class _DocumentModel(BaseModel):
    """Base interchange document."""

    model_config = ConfigDict(extra="ignore", populate_by_name=True)

    @classmethod
    def schema_document(cls) -> Dict[str, Any]:
        """Return the JSON schema raw documents are checked against."""
        raise NotImplementedError

    @classmethod
    def load(cls, document: Union[str, Dict[str, Any]]):
        """Validate and load a raw document (JSON text or parsed object).

        Raises:
            DataValidationError: if the document is not JSON or fails validation
        """
        if isinstance(document, str):
            try:
                document = json.loads(document)
            except json.JSONDecodeError as e:
                msg = f"invalid document: expecting json at line {e.lineno} column {e.colno}"
                logger.error(msg)
                raise DataValidationError(msg) from e
        try:
            jsonschema.validate(document, cls.schema_document())
        except jsonschema.ValidationError as e:
            location = "/".join(str(part) for part in e.absolute_path) or "<root>"
            msg = f"invalid document at {location}: {e.message}"
            logger.error(msg)
            raise DataValidationError(msg) from e
        try:
            return cls.model_validate(document)
        except ValidationError as e:
            msg = f"failed to validate document: {document}"
            logger.debug(msg, exc_info=True)
            raise DataValidationError(msg) from e


class PolyDocument(_DocumentModel):
    """Wire form of a polynomial."""

    coeffs: List[WireScalar] = Field(
        description="Taylor coefficients c_0, c_1, ...", examples=[[1, "1/2", 0.25]]
    )

    @classmethod
    def schema_document(cls) -> Dict[str, Any]:
        """Return the polynomial schema."""
        return POLY_SCHEMA


class FormDocument(_DocumentModel):
    """Wire form of a Laguerre form."""

    C: WireScalar = Field(description="Constant factor.", examples=[1])
    l: int = Field(ge=0, description="Power of z.", examples=[0])  # noqa: E741
    alpha: Union[int, float, str] = Field(description="Exponential rate.", examples=["1/2"])
    betas: List[Union[int, float, str]] = Field(
        description="Nonnegative linear-factor coefficients.", examples=[[2, 1]]
    )

    @classmethod
    def schema_document(cls) -> Dict[str, Any]:
        """Return the Laguerre form schema."""
        return FORM_SCHEMA


def parse_scalar(value: WireScalar, mode: ScalarMode) -> Scalar:
    """Convert a wire scalar to the given scalar mode."""
    if isinstance(value, ComplexValue):
        return mode.coerce(complex(value.re, value.im))
    if isinstance(value, str):
        return mode.coerce(Fraction(value.replace(" ", "")))
    return mode.coerce(value)


def scalar_to_wire(value: Any) -> Any:
    """Convert a scalar to its wire form: int, float, "p/q" or {"re", "im"}."""
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, complex):
        if value.imag == 0:
            return float(value.real)
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, int):
        return value
    return float(value)


def data_matches_poly_schema(data: Dict[str, Any]) -> bool:
    """Return whether data is a valid polynomial document.

    Args:
        data (dict): Data to be validated.

    Returns:
        bool: True if data matches the polynomial schema, False otherwise.
    """
    try:
        PolyDocument.load(data)
        return True
    except DataValidationError as e:
        logger.debug("Invalid data: %s", e)
        return False


def load_poly(document: Union[str, Dict[str, Any]], mode: Optional[ScalarMode] = None) -> Poly:
    """Load a polynomial document."""
    mode = mode or ScalarMode.floating()
    parsed = PolyDocument.load(document)
    return Poly(tuple(parse_scalar(c, mode) for c in parsed.coeffs))


def dump_poly(p: Poly) -> Dict[str, Any]:
    """Return the wire document of a polynomial."""
    return {"coeffs": [scalar_to_wire(c) for c in p.coeffs]}


def load_form(
    document: Union[str, Dict[str, Any]], mode: Optional[ScalarMode] = None
) -> LaguerreForm:
    """Load a Laguerre form document.

    Raises:
        DataValidationError: if the document is invalid or a beta is negative
    """
    mode = mode or ScalarMode.floating()
    parsed = FormDocument.load(document)
    try:
        return LaguerreForm(
            C=parse_scalar(parsed.C, mode),
            l=parsed.l,
            alpha=parse_scalar(parsed.alpha, mode),
            betas=tuple(parse_scalar(beta, mode) for beta in parsed.betas),
        )
    except ValueError as e:
        msg = f"invalid Laguerre form: {e}"
        logger.error(msg)
        raise DataValidationError(msg) from e


def dump_form(form: LaguerreForm) -> Dict[str, Any]:
    """Return the wire document of a Laguerre form."""
    return {
        "C": scalar_to_wire(form.C),
        "l": form.l,
        "alpha": scalar_to_wire(form.alpha),
        "betas": [scalar_to_wire(beta) for beta in form.betas],
    }


class TrialRecord(BaseModel):
    """One audit line of a randomized suite."""

    suite: str = Field(description="Suite name.", examples=["lemma"])
    index: int = Field(ge=0, description="Trial index.")
    seed: int = Field(description="Suite seed; the trial stream is seeded with (seed, index).")
    passed: bool
    verdict: str = Field(examples=["pass"])
    inputs: Dict[str, Any] = Field(default_factory=dict)
    roots: List[ComplexValue] = Field(default_factory=list)
    metrics: Dict[str, float] = Field(default_factory=dict)

    def to_json_line(self) -> str:
        """Return the record as one JSON line."""
        return self.model_dump_json()
