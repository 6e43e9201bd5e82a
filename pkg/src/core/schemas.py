from collections.abc import Callable
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer
from pydantic_core import core_schema


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class JudgedResult(FrozenModel):
    """Any numeric verdict, together with the tolerances it was judged against."""

    tolerances: dict[str, float] = Field(default_factory=dict)
    heuristic: bool = False


def instance_schema(cls: type, serialize: Callable[[Any], Any]) -> core_schema.CoreSchema:
    """Validate by isinstance, serialize to JSON through serialize."""
    return core_schema.is_instance_schema(
        cls,
        serialization=core_schema.plain_serializer_function_ser_schema(serialize, when_used="json"),
    )


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("expected a rational number")
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"expected a rational number, got {value!r}") from exc


ExactFraction = Annotated[
    Fraction,
    BeforeValidator(_to_fraction),
    PlainSerializer(str, return_type=str, when_used="json"),
]
