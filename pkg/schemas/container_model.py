"""Pydantic models for the container model file."""

from __future__ import annotations

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, conint, field_validator


class Category(str, Enum):
    """Element categories a container API may read or write."""

    COL_VALUE = "COL_VALUE"
    MAP_KEY = "MAP_KEY"
    MAP_VALUE = "MAP_VALUE"


def _check_method_name(v: str) -> str:
    parts = v.split(".")
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"method must be written 'Class.method', got '{v}'")
    return v


class EntranceRow(BaseModel):
    """A method parameter through which elements enter a container."""

    method: str
    param: conint(ge=0)
    category: Category

    @field_validator("method")
    @classmethod
    def check_method(cls, v: str) -> str:
        return _check_method_name(v)


class ExitRow(BaseModel):
    """A method whose return value is an element of its receiver's host."""

    method: str
    category: Category

    @field_validator("method")
    @classmethod
    def check_method(cls, v: str) -> str:
        return _check_method_name(v)


class ContainerModelFile(BaseModel):
    """Top-level container model document."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    entrances: List[EntranceRow] = Field(default_factory=list)
    exits: List[ExitRow] = Field(default_factory=list)
    transfers: List[str] = Field(default_factory=list)
    collection_roots: List[str] = Field(default_factory=list, alias="collectionRoots")
    map_roots: List[str] = Field(default_factory=list, alias="mapRoots")
    library: List[str] = Field(default_factory=list)

    @field_validator("transfers")
    @classmethod
    def check_transfers(cls, v: List[str]) -> List[str]:
        return [_check_method_name(name) for name in v]
