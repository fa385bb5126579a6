"""Frozen config dataclasses with named variants.

``@config(variant="sample")`` registers a subclass under an alias on every
config base in its MRO; ``to_dict`` records the alias under ``"type"`` and
``from_dict`` dispatches on it. Rationals serialize as ``"p/q"`` strings.
"""
from dataclasses import (
    dataclass, field as _field, fields, Field,
    MISSING as DC_MISSING,
)
from fractions import Fraction
from . import utils
import typing as ty
import functools
import abc
import os

T = ty.TypeVar("T")

class Missing:
    def __repr__(self):
        return "???"

MISSING: ty.Any = Missing() # type: ignore

class ConfigType(type):
    def __init__(self, cls, bases, namespace):
        super().__init__(cls, bases, namespace)
        self.__variants__: dict[str, type] = {}

    def variant_alias(self, variant: type) -> str | None:
        for alias, t in self.__variants__.items():
            if t is variant:
                return alias
        return None

# Abstract configs need a metaclass deriving from both
class AbstractConfigType(ConfigType, abc.ABCMeta):
    pass

class Config(object, metaclass=ConfigType):
    def to_dict(self) -> dict[str, ty.Any]:
        data = {f.name: _encode(getattr(self, f.name), f.type) for f in fields(self)} # type: ignore
        cls = type(self)
        if len(cls.__variants__) > 1 and cls.variant_alias(cls) is not None:
            data["type"] = cls.variant_alias(cls)
        return data

    @classmethod
    def from_dict(cls, data: ty.Mapping[str, ty.Any]) -> ty.Self:
        alias = data.get("type")
        if alias is not None and cls.__variants__.get(alias, cls) is not cls:
            return cls.__variants__[alias].from_dict(data)
        kwargs = {}
        for f in fields(cls): # type: ignore
            if f.name in data and data[f.name] is not None:
                kwargs[f.name] = _decode(data[f.name], f.type)
            else:
                value = field_default(f)
                if value is not MISSING:
                    kwargs[f.name] = value
        return cls(**kwargs)

def _encode(value: ty.Any, declared: ty.Any) -> ty.Any:
    if isinstance(value, Config):
        data = value.to_dict()
        if declared is not type(value):
            alias = getattr(declared, "variant_alias", lambda _: None)(type(value))
            if alias is None:
                raise TypeError(f"{type(value).__name__} is not a variant of {declared}")
            data["type"] = alias
        return data
    if isinstance(value, Fraction):
        return utils.format_rational(value)
    return value

def _decode(value: ty.Any, declared: ty.Any) -> ty.Any:
    if isinstance(declared, type) and issubclass(declared, Config):
        return declared.from_dict(value)
    if isinstance(value, str):
        return utils.parse_value(value, declared)
    if declared is Fraction:
        return utils.parse_rational(value)
    return value

def field_default(f: Field) -> ty.Any:
    """The effective default of a config field, or MISSING if required.
    Fields declared with ``env=`` read the environment first."""
    env = f.metadata.get("env")
    if env and os.environ.get(env):
        return utils.parse_value(os.environ[env], f.type) # type: ignore
    if f.default is not DC_MISSING:
        return f.default
    if f.default_factory is not DC_MISSING:
        return f.default_factory()
    return MISSING

def field(*, default: ty.Any = MISSING,
          default_factory: ty.Callable[[], ty.Any] | Missing = MISSING,
          flat: bool = False, env: str | None = None) -> ty.Any:
    if env is not None and default is not MISSING and default_factory is MISSING:
        # The environment is read when the config is instantiated
        default_factory = functools.partial(_from_env, env, default)
        default = MISSING
    return _field(
        default=DC_MISSING if default is MISSING else default,
        default_factory=DC_MISSING if default_factory is MISSING else default_factory, # type: ignore
        metadata={"flat": flat, "env": env})

def _from_env(env: str, fallback: ty.Any) -> ty.Any:
    value = os.environ.get(env)
    return utils.parse_value(value, type(fallback)) if value else fallback

@ty.dataclass_transform()
@ty.overload
def config(cls: None = None, *, variant: str | None = None) -> ty.Callable[[ty.Type[T]], ty.Type[T]]: ...

@ty.dataclass_transform()
@ty.overload
def config(cls: ty.Type[T], *, variant: str | None = None) -> ty.Type[T]: ...

def config(cls = None, *, variant = None): # type: ignore
    if cls is None:
        return functools.partial(config, variant=variant)
    metaclass = AbstractConfigType if abc.ABC in cls.mro() else ConfigType
    base = dataclass(cls, frozen=True) # type: ignore
    for f in base.__dataclass_fields__.values():
        if isinstance(f.type, str):
            raise TypeError(f"Field {f.name} of {cls.__name__} needs a real type, got {f.type!r}")

    wrapped = metaclass(cls.__name__, (base, Config), {
        "__module__": cls.__module__,
        "__qualname__": cls.__qualname__,
        "__doc__": cls.__doc__,
    })
    if variant is not None:
        for parent in wrapped.mro()[:-1]:
            if isinstance(parent, ConfigType):
                parent.__variants__[variant] = wrapped
    return wrapped
