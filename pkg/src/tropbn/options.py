"""``--dotted.key=value`` overrides for config dataclasses.

A config with registered variants gets a ``type`` option. Fields that exist
only on a variant are prefixed by its alias, so ``SweepConfig`` accepts
``--type=sample --sample.count=100 --genus=22``.
"""
import abc
import sys
import typing as ty
import logging

from dataclasses import dataclass, fields, Field
from fractions import Fraction

from rich.console import Console
from rich.table import Table

from .config import Config, Missing, MISSING, field_default
from . import utils

logger = logging.getLogger(__name__)

T = ty.TypeVar("T")

class OptionParseError(ValueError):
    pass

@dataclass(frozen=True)
class Option:
    name: str
    # int, str, bool, Fraction or a container of those; only used for help
    type: ty.Any
    # MISSING if the option is required
    default: ty.Any | Missing

    @property
    def required(self) -> bool:
        return self.default is MISSING

    @property
    def type_name(self) -> str:
        return self.type.__qualname__ if isinstance(self.type, type) else str(self.type)

@dataclass
class Options(ty.Generic[T]):
    root_type: type[T]
    default: ty.Any | Missing
    opts: list[Option]

    @staticmethod
    def as_options(root: type[T], default: T | Missing = MISSING,
                   *, prefix: str = "") -> "Options[T]":
        return Options(root, default, list(_flatten(root, default, prefix)))

    def parse(self, args: list[str] | None = None,
              parse_all: bool = True, parse_help: bool = True) -> dict[str, str]:
        """Pulls recognized options out of ``args`` (in place)."""
        if args is None:
            args = list(sys.argv[1:])
        opts = list(self.opts)
        if parse_help:
            opts.append(Option("help", bool, False))
        parsed = _scan(args, {o.name for o in opts})
        if parse_all and args:
            raise OptionParseError(
                f"Unknown options {args}. Valid options are {sorted(o.name for o in opts)}.")
        missing = [o.name for o in opts if o.required and o.name not in parsed]
        if missing:
            raise OptionParseError(f"Missing option(s) {', '.join('--' + m for m in missing)}")
        if parse_help and utils.parse_value(parsed.get("help", "false"), bool):
            print_help(opts)
            sys.exit(0)
        return parsed

    def from_parsed(self, parsed: dict[str, str]) -> T:
        return _build(dict(parsed), self.root_type, self.default, "") # type: ignore

def print_help(opts: ty.Sequence[Option], console: Console | None = None):
    table = Table("option", "default", "type", box=None)
    for o in opts:
        default = "" if o.required or o.type is bool else _render(o.default)
        table.add_row(f"--{o.name}", default, o.type_name)
    (console or Console()).print(table)

def _join(prefix: str, name: str) -> str:
    return f"{prefix}.{name}" if prefix else name

def _render(value: ty.Any) -> str:
    if isinstance(value, Fraction):
        return utils.format_rational(value)
    return str(value)

def _is_config(tp: ty.Any) -> bool:
    return isinstance(tp, type) and issubclass(tp, Config)

def _aliases(cls: type) -> dict[type, str]:
    """Variant aliases of ``cls``, or {} when it only registers itself."""
    lookup = {t: alias for alias, t in cls.__variants__.items()} # type: ignore
    if not lookup or (len(lookup) == 1 and cls in lookup):
        return {}
    return lookup

def _default_variant(cls: type, default: ty.Any) -> type | Missing:
    if default is not MISSING:
        return type(default)
    return MISSING if isinstance(cls, abc.ABCMeta) else cls

def _field_path(prefix: str, f: Field) -> str:
    return prefix if f.metadata.get("flat", False) else _join(prefix, f.name)

def _flatten(cls: ty.Any, default: ty.Any, prefix: str,
             base: type | None = None) -> ty.Iterator[Option]:
    if not _is_config(cls):
        yield Option(prefix, cls, default)
        return
    aliases = _aliases(cls) if base is None else {}
    if aliases:
        current = _default_variant(cls, default)
        if current is not MISSING and current not in aliases:
            raise ValueError(f"{current.__name__} is not a registered variant at {prefix!r}")
        yield Option(_join(prefix, "type"), str,
                     aliases[current] if current is not MISSING else MISSING)
    inherited = set() if base is None else {f.name for f in fields(base)}
    for f in fields(cls):
        if f.name in inherited:
            continue
        value = getattr(default, f.name) if default is not MISSING else field_default(f)
        yield from _flatten(f.type, value, _field_path(prefix, f))
    for variant_type, alias in aliases.items():
        if variant_type is cls:
            continue
        own = default if type(default) is variant_type else MISSING
        yield from _flatten(variant_type, own, _join(prefix, alias), base=cls)

def _carried_default(f: Field, default: ty.Any, switched: bool) -> ty.Any:
    """Default for ``f`` when building; keeps explicit values across a variant switch."""
    if default is MISSING or not hasattr(default, f.name):
        return field_default(f)
    value = getattr(default, f.name)
    if not switched:
        return value
    previous = type(default).__dataclass_fields__[f.name] # type: ignore
    return value if value != field_default(previous) else field_default(f)

def _build(parsed: dict[str, str], cls: ty.Any, default: ty.Any, prefix: str) -> ty.Any:
    if not _is_config(cls):
        text = parsed.get(prefix, MISSING)
        if text is MISSING:
            return default
        try:
            return utils.parse_value(text, cls)
        except (ValueError, TypeError, IndexError) as e:
            raise OptionParseError(f"Invalid value {text!r} for --{prefix}: {e}") from e

    alias: str | Missing = MISSING
    target = cls
    if cls.__variants__:
        lookup = {t: a for a, t in cls.__variants__.items()}
        current = _default_variant(cls, default)
        alias = parsed.pop(_join(prefix, "type"), lookup.get(current, MISSING))
        if alias not in cls.__variants__:
            raise OptionParseError(f"Invalid variant {alias} for {cls.__name__}")
        target = cls.__variants__[alias]
    elif default is not MISSING and type(default) is not cls:
        raise OptionParseError(f"Default of type {type(default).__name__} "
                               f"does not match {cls.__name__}")
    switched = default is not MISSING and type(default) is not target

    shared = {f.name for f in fields(cls)}
    kwargs = {}
    for f in fields(target):
        if f.name in shared:
            path = _field_path(prefix, f)
        else:
            path = _field_path(_join(prefix, alias), f)
        value = _build(parsed, f.type, _carried_default(f, default, switched), path)
        if value is not MISSING:
            kwargs[f.name] = value
    return target(**kwargs)

def _scan(args: list[str], valid: set[str]) -> dict[str, str]:
    """Accepts ``--key=value``, ``--key value`` and bare ``--flag``."""
    parsed: dict[str, str] = {}
    consumed: list[int] = []
    pending: str | None = None
    for i, arg in enumerate(args):
        if arg.startswith("--"):
            pending = None
            key, sep, value = arg[2:].partition("=")
            if key not in valid:
                continue
            consumed.append(i)
            if sep:
                parsed[key] = value
            else:
                parsed[key] = "true"
                pending = key
        elif pending is not None:
            consumed.append(i)
            parsed[pending] = arg
            pending = None
    for i in reversed(consumed):
        del args[i]
    return parsed
