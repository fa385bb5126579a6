import collections.abc
import contextlib
import itertools
import types
import typing as ty

from fractions import Fraction
from rich.console import Console
from rich.progress import Progress

RationalLike = Fraction | int | str

def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

def is_int(value: str) -> bool:
    try:
        int(value)
        return True
    except ValueError:
        return False

def parse_rational(value: RationalLike) -> Fraction:
    """Exact parse of ``n`` or ``p/q``; floats and decimals are rejected."""
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        num, sep, den = value.strip().partition("/")
        if is_int(num) and (not sep or is_int(den)):
            if sep and int(den) == 0:
                raise ValueError(f"Zero denominator: {value!r}")
            return Fraction(int(num), int(den) if sep else 1)
    raise ValueError(f"Not a rational number: {value!r}")

def split_list(value: str) -> list[str]:
    """Splits on commas that are not nested in brackets."""
    depth, cuts = 0, [-1]
    for i, c in enumerate(value):
        if c in "[({":
            depth += 1
        elif c in "])}":
            depth -= 1
        elif c == "," and depth == 0:
            cuts.append(i)
    cuts.append(len(value))
    return [value[a + 1:b] for a, b in itertools.pairwise(cuts)]

_SEQUENCES = {
    tuple: tuple, list: list,
    ty.Sequence: tuple, collections.abc.Sequence: tuple,
    ty.MutableSequence: list, collections.abc.MutableSequence: list,
}
_MAPPINGS = (dict, ty.Mapping, collections.abc.Mapping, collections.abc.MutableMapping)

def _optional_inner(tp: ty.Any) -> ty.Any | None:
    if ty.get_origin(tp) in (ty.Union, types.UnionType):
        args = ty.get_args(tp)
        if len(args) == 2 and type(None) in args:
            return args[0] if args[1] is type(None) else args[1]
    return None

def _bracketed(value: str, pairs: str) -> str:
    value = value.strip()
    if len(value) < 2 or value[0] + value[-1] not in pairs:
        raise ValueError(f"Expected one of {pairs.split()} around {value!r}")
    return value[1:-1].strip()

def _parse_sequence(value: str, container: type, args: tuple) -> ty.Any:
    inner = _bracketed(value, "() []")
    items = [item.strip() for item in split_list(inner)] if inner else []
    if not args or (len(args) == 2 and args[1] is Ellipsis):
        item_types: ty.Iterable = itertools.repeat(args[0] if args else ty.Any)
    else:
        if len(args) != len(items):
            raise ValueError(f"Expected {len(args)} items, got {len(items)}")
        item_types = args
    return container(parse_value(item, t) for item, t in zip(items, item_types))

def _parse_mapping(value: str, args: tuple) -> dict:
    key_type, value_type = args or (str, ty.Any)
    inner = _bracketed(value, "{}")
    result = {}
    for item in split_list(inner) if inner else []:
        key, sep, val = item.partition(":")
        if not sep:
            raise ValueError(f"Missing ':' in {item!r}")
        result[parse_value(key.strip(), key_type)] = parse_value(val.strip(), value_type)
    return result

def _guess(value: str) -> ty.Any:
    value = value.strip()
    if value in ("", "None"):
        return None
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    for tp in (int, Fraction, float):
        try:
            return parse_value(value, tp)
        except ValueError:
            pass
    if value[0] + value[-1] in ("[]", "()"):
        return parse_value(value, list)
    if value[0] + value[-1] == "{}":
        return parse_value(value, dict)
    return value

def parse_value(value: str, type: ty.Any) -> ty.Any:
    """Parses a command-line or environment string into ``type``."""
    inner = _optional_inner(type)
    if inner is not None:
        return None if value in ("", "None") else parse_value(value, inner)
    origin = ty.get_origin(type) or type
    if origin in _SEQUENCES:
        return _parse_sequence(value, _SEQUENCES[origin], ty.get_args(type))
    if origin in _MAPPINGS:
        return _parse_mapping(value, ty.get_args(type))
    if type is bool:
        return value.strip().lower() == "true"
    if type is Fraction:
        return parse_rational(value)
    if type in (int, float, str):
        return type(value)
    if type is ty.Any:
        return _guess(value)
    if type is types.NoneType:
        return None
    raise ValueError(f"Unsupported type: {type}")

@contextlib.contextmanager
def progress(total: int | None, description: str = "",
             quiet: bool = False, console: Console | None = None
            ) -> ty.Iterator[ty.Callable[[int], None]]:
    """Yields an ``advance(n)`` callback backed by a rich progress bar,
    or a no-op when ``quiet``."""
    if quiet:
        yield lambda n=1: None
        return
    with Progress(console=console or Console(stderr=True)) as pbar:
        task = pbar.add_task(description, total=total)
        yield lambda n=1: pbar.update(task, advance=n)
