import click
import dataclasses
import functools
import json
import logging
import rich
import sys
import typing as ty

from rich.console import Console
from rich.logging import RichHandler

from .chowring import (
    ChernRootMonomial, chern_number_general, harris_tu_monomial, parse_expr,
)
from .errors import ParameterError, PipelineError, StructureError, VerificationError, TropBNError
from .graph import DEFAULT_SEPARATION, ChainConfig
from .independence import (
    balanced_blocks, build_independence, certificate_from_dict, certificate_to_dict,
    check_certificate, theta_divisor_degree,
)
from .options import Options, OptionParseError
from .slopes import slope_report, virtual_class_g23, virtual_class_rho1
from .sweep import SampleSweepConfig, SweepConfig, run_sweep
from .tableaux import (
    Tableau, block_boundaries, brill_noether_number, count_tableaux,
    enumerate_tableaux, lingering_loops, multiplicities_and_weights,
    slope_table, vertex_avoiding_divisor,
)
from .utils import format_rational, parse_rational, parse_value

logger = logging.getLogger(__name__)

_stderr = Console(stderr=True)

USAGE_ERRORS = (OptionParseError, ParameterError, StructureError,
                json.JSONDecodeError, OSError)

def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except USAGE_ERRORS as e:
            _stderr.print(f"[red]error:[/red] {e}", highlight=False)
            sys.exit(2)
        except (VerificationError, PipelineError) as e:
            _stderr.print(f"[red]failed:[/red] {e}", highlight=False)
            sys.exit(1)
    return wrapper

def _emit(payload: ty.Any):
    click.echo(json.dumps(payload))

def _load_json(path: str) -> ty.Any:
    with open(path, encoding="utf-8") as f:
        return json.load(f)

@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log algorithm traces.")
@click.option("--quiet", "-q", is_flag=True, help="Only log warnings; no progress bars.")
@click.pass_context
def tropbn(ctx, verbose, quiet):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    setup_logging(level=level)
    ctx.obj = {"quiet": quiet}

@tropbn.group()
def tableaux():
    """Rectangular standard Young tableaux."""

@tableaux.command("count")
@click.option("--rows", type=int, required=True)
@click.option("--cols", type=int, required=True)
@click.option("--entries", type=int, required=True)
@_handle_errors
def tableaux_count(rows, cols, entries):
    """Count standard fillings by distinct entries of {1..N}."""
    _emit(count_tableaux(rows, cols, entries))

@tableaux.command("enumerate")
@click.option("--rows", type=int, required=True)
@click.option("--cols", type=int, required=True)
@click.option("--entries", type=int, required=True)
@click.option("--limit", type=int, default=None)
@_handle_errors
def tableaux_enumerate(rows, cols, entries, limit):
    """Print tableaux as JSON lines in placement order."""
    for i, t in enumerate(enumerate_tableaux(rows, cols, entries)):
        if limit is not None and i >= limit:
            break
        _emit(t.to_dict())

def analyze_tableau(t: Tableau) -> dict[str, ty.Any]:
    sv = slope_table(t)
    result: dict[str, ty.Any] = {}
    if len(t.rows) == 3 and t.r == 6:
        result.update(block_boundaries(t)._asdict())
        result["block_ends"] = list(balanced_blocks(t)[:2])
    result["lingering"] = sorted(lingering_loops(t))
    result["slopes"] = {"s": [list(v) for v in sv.s],
                        "s_prime": [list(v) for v in sv.s_prime]}
    result["multiplicities"] = multiplicities_and_weights(sv, t.g, t.r, t.d).to_dict()
    result["rho"] = brill_noether_number(t.g, t.r, t.d)
    return result

@tableaux.command("analyze")
@click.option("--file", "path", type=str, required=True)
@_handle_errors
def tableaux_analyze(path):
    """Block boundaries, lingering loops, slopes and multiplicities."""
    _emit(analyze_tableau(Tableau.from_dict(_load_json(path))))

@tropbn.group()
def indep():
    """Independences among pairwise sums of distinguished functions."""

@indep.command("build")
@click.option("--tableau", "path", type=str, required=True)
@click.option("--seed", type=int, default=0, help="Seed for lingering-loop coordinates.")
@click.option("--separation", type=str, default=format_rational(DEFAULT_SEPARATION))
@click.option("--output", type=str, default=None)
@_handle_errors
def indep_build(path, seed, separation, output):
    """Build and verify an independence for one tableau."""
    t = Tableau.from_dict(_load_json(path))
    try:
        chain = ChainConfig(genus=t.g, separation=parse_rational(separation)).make()
    except ValueError as e:
        if isinstance(e, TropBNError):
            raise
        raise ParameterError(f"Invalid separation {separation!r}") from e
    data = vertex_avoiding_divisor(t, chain, seed)
    cert = build_independence(data)
    logger.info(f"deg(2D + div θ) = {theta_divisor_degree(cert, data)}")
    payload = certificate_to_dict(cert, data)
    if output is not None:
        with open(output, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        rich.print(f"Wrote certificate to [bold]{output}[/bold]", file=sys.stderr)
    else:
        _emit(payload)

@indep.command("verify")
@click.option("--cert", "path", type=str, required=True)
@_handle_errors
def indep_verify(path):
    """Re-verify a stored certificate."""
    cert, _ = certificate_from_dict(_load_json(path))
    failure = check_certificate(cert)
    if failure is not None:
        raise VerificationError(
            f"Functions {', '.join(failure.labels)} are not unique minima "
            f"(indices {list(failure.indices)})", failure.labels
        )
    _emit({"verified": True, "functions": len(cert.combination)})

@indep.command("sweep", context_settings={"ignore_unknown_options": True,
                                          "allow_extra_args": True})
@click.option("--genus", type=int, default=21)
@click.option("--sample", type=int, default=None, help="Number of random tableaux.")
@click.option("--seed", type=int, default=0)
@click.option("--jobs", type=int, default=None)
@click.pass_context
@_handle_errors
def indep_sweep(ctx, genus, sample, seed, jobs):
    """Sweep the construction over all (or sampled) tableaux."""
    base = SweepConfig() if sample is None else SampleSweepConfig(count=sample, seed=seed)
    overrides: dict[str, ty.Any] = {"genus": genus}
    if jobs is not None:
        overrides["jobs"] = jobs
    if sample is None:
        overrides["lingering_seed"] = seed
    default = dataclasses.replace(base, **overrides)
    opts = Options.as_options(SweepConfig, default=default)
    cfg = opts.from_parsed(opts.parse(list(ctx.args)))
    report = run_sweep(cfg, quiet=ctx.obj["quiet"])
    _emit(report.to_dict())
    if report.failures:
        sys.exit(1)

@tropbn.group()
def chow():
    """Intersection numbers on W^r_d."""

@chow.command("harris-tu")
@click.option("--g", "genus", type=int, required=True)
@click.option("--r", "rank", type=int, required=True)
@click.option("--d", "degree", type=int, required=True)
@click.option("--exp", "exponents", type=str, required=True,
              help="Comma-separated root exponents, e.g. 3,0.")
@click.option("--printed", is_flag=True, help="Omit the +1 correction.")
@_handle_errors
def chow_harris_tu(genus, rank, degree, exponents, printed):
    """Evaluate x_1^i_1 ⋯ x_{r+1}^i_{r+1} · θ^rest."""
    try:
        exps = parse_value(f"({exponents})", tuple[int, ...])
    except ValueError as e:
        raise OptionParseError(f"Invalid exponents {exponents!r}") from e
    m = ChernRootMonomial(genus, rank, degree, exps)
    _emit(format_rational(harris_tu_monomial(m, printed=printed)))

@chow.command("eval")
@click.option("--s", "s", type=int, required=True)
@click.option("--expr", "text", type=str, required=True)
@_handle_errors
def chow_eval(s, text):
    """Evaluate a polynomial in θ and Chern classes on W^{2s}_{..}."""
    _emit(format_rational(chern_number_general(s, parse_expr(text))))

@tropbn.command()
@click.option("--genus", type=int, default=None)
@click.option("--s", "s", type=int, default=None)
@click.option("--check/--no-check", default=True, help="Compare stages with recorded polynomials.")
@_handle_errors
def slope(genus, s, check):
    """Class and slope of the degeneracy divisor."""
    if (genus is None) == (s is None):
        raise OptionParseError("Pass exactly one of --genus 23 or --s S")
    if genus is not None:
        if genus != 23:
            raise ParameterError(f"Only genus 23 is supported, got {genus}")
        dc = virtual_class_g23(check=check)
    else:
        dc = virtual_class_rho1(s, check=check)
        genus = 2 * s * s + s + 1
    _emit(slope_report(dc, genus).to_dict())

class CustomLogRender(rich._log_render.LogRender): # type: ignore
    def __call__(self, *args, **kwargs):
        output = super().__call__(*args, **kwargs)
        if not self.show_path:
            output.expand = False
        return output

FORMAT = "%(name)s - %(message)s"

def setup_logging(level=logging.INFO, show_path=False):
    handler = RichHandler(
        markup=True,
        rich_tracebacks=True,
        show_path=show_path,
        console=_stderr
    )
    renderer = CustomLogRender(
        show_time=handler._log_render.show_time,
        show_level=handler._log_render.show_level,
        show_path=handler._log_render.show_path,
        time_format=handler._log_render.time_format,
        omit_repeated_times=handler._log_render.omit_repeated_times,
    )
    handler._log_render = renderer
    logging.basicConfig(
        level=level,
        format=FORMAT,
        datefmt="[%X]",
        handlers=[handler],
        force=True
    )

def main():
    tropbn()
