"""
lacuna.py - Command-line entry point

    python lacuna.py check-sc --pres data/genus2.pres --mu 1/6
    python lacuna.py ball --pres data/genus2.pres --radius 4 --out ball.json
    python lacuna.py div --ball ball.json --nmax 1 --format csv
    python lacuna.py gen lacunary --count 3 --format pres

Every subcommand runs the matching tool from tools.TOOLS_BY_COMMAND and wraps
its result in the report envelope. Diagnostics go to stderr.

Exit codes: 0 ok, 1 verdict FAIL (or ok = false), 2 usage or precondition
error, 3 budget exhausted.
"""

import argparse
import json
import logging
import sys
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from cayley import Ball
from config import __version__, setup_logging
from errors import BadParameter, LacunaError
from probes import DivergenceProfile
from tools import TOOLS_BY_COMMAND

logger = logging.getLogger("lacuna")

# Kept out of the config echo so reports match at any parallelism.
UNECHOED = ("threads", "progress")

OutputFormat = Literal["json", "csv", "binary", "pres"]


class RunConfig(BaseModel):
    """One validated CLI invocation."""
    command: str
    args: dict[str, Any] = Field(default_factory=dict)
    out: Optional[str] = None
    format: OutputFormat = "json"
    threads: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    progress: bool = False

    @field_validator("command")
    @classmethod
    def _known(cls, value: str) -> str:
        if value not in TOOLS_BY_COMMAND:
            raise ValueError(f"unknown command {value!r}")
        return value


# ═══════════════════════════════════════════════════════════════════════
#  Argument parsing
# ═══════════════════════════════════════════════════════════════════════

def _tier_mu(text: str) -> tuple[int, str]:
    tier, _, mu = text.partition("=")
    if not mu:
        raise argparse.ArgumentTypeError(f"expected TIER=MU, got {text!r}")
    return int(tier), mu


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, help="Worker threads (default: all cores)")
    common.add_argument("--out", help="Write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "binary", "pres"], help="Report format")
    common.add_argument("--seed", type=int, help="Seed for sampled scans")
    common.add_argument("--progress", action="store_true", help="Progress bars on stderr")
    common.add_argument("-v", "--verbose", action="count", help="-v for INFO, -vv for DEBUG")
    return common


def _ball_source(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--ball", help="Ball JSON export")
    sp.add_argument("--pres", help="Presentation to build the ball from")
    sp.add_argument("--radius", type=int)
    sp.add_argument("--oracle", choices=["free", "dehn", "coset", "abelian"])
    sp.add_argument("--mu")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="lacuna",
        description="Small cancellation, Cayley-ball geometry and hyperbolicity certificates.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"lacuna {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common], argument_default=argparse.SUPPRESS)

    sp = command("check-sc", "C'(mu) small-cancellation check")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--mu")
    sp.add_argument("--tiered", action="store_true")
    sp.add_argument("--tier-mu", dest="tier_mus", type=_tier_mu, action="append", metavar="TIER=MU")

    sp = command("pieces", "List pieces of the symmetrized relators")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--list-limit", type=int)

    sp = command("eps-pieces", "eps-pieces over a base group")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--base-oracle", choices=["free", "dehn", "coset", "abelian"])
    sp.add_argument("--eps", type=int, required=True)
    sp.add_argument("--mu", required=True)
    sp.add_argument("--rho")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--check-geodesic", action="store_true")

    sp = command("graded-check", "Validate a graded small-cancellation schedule")
    sp.add_argument("--schedule", required=True, help="Schedule JSON, inline or a path")
    sp.add_argument("--pres")

    sp = command("sparse-check", "Sparseness sweep of the length spectrum")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--lambda-floor")
    sp.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))

    sp = command("coset", "Todd-Coxeter coset enumeration")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--subgroup", nargs="*")
    sp.add_argument("--max-cosets", type=int)

    sp = command("dehn", "Word problem by Dehn's algorithm")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--equal")
    sp.add_argument("--mu")
    sp.add_argument("--trace", action="store_true")

    sp = command("ball", "Build a Cayley ball")
    sp.add_argument("--pres", required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--oracle", choices=["free", "dehn", "coset", "abelian"])
    sp.add_argument("--mu")
    sp.add_argument("--max-vertices", type=int)
    sp.add_argument("--oracle-budget", type=int)
    sp.add_argument("--max-cosets", type=int)

    sp = command("dist", "Distance between two ball vertices")
    _ball_source(sp)
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--geodesic-limit", type=int)

    sp = command("inj", "Injectivity radius of G -> Q")
    sp.add_argument("--g", required=True)
    sp.add_argument("--g-oracle", choices=["free", "dehn", "coset", "abelian"])
    sp.add_argument("--q", required=True)
    sp.add_argument("--q-oracle", choices=["free", "dehn", "coset", "abelian"])
    sp.add_argument("--cap", type=int, required=True)
    sp.add_argument("--mu")

    sp = command("div", "Divergence of a triple or the Div(n) profile")
    _ball_source(sp)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--delta")
    sp.add_argument("--lambda", dest="lam")
    sp.add_argument("--mode", choices=["EXHAUSTIVE", "SAMPLED"])
    sp.add_argument("--samples", type=int)
    sp.add_argument("--all-centers", action="store_true")
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--c")

    sp = command("delta", "Four-point and thin-triangle hyperbolicity")
    _ball_source(sp)
    sp.add_argument("--basepoint")
    sp.add_argument("--no-thin", dest="thin", action="store_false")
    sp.add_argument("--all-geodesics", action="store_true")

    sp = command("floyd", "Floyd distance")
    _ball_source(sp)
    sp.add_argument("--u")
    sp.add_argument("--v")

    sp = command("rips", "Rips complex at scale d")
    _ball_source(sp)
    sp.add_argument("--d", required=True)
    sp.add_argument("--simplices", action="store_true")

    sp = command("fill", "Fill loops in a Rips complex")
    _ball_source(sp)
    sp.add_argument("--d", required=True)
    sp.add_argument("--loop", nargs="+")
    sp.add_argument("--all-loops", action="store_true")
    sp.add_argument("--max-length", type=int)
    sp.add_argument("--max-cells", type=int)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--delta", dest="iso_delta")

    sp = command("certify", "Local-to-global hyperbolicity certificate")
    _ball_source(sp)
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--R", type=int, required=True)
    sp.add_argument("--test-constants", action="store_true")
    sp.add_argument("--all-centers", action="store_true")

    gen = command("gen", "Example presentations and schedules")
    gens = gen.add_subparsers(dest="generator", required=True)

    def generator(name: str, help_text: str) -> argparse.ArgumentParser:
        return gens.add_parser(name, help=help_text, parents=[common], argument_default=argparse.SUPPRESS)

    sp = generator("aperiodic", "Words with no u^power subword")
    sp.add_argument("--length", type=int, required=True)
    sp.add_argument("--power", type=int)

    sp = generator("lacunary", "Tiered family with a sparse length spectrum")
    sp.add_argument("--source", choices=["aperiodic", "thue-morse"])
    sp.add_argument("--indices")
    sp.add_argument("--count", type=int)
    sp.add_argument("--lambda", dest="lam")
    sp.add_argument("--mu")

    sp = generator("central", "Central extension of base relators")
    sp.add_argument("--relators", nargs="+", required=True)
    sp.add_argument("--k", type=int, nargs="+", required=True)

    sp = generator("gpc", "Finite quotient H_m of G(p, c)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--c", type=int, nargs="+", required=True)
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--budget", type=int)

    sp = generator("gn", "Index-window truncation of G_n")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--c", type=int, nargs="*")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)

    sp = generator("torsion", "Torsion family schedule")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n0", type=int)
    sp.add_argument("--phi", nargs="+", required=True)
    sp.add_argument("--deltas", nargs="+", required=True)
    sp.add_argument("--r-max", type=int, required=True)

    return parser


GLOBAL_KEYS = ("threads", "out", "format", "seed", "progress", "verbose", "command", "generator")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = vars(ns)
    command = values["command"]
    if command == "gen":
        command = f"gen-{values['generator']}"
    args = {k: v for k, v in values.items() if k not in GLOBAL_KEYS}
    if "tier_mus" in args:
        args["tier_mus"] = dict(args["tier_mus"])
    return RunConfig(
        command=command,
        args=args,
        out=values.get("out"),
        format=values.get("format", "json"),
        threads=values.get("threads"),
        seed=values.get("seed"),
        progress=values.get("progress", False),
    )


# ═══════════════════════════════════════════════════════════════════════
#  Dispatch
# ═══════════════════════════════════════════════════════════════════════

def _tool_args(config: RunConfig, fields: dict) -> dict:
    args = dict(config.args)
    if "threads" in fields and config.threads is not None:
        args["threads"] = config.threads
    if "progress" in fields and config.progress:
        args["progress"] = True
    if "seed" in fields and config.seed is not None:
        args.setdefault("seed", config.seed)
    return args


def exit_status(result: dict) -> int:
    if result.get("ok") is False or result.get("verdict") == "FAIL":
        return 1
    return 0


def render_report(config: RunConfig, echo: dict, result: dict) -> str | bytes:
    fmt = config.format
    if fmt == "json":
        envelope = {
            "tool": "lacuna",
            "version": __version__,
            "command": config.command,
            "config": echo,
            "result": result,
        }
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if "profile" not in result:
            raise BadParameter("csv output is only available for divergence profiles")
        return DivergenceProfile.model_validate(result["profile"]).to_csv()
    if fmt == "binary":
        if "ball" not in result:
            raise BadParameter("binary output is only available for balls")
        return Ball.from_dict(result["ball"]).to_binary()
    if "presentation" not in result:
        raise BadParameter("pres output is only available for generated presentations")
    return result["presentation"]


def write_report(report: str | bytes, out: Optional[str]) -> None:
    if out is None:
        if isinstance(report, bytes):
            sys.stdout.buffer.write(report)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(report)
        return
    if isinstance(report, bytes):
        with open(out, "wb") as fh:
            fh.write(report)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report)
    logger.info("[CLI] report written to %s", out)


def dispatch(config: RunConfig) -> int:
    """Run one command, write exactly one report, return the exit status."""
    tool = TOOLS_BY_COMMAND[config.command]
    schema = tool.args_schema
    args = _tool_args(config, schema.model_fields)
    validated = schema.model_validate(args)
    echo = {k: v for k, v in sorted(validated.model_dump(mode="json").items()) if k not in UNECHOED}

    logger.info("[CLI] %s", config.command)
    result = json.loads(tool.invoke(args))
    if "trace_text" in result:
        print(result["trace_text"], file=sys.stderr)
    write_report(render_report(config, echo, result), config.out)
    return exit_status(result)


def main(argv: Optional[list[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    verbose = getattr(ns, "verbose", 0) or 0
    setup_logging({0: None, 1: "INFO"}.get(verbose, "DEBUG"))
    try:
        return dispatch(config_from_args(ns))
    except LacunaError as exc:
        print(f"lacuna: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"lacuna: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"lacuna: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
