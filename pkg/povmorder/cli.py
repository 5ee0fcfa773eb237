"""
Command-line front end: validation, entropies, pair classification, construction
and fixture reproduction.

Exit codes: 0 success, 1 semantic failure (invalid POVM, mismatch, bad parameter),
2 I/O or parse error. Human output rounds to 6 decimals; --json keeps full precision.
"""
import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ValidationError

from povmorder.config import Tolerances, settings, use_tolerances
from povmorder.exceptions import InvalidParameterError, PovmOrderError, SchemaError
from povmorder.models import (
    DirectionClassification,
    EntropyConfig,
    EntropyValue,
    LogBase,
    PairClassification,
    SearchBudget,
    StochasticMap,
)
from povmorder.services import (
    ConstructService,
    EntropyService,
    FixtureService,
    LocalStorageService,
    OrderService,
    PovmService,
    create_construct_service,
    create_entropy_service,
    create_fixture_service,
    create_operator_service,
    create_order_service,
    create_povm_service,
    create_search_service,
    create_storage_service,
)

logger = logging.getLogger("povmorder")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2


class RunConfig(BaseModel):
    """Effective configuration of one run; echoed with every result."""

    seed: int
    log_base: LogBase
    tolerances: Tolerances
    budget: SearchBudget
    output: Literal["human", "json"] = "human"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        seed = settings.SEED if args.seed is None else args.seed
        return cls(
            seed=seed,
            log_base=LogBase(args.log_base or settings.LOG_BASE),
            tolerances=settings.tolerances().with_overrides(
                psd=args.tol_psd, span=args.tol_span, stoch=args.tol_stoch
            ),
            budget=SearchBudget(
                samples=settings.SEARCH_SAMPLES if args.samples is None else args.samples,
                refine_steps=settings.SEARCH_REFINE_STEPS if args.budget_refine is None else args.budget_refine,
                workers=settings.SEARCH_WORKERS if args.workers is None else args.workers,
                seed=seed,
            ),
            output="json" if args.json else "human",
        )

    def echo(self) -> str:
        tol = self.tolerances
        return (
            f"seed={self.seed} log_base={self.log_base.value} tol_psd={tol.psd:g} tol_span={tol.span:g} "
            f"tol_stoch={tol.stoch:g} samples={self.budget.samples} refine={self.budget.refine_steps} "
            f"workers={self.budget.workers}"
        )


@dataclass
class Toolkit:
    """Services wired to one RunConfig."""

    povms: PovmService
    entropies: EntropyService
    orders: OrderService
    construct: ConstructService
    fixtures: FixtureService
    storage: LocalStorageService

    @classmethod
    def build(cls, config: RunConfig) -> "Toolkit":
        tol = config.tolerances
        povms = create_povm_service(tol, create_operator_service(tol))
        entropies = create_entropy_service(tol, povms, EntropyConfig(log_base=config.log_base))
        orders = create_order_service(tol, create_search_service(tol, entropies))
        return cls(
            povms=povms,
            entropies=entropies,
            orders=orders,
            construct=create_construct_service(tol, orders),
            fixtures=create_fixture_service(orders=orders),
            storage=create_storage_service(),
        )


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6f}"


def _emit(config: RunConfig, human: str, payload: Dict[str, Any]):
    if config.output == "json":
        document = {"config": config.model_dump(mode="json"), **payload}
        print(json.dumps(document, indent=2))
    else:
        print(f"# {config.echo()}", file=sys.stderr)
        print(human)


# ==================== Commands ====================

def cmd_validate(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    report = kit.povms.validate_document(kit.storage.load_povm_document(args.file))
    human = "valid" if report.valid else "\n".join(
        f"invalid: {v.constraint}" + (f"[{v.index}]" if v.index is not None else "") + f" margin {v.margin:.6g}: {v.message}"
        for v in report.violations
    )
    _emit(config, human, {"report": report.model_dump(mode="json")})
    return EXIT_OK if report.valid else EXIT_FAILURE


def cmd_entropy(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    povm = kit.povms.require_valid(kit.storage.load_povm(args.povm))
    rho = kit.storage.load_state(args.state)
    if args.sigma:
        value = kit.entropies.relative_entropy(povm, rho, kit.storage.load_state(args.sigma))
        quantity = "relative_entropy"
    else:
        value = kit.entropies.observational_entropy(povm, rho)
        quantity = "observational_entropy"
    result = EntropyValue(quantity=quantity, value=value, units=kit.entropies.cfg.units)
    human = "inf" if math.isinf(value) else f"{_fmt(value)} {result.units}"
    _emit(config, human, {"result": result.model_dump(mode="json")})
    return EXIT_OK


def _direction_lines(direction: DirectionClassification) -> List[str]:
    header = f"{direction.coarser} vs {direction.finer}"
    stochastic = "yes" if direction.stochastic else f"no (margin {_fmt(direction.stochastic_margin)})"
    linear = "yes" if direction.linear else f"no (residual {_fmt(direction.linear_residual)})"
    lines = [
        header,
        f"  stochastic: {stochastic}",
        f"  relent:     {direction.relent.label()}",
        f"  entropy:    {direction.entropy.label()}",
        f"  linear:     {linear}",
    ]
    for verdict in (direction.relent, direction.entropy):
        if verdict.witness is not None:
            lines.append(f"    {verdict.relation.value} witness margin {_fmt(verdict.witness.margin)}")
    return lines


def render_classification(result: PairClassification) -> str:
    lines = _direction_lines(result.n_vs_m) + _direction_lines(result.m_vs_n)
    lines.append(f"equivalence: {'yes' if result.equivalence else 'no'}")
    return "\n".join(lines)


def cmd_classify(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    n = kit.povms.require_valid(kit.storage.load_povm(args.n))
    m = kit.povms.require_valid(kit.storage.load_povm(args.m))
    result = kit.orders.classify_pair(n, m, config.budget)
    _emit(config, render_classification(result), {"classification": result.model_dump(mode="json")})
    return EXIT_OK


def cmd_construct(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    out = Path(args.out)
    payload: Dict[str, Any] = {"kind": args.kind}
    lines: List[str] = []

    if args.kind == "postprocess":
        m = kit.povms.require_valid(kit.storage.load_povm(args.povm))
        document = kit.storage.read_json(args.map)
        lam = StochasticMap(document["matrix"] if isinstance(document, dict) else document)
        documents = {"N": kit.construct.postprocess(m, lam)}
    elif args.kind == "eps-mix":
        n = kit.storage.load_povm(args.povm) if args.povm else kit.povms.computational_basis(2)
        if n.count != 2:
            raise InvalidParameterError(f"eps-mix needs a binary POVM, got {n.count} elements")
        pair = kit.construct.binary_epsilon_mix(n.element(0), n.element(1), args.eps)
        documents = {"N": pair.n, "M": pair.m, "pair": pair.to_dict()}
        payload["alpha_is_stochastic"] = pair.alpha_is_stochastic
    elif args.kind == "n-lambda":
        n = kit.povms.require_valid(kit.storage.load_povm(args.povm))
        documents = {"N_lambda": kit.construct.build_n_lambda(n, args.lam)}
        if args.finer:
            m = kit.povms.require_valid(kit.storage.load_povm(args.finer))
            separation = kit.construct.separation_parameters(n, m)
            payload["separation"] = separation.model_dump()
            lines.append(
                f"beta={_fmt(separation.beta)} v={_fmt(separation.vol_min)} "
                f"alpha_norm={_fmt(separation.alpha_norm)} lambda'={_fmt(separation.lambda_prime)} "
                f"lambda''={_fmt(separation.lambda_double_prime)}"
            )
    else:
        bundle = kit.fixtures.example_fixture(args.name)
        documents = {**bundle.povms, **bundle.states, "fixture": bundle.fixture.model_dump(mode="json")}

    written = kit.storage.save_bundle(documents, out)
    payload["written"] = {name: str(path) for name, path in written.items()}
    lines = [f"wrote {path}" for path in written.values()] + lines
    _emit(config, "\n".join(lines), payload)
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    report = kit.fixtures.reproduce(tolerance=args.tolerance, budget=config.budget)
    _emit(config, report.to_markdown(), {"report": report.model_dump(mode="json")})
    for failure in report.failures():
        print(
            f"MISMATCH {failure.fixture}/{failure.key}: expected {failure.expected}, computed {failure.computed}",
            file=sys.stderr,
        )
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_serve(args: argparse.Namespace, config: RunConfig, kit: Toolkit) -> int:
    from povmorder.main import run

    run(host=args.host, port=args.port)
    return EXIT_OK


# ==================== Parser ====================

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"root seed (default {settings.SEED})")
    common.add_argument("--log-base", choices=["2", "e"], default=None, help="entropy units: bits or nats")
    common.add_argument("--tol-psd", type=float, default=None)
    common.add_argument("--tol-span", type=float, default=None)
    common.add_argument("--tol-stoch", type=float, default=None)
    common.add_argument("--samples", type=int, default=None, help="random samples per falsification search")
    common.add_argument("--budget-refine", type=int, default=None, help="hill-climbing steps after sampling")
    common.add_argument("--workers", type=int, default=None, help="threads evaluating sample chunks")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="povmorder", description=settings.APP_NAME)
    parser.add_argument("--version", action="version", version=settings.APP_VERSION)
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="check a POVM file")
    validate.add_argument("file")
    validate.set_defaults(handler=cmd_validate)

    entropy = commands.add_parser("entropy", parents=[common], help="observational or relative entropy")
    entropy.add_argument("povm")
    entropy.add_argument("state")
    entropy.add_argument("--sigma", default=None, help="second state; switches to relative entropy")
    entropy.set_defaults(handler=cmd_entropy)

    classify = commands.add_parser("classify", parents=[common], help="decide all orderings of a pair")
    classify.add_argument("n")
    classify.add_argument("m")
    classify.set_defaults(handler=cmd_classify)

    construct = commands.add_parser("construct", help="write constructed POVMs as JSON")
    kinds = construct.add_subparsers(dest="kind", required=True)
    postprocess = kinds.add_parser("postprocess", parents=[common])
    postprocess.add_argument("--povm", required=True)
    postprocess.add_argument("--map", required=True, help="JSON column-stochastic matrix")
    eps_mix = kinds.add_parser("eps-mix", parents=[common])
    eps_mix.add_argument("--eps", type=float, required=True)
    eps_mix.add_argument("--povm", default=None, help="binary POVM (default: qubit computational basis)")
    n_lambda = kinds.add_parser("n-lambda", parents=[common])
    n_lambda.add_argument("--povm", required=True)
    n_lambda.add_argument("--lambda", dest="lam", type=float, required=True)
    n_lambda.add_argument("--finer", default=None, help="partner POVM; prints separation parameters")
    example = kinds.add_parser("example", parents=[common])
    example.add_argument("name")
    for sub in (postprocess, eps_mix, n_lambda, example):
        sub.add_argument("--out", default=".", help="output directory")
        sub.set_defaults(handler=cmd_construct)

    reproduce = commands.add_parser("reproduce", parents=[common], help="check the example fixtures")
    reproduce.add_argument("--tolerance", type=float, default=None)
    reproduce.set_defaults(handler=cmd_reproduce)

    serve = commands.add_parser("serve", parents=[common], help="start the HTTP API")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = RunConfig.from_args(args)
        logger.debug(f"{args.command}: {config.echo()}")
        with use_tolerances(config.tolerances):
            return args.handler(args, config, Toolkit.build(config))
    except (OSError, json.JSONDecodeError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (PovmOrderError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
