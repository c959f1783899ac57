"""
Command-line entry point.

Reports are line-oriented (``key = value`` and ``check: ok``) on stdout;
logging goes to stderr. Exit codes: 0 success, 1 a mathematical check
failed, 2 usage or configuration error.
"""

import argparse
import logging
import sys
import tomllib
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .braided import BraidedVectorSpace, braid_check, make_block, make_block_point, make_custom, make_diagonal
from .config import settings
from .errors import ConfigError, JordanPlaneError
from .freealg import FreeElement, braid_word_action, brute_force_symmetrizer, braided_coproduct, primitivity_defect
from .lifting import (
    LiftingPresentation,
    SmashElement,
    build_lifting,
    hopf_ideal_check,
    iso_classify,
    one_dim_rep,
    pbw_check,
    smash_coproduct,
    zero_divisor_witness,
)
from .monitoring import render_metrics
from .nichols import adjoin_primitive_params, ghost_of, nichols_dims, relation_generators, gkdim_lookup
from .rewrite import MonomialOrder, complete_to_degree, dump_system, hilbert_function, normal_form
from .scalar import Matrix, Scalar, as_scalar, format_scalar, is_root_of_unity, parse_scalar, rank
from .ydcat import (
    BlockType,
    FGAbelianGroup,
    YDTriple,
    classify_dim2,
    evaluate,
    infinite_cyclic,
    make_triple,
    realize_braiding,
    standard_triple,
    transport_triple,
    validate_yd_triple,
)

logger = logging.getLogger(__name__)

NAMED_SPACES = ("jordan", "super-jordan", "block-point")
NAMED_TRIPLES = {"jordan": 1, "super-jordan": -1}


# ---------- run configuration ----------
class SpaceSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = "jordan"  # jordan, super-jordan, block, block-point, diagonal, custom
    eps: Optional[str] = None
    ell: Optional[int] = None
    q12: Optional[str] = None
    q21: Optional[str] = None
    q22: Optional[str] = None
    a: Optional[str] = None
    q: Optional[List[List[str]]] = None
    dim: Optional[int] = None
    coeff: Optional[list] = None


class GroupSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    free_rank: int = 1
    torsion: List[int] = Field(default_factory=list)


class TripleSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    g: List[int]
    chi: List[str]
    eta: List[str]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    conductor: Optional[int] = None
    lambda_: Optional[str] = Field(default=None, alias="lambda")
    max_degree: Optional[int] = None
    element: Optional[str] = None
    relations: Optional[List[str]] = None
    space: Optional[SpaceSection] = None
    group: Optional[GroupSection] = None
    triple: Optional[TripleSection] = None


def load_config(path: str) -> RunConfig:
    """Read and validate a TOML run configuration; unknown keys are errors."""
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed config {path}: {e}") from e
    return RunConfig.model_validate(data)


class Context:
    """Parsed arguments plus the optional config, with the resolved conductor."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
        self.conductor = args.conductor or self.config.conductor or settings.CONDUCTOR

    def scalar(self, text) -> Scalar:
        return as_scalar(text, self.conductor)

    def max_degree(self, default: int) -> int:
        if self.args.max_degree is not None:
            return self.args.max_degree
        if self.config.max_degree is not None:
            return self.config.max_degree
        return default

    # ---------- spaces and triples ----------
    def space(self) -> BraidedVectorSpace:
        name = getattr(self.args, "space", None)
        if name is None and self.config.space is None and self.config.triple is not None:
            return realize_braiding(self.triple())
        section = self.config.space if name is None else SpaceSection(kind=name)
        if section is None:
            section = SpaceSection()
        return self._build_space(section)

    def _build_space(self, s: SpaceSection) -> BraidedVectorSpace:
        n = self.conductor
        if s.kind == "jordan":
            return make_block(1, 2, n)
        if s.kind == "super-jordan":
            return make_block(-1, 2, n)
        if s.kind == "block":
            return make_block(self.scalar(s.eps or "1"), s.ell or 2, n)
        if s.kind == "block-point":
            values = getattr(self.args, "params", None)
            if values:
                parts = [p.strip() for p in values.split(",")]
                if len(parts) != 5:
                    raise ConfigError("--params needs eps,q12,q21,q22,a")
                return make_block_point(*parts, conductor=n)
            if None in (s.eps, s.q12, s.q21, s.q22, s.a):
                raise ConfigError("block-point needs eps, q12, q21, q22 and a")
            return make_block_point(s.eps, s.q12, s.q21, s.q22, s.a, n)
        if s.kind == "diagonal":
            if not s.q:
                raise ConfigError("diagonal space needs q")
            return make_diagonal(s.q, n)
        if s.kind == "custom":
            if s.dim is None or s.coeff is None:
                raise ConfigError("custom space needs dim and coeff")
            return make_custom(s.dim, s.coeff, n)
        raise ConfigError(f"unknown space kind {s.kind!r}")

    def triple(self) -> YDTriple:
        name = getattr(self.args, "triple", None)
        if name is not None:
            return standard_triple(NAMED_TRIPLES[name], self.conductor)
        section = self.config.triple
        if section is None:
            raise ConfigError("a YD-triple is required: use --triple or a [triple] config section")
        group = infinite_cyclic()
        if self.config.group is not None:
            group = FGAbelianGroup(self.config.group.free_rank, tuple(self.config.group.torsion))
        return make_triple(group, section.g, section.chi, section.eta, self.conductor)

    def lam(self) -> Scalar:
        value = getattr(self.args, "lam", None)
        if value is None:
            value = self.config.lambda_ or "0"
        return self.scalar(value)

    def lifting(self, degree: Optional[int] = None) -> LiftingPresentation:
        return build_lifting(self.triple(), self.lam(), degree)

    def element_text(self) -> str:
        text = getattr(self.args, "element", None) or self.config.element
        if not text:
            raise ConfigError("an element is required: use --element or the config key element")
        return text

    def relation_texts(self) -> Optional[List[str]]:
        text = getattr(self.args, "relations", None)
        if text:
            return [r for r in (part.strip() for part in text.split(";")) if r]
        return self.config.relations


def _emit(key: str, value) -> None:
    print(f"{key} = {value}")


def _verdict(name: str, ok: bool) -> int:
    print(f"{name}: {'ok' if ok else 'fail'}")
    return 0 if ok else 1


def _parse_rows(text: str, conductor: Optional[int] = None) -> List[List[Scalar]]:
    rows = [row.replace(",", " ").split() for row in text.split(";")]
    return [[as_scalar(entry, conductor) for entry in row] for row in rows if row]


def _parse_int_rows(text: str) -> List[List[int]]:
    try:
        return [[int(x) for x in row.replace(",", " ").split()] for row in text.split(";") if row.strip()]
    except ValueError as e:
        raise ConfigError(f"integer matrix expected, got {text!r}") from e


def _emit_triple(t: YDTriple) -> None:
    _emit("group", t.group.describe())
    _emit("g", " ".join(str(e) for e in t.g))
    _emit("chi", " ".join(format_scalar(v) for v in t.chi.values))
    _emit("eta", " ".join(format_scalar(v) for v in t.eta.values))


# ---------- braided spaces and Nichols algebras ----------
def cmd_check_braid(ctx: Context) -> int:
    result = braid_check(ctx.space())
    if not result.ok:
        _emit("counterexample", " ".join(f"x{i}" for i in result.counterexample))
    return _verdict("braid", result.ok)


def cmd_dims(ctx: Context) -> int:
    space = ctx.space()
    degree = ctx.max_degree(6)
    if ctx.args.brute_force:
        dims = [1] + [rank(brute_force_symmetrizer(space, n)) for n in range(1, degree + 1)]
        print(" ".join(str(d) for d in dims))
    else:
        print(nichols_dims(space, degree))
    return 0


def cmd_relations(ctx: Context) -> int:
    space = ctx.space()
    degrees = [ctx.args.degree] if ctx.args.degree else range(2, ctx.max_degree(4) + 1)
    for n in degrees:
        generators = relation_generators(space, n)
        if not generators:
            print(f"degree {n}: none")
        for e in generators:
            print(f"degree {n}: {e}")
    return 0


def cmd_primitives(ctx: Context) -> int:
    t = ctx.triple()
    space = realize_braiding(t)
    z = FreeElement.parse(ctx.element_text(), space)
    system = None
    if ctx.args.modulo:
        relations = [FreeElement.parse(r, space) for r in ctx.args.modulo.split(";") if r.strip()]
        system = complete_to_degree(relations, degree=max(ctx.args.m, 2))
    params = adjoin_primitive_params(t, z, ctx.args.m, system)
    for key in ("q12", "q21", "q22", "a", "ghost"):
        _emit(key, getattr(params, key))
    verdict = gkdim_lookup(params.q12q21, params.eps, params.q22, params.ghost, ctx.conductor)
    _emit("gkdim", verdict.describe())
    return 0


def cmd_ghost(ctx: Context) -> int:
    ghost = ghost_of(ctx.scalar(ctx.args.eps), ctx.scalar(ctx.args.a), ctx.conductor)
    _emit("ghost", ghost.value)
    _emit("discrete", "yes" if ghost.discrete else "no")
    return 0


def cmd_gkdim(ctx: Context) -> int:
    a = ctx.args
    verdict = gkdim_lookup(a.q12q21, a.eps, a.q22, a.ghost, ctx.conductor)
    print(verdict.describe())
    return 0


def cmd_coproduct(ctx: Context) -> int:
    space = ctx.space()
    e = FreeElement.parse(ctx.element_text(), space)
    _emit("delta", braided_coproduct(space, e))
    _emit("primitive", "yes" if not primitivity_defect(space, e) else "no")
    return 0


def cmd_braid(ctx: Context) -> int:
    space = ctx.space()
    e = FreeElement.parse(ctx.element_text(), space)
    if not e.is_homogeneous():
        raise ConfigError(f"braid needs a homogeneous element, got {e}")
    try:
        word = [int(s) for s in ctx.args.word.replace(",", " ").split()]
    except ValueError as err:
        raise ConfigError(f"braid word must list integers, got {ctx.args.word!r}") from err
    _emit("image", braid_word_action(space, e.degree(), word, e))
    return 0


# ---------- rewriting ----------
def _free_system(ctx: Context, degree: int):
    space = ctx.space()
    texts = ctx.relation_texts()
    if texts:
        relations = [FreeElement.parse(r, space) for r in texts]
    else:
        relations = [e for n in (2, 3) for e in relation_generators(space, n)]
    order = MonomialOrder(tuple(int(v) for v in ctx.args.order.split(","))) if ctx.args.order else MonomialOrder()
    return space, complete_to_degree(relations, order, degree, dim=space.dim)


def cmd_complete(ctx: Context) -> int:
    _, system = _free_system(ctx, ctx.max_degree(settings.REWRITE_DEGREE))
    print(dump_system(system))
    return 0


def cmd_nf(ctx: Context) -> int:
    space, system = _free_system(ctx, ctx.max_degree(settings.REWRITE_DEGREE))
    _emit("nf", normal_form(system, FreeElement.parse(ctx.element_text(), space)))
    return 0


def cmd_hilbert(ctx: Context) -> int:
    degree = ctx.max_degree(settings.REWRITE_DEGREE)
    _, system = _free_system(ctx, degree)
    print(hilbert_function(system, degree))
    return 0


# ---------- YD-triples ----------
def cmd_classify(ctx: Context) -> int:
    matrix = Matrix.from_rows(_parse_rows(ctx.args.matrix, ctx.conductor), ctx.conductor)
    result = classify_dim2(matrix, (ctx.args.degree,), infinite_cyclic())
    if isinstance(result, BlockType):
        _emit("type", "block")
        _emit("eps", result.eps)
        _emit("x1", " ".join(format_scalar(v) for v in result.basis.column(0)))
        _emit("x2", " ".join(format_scalar(v) for v in result.basis.column(1)))
        if result.triple is None:
            _emit("triple", "none")
        else:
            _emit_triple(result.triple)
    else:
        _emit("type", "diagonal")
    return 0


def cmd_validate(ctx: Context) -> int:
    report = validate_yd_triple(ctx.triple())
    if report.kind:
        _emit("kind", report.kind)
    for v in report.violations:
        _emit("violation", v)
    for note in report.notes:
        _emit("note", note)
    return _verdict("triple", report.ok)


def cmd_evaluate(ctx: Context) -> int:
    t = ctx.triple()
    h = t.group.element(_parse_int_rows(ctx.args.at)[0] if ctx.args.at.strip() else ())
    _emit("chi", evaluate(t.chi, h))
    _emit("eta", evaluate(t.eta, h))
    return 0


def cmd_transport(ctx: Context) -> int:
    t = transport_triple(ctx.triple(), _parse_int_rows(ctx.args.matrix))
    _emit_triple(t)
    return 0


def cmd_scalar(ctx: Context) -> int:
    s = parse_scalar(ctx.args.value, ctx.conductor)
    _emit("value", s)
    order = None if s.is_zero() else is_root_of_unity(s)
    _emit("root-of-unity", order if order is not None else "no")
    return 0


# ---------- liftings ----------
def cmd_lift_build(ctx: Context) -> int:
    p = ctx.lifting(ctx.max_degree(settings.REWRITE_DEGREE))
    _emit("case", p.case.value)
    _emit("lambda", p.lam)
    _emit("flat", "yes" if p.flat else "no")
    print(dump_system(p.system))
    return 0


def cmd_lift_check(ctx: Context) -> int:
    report = hopf_ideal_check(ctx.lifting())
    for name, defect in report.defects:
        _emit(f"defect {name}", defect)
    return _verdict("hopf-ideal", report.ok)


def cmd_lift_pbw(ctx: Context) -> int:
    degree = ctx.max_degree(settings.REWRITE_DEGREE)
    report = pbw_check(ctx.lifting(degree), degree)
    _emit("counts", " ".join(str(c) for c in report.counts))
    _emit("expected", " ".join(str(c) for c in report.expected))
    _emit("added-rules", report.added_rules)
    for text in report.collapses:
        _emit("collapse", text)
    if report.first_bad_degree is not None:
        _emit("first-bad-degree", report.first_bad_degree)
    return _verdict("pbw", report.ok)


def cmd_lift_iso(ctx: Context) -> int:
    if not ctx.args.other:
        raise ConfigError("lift iso needs --other PATH for the second presentation")
    other = Context(argparse.Namespace(**{**vars(ctx.args), "config": ctx.args.other, "triple": None, "lam": None}))
    other.conductor = ctx.conductor
    result = iso_classify(ctx.lifting(), other.lifting())
    _emit("verdict", result.verdict.value)
    if result.witness is not None:
        _emit("witness", "; ".join(" ".join(str(x) for x in row) for row in result.witness.matrix))
        _emit("scaling", result.scaling)
    if result.obstruction:
        _emit("obstruction", result.obstruction)
    return 0 if result.verdict.value != "inconclusive" else 1


def cmd_lift_nf(ctx: Context) -> int:
    p = ctx.lifting()
    e = SmashElement.parse(ctx.element_text(), p.triple)
    _emit("nf", normal_form(p.system, e))
    return 0


def cmd_lift_coproduct(ctx: Context) -> int:
    t = ctx.triple()
    _emit("delta", smash_coproduct(t, SmashElement.parse(ctx.element_text(), t)))
    return 0


def cmd_lift_rep(ctx: Context) -> int:
    report = one_dim_rep(ctx.lifting(), ctx.scalar(ctx.args.x1), ctx.scalar(ctx.args.x2))
    for relation, value in report.violated:
        _emit(f"violated {relation}", value)
    return _verdict("rep", report.ok)


def cmd_lift_zerodiv(ctx: Context) -> int:
    report = zero_divisor_witness(ctx.lifting(), ctx.scalar(ctx.args.sqrt_lambda))
    _emit("a", report.a)
    _emit("b", report.b)
    _emit("ab", report.product)
    return _verdict("zerodiv", report.ok)


COMMANDS: Dict[str, Callable[[Context], int]] = {
    "check-braid": cmd_check_braid,
    "dims": cmd_dims,
    "relations": cmd_relations,
    "primitives": cmd_primitives,
    "ghost": cmd_ghost,
    "gkdim": cmd_gkdim,
    "table1": cmd_gkdim,
    "coproduct": cmd_coproduct,
    "braid": cmd_braid,
    "complete": cmd_complete,
    "nf": cmd_nf,
    "hilbert": cmd_hilbert,
    "classify": cmd_classify,
    "validate": cmd_validate,
    "evaluate": cmd_evaluate,
    "transport": cmd_transport,
    "scalar": cmd_scalar,
}

LIFT_COMMANDS: Dict[str, Callable[[Context], int]] = {
    "build": cmd_lift_build,
    "check": cmd_lift_check,
    "pbw": cmd_lift_pbw,
    "iso": cmd_lift_iso,
    "nf": cmd_lift_nf,
    "coproduct": cmd_lift_coproduct,
    "rep": cmd_lift_rep,
    "zerodiv": cmd_lift_zerodiv,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--conductor", type=int, default=None, help="work over Q(zeta_N)")
    common.add_argument("--max-degree", type=int, default=None)
    common.add_argument("--config", default=None, help="TOML run configuration")
    common.add_argument("--metrics", action="store_true", help="print Prometheus metrics to stderr")
    common.add_argument("-v", "--verbose", action="store_true")

    space_args = argparse.ArgumentParser(add_help=False)
    space_args.add_argument("--space", choices=NAMED_SPACES, default=None)
    space_args.add_argument("--params", default=None, help="eps,q12,q21,q22,a for --space block-point")

    triple_args = argparse.ArgumentParser(add_help=False)
    triple_args.add_argument("--triple", choices=sorted(NAMED_TRIPLES), default=None)

    lift_args = argparse.ArgumentParser(add_help=False, parents=[triple_args])
    lift_args.add_argument("--lambda", dest="lam", default=None)

    parser = argparse.ArgumentParser(prog="jordanplane", description="Jordan and super Jordan planes and their liftings")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check-braid", parents=[common, space_args], help="verify the braid equation")
    p = sub.add_parser("dims", parents=[common, space_args], help="graded dimensions of B(V)")
    p.add_argument("--brute-force", action="store_true", help="use the n!-term symmetrizer")
    p = sub.add_parser("relations", parents=[common, space_args], help="new minimal relations of B(V)")
    p.add_argument("--degree", type=int, default=None)
    p = sub.add_parser("primitives", parents=[common, triple_args], help="parameters of an adjoined primitive")
    p.add_argument("--element", default=None)
    p.add_argument("--m", type=int, required=True, help="x-degree of the element")
    p.add_argument("--modulo", default=None, help="relations (separated by ';') to reduce by")
    p = sub.add_parser("ghost", parents=[common], help="ghost of a block plus a point")
    p.add_argument("--eps", required=True)
    p.add_argument("--a", required=True)
    p = sub.add_parser("gkdim", aliases=["table1"], parents=[common], help="finite GKdim table lookup")
    for flag in ("--q12q21", "--eps", "--q22", "--ghost"):
        p.add_argument(flag, required=True)
    p = sub.add_parser("coproduct", parents=[common, space_args], help="braided coproduct in T(V)")
    p.add_argument("--element", default=None)
    p = sub.add_parser("braid", parents=[common, space_args], help="braid group action on V^(x)n")
    p.add_argument("--element", default=None, help="homogeneous element of degree n")
    p.add_argument("--word", default="", help='adjacent transpositions, e.g. "1 2 1"')
    for name in ("complete", "nf", "hilbert"):
        p = sub.add_parser(name, parents=[common, space_args], help=f"rewriting: {name}")
        p.add_argument("--relations", default=None, help="relations separated by ';'")
        p.add_argument("--order", default=None, help="variables smallest first, e.g. 2,1")
        if name == "nf":
            p.add_argument("--element", default=None)
    p = sub.add_parser("classify", parents=[common], help="classify a 2-dimensional module over Z")
    p.add_argument("--matrix", required=True, help="rows separated by ';'")
    p.add_argument("--degree", type=int, default=1, choices=(1, -1))
    sub.add_parser("validate", parents=[common, triple_args], help="validate a YD-triple")
    p = sub.add_parser("evaluate", parents=[common, triple_args], help="chi and eta at a group element")
    p.add_argument("--at", required=True, help='exponent vector, e.g. 3 or "1 0"')
    p = sub.add_parser("transport", parents=[common, triple_args], help="transport a triple along an automorphism")
    p.add_argument("--matrix", required=True, help="integer rows separated by ';'")
    p = sub.add_parser("scalar", parents=[common], help="canonical form of a scalar")
    p.add_argument("--value", required=True)

    lift = sub.add_parser("lift", help="liftings U(D, lambda)")
    lift_sub = lift.add_subparsers(dest="lift_command", required=True)
    lift_sub.add_parser("build", parents=[common, lift_args])
    lift_sub.add_parser("check", parents=[common, lift_args])
    lift_sub.add_parser("pbw", parents=[common, lift_args])
    p = lift_sub.add_parser("iso", parents=[common, lift_args])
    p.add_argument("--other", default=None, help="config of the second presentation")
    for name in ("nf", "coproduct"):
        p = lift_sub.add_parser(name, parents=[common, lift_args])
        p.add_argument("--element", default=None)
    p = lift_sub.add_parser("rep", parents=[common, lift_args])
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p = lift_sub.add_parser("zerodiv", parents=[common, lift_args])
    p.add_argument("--sqrt-lambda", required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, dispatch and report; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    handler = LIFT_COMMANDS[args.lift_command] if args.command == "lift" else COMMANDS[args.command]
    try:
        code = handler(Context(args))
    except ValidationError as e:
        print(f"error = invalid config: {e.errors()[0]['msg']} at {'.'.join(str(x) for x in e.errors()[0]['loc'])}")
        code = 2
    except JordanPlaneError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        print(f"error = {e}")
        code = 2
    if args.metrics or settings.ENABLE_METRICS:
        print(render_metrics(), file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
