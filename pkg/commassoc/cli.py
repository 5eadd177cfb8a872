#!/usr/bin/env python3

import logging
import logging.config
import sys
from argparse import ArgumentParser, Namespace
from functools import reduce
from typing import Callable

from commassoc.assoc_decide import (
    EventualOutcome,
    assoc_survey,
    check_instance_direct,
    eventually_satisfies,
    levi_check,
    proof_vine,
    verify_main_theorem,
)
from commassoc.config import OutputMode, RunConfig
from commassoc.expr_eval import ExprSyntaxError, Outcome, bp_sequence, render_expr
from commassoc.finite_group import (
    GroupAxiomError,
    GroupDefinitionError,
    center,
    check_commutator_identities,
    derived_length,
    derived_series,
    is_solvable,
    load_group,
    lower_central_series,
    nilpotency_class,
    upper_central_series,
)
from commassoc.leaf_coloring import (
    ColoringInstance,
    LeafColoring,
    repeated_label_tree_check,
    tightness_table,
    valid_coloring,
    verify_lower_bound,
)
from commassoc.reports import Reporter, format_assignment, open_reporter, verdict_record, verdict_text
from commassoc.thompson_f import (
    LeafCountMismatchError,
    invert,
    multiply,
    pairs_equivalent,
    parse_pair,
    reduce_pair,
    render_pair,
)
from commassoc.tree_core import LEFT, CapExceededError, TreeSyntaxError, VineSpec
from commassoc.vine_rewrite import (
    VinePlacement,
    all_vines,
    check_centralize_propagation,
    render_rewrite,
    render_word,
    rewrite_to_left_vine,
    verify_rewrite,
    vine_expr,
)

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

Handler = Callable[[Namespace, RunConfig, Reporter], int]


def _yes(flag: bool) -> str:
    return 'yes' if flag else 'no'


def _orders(series) -> str:
    return ' > '.join(str(len(term)) for term in series)


def cmd_group_info(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.source, config.order_cap)
    Z = center(G)
    derived = derived_series(G)
    lower = lower_central_series(G)
    upper = upper_central_series(G)
    sequence = bp_sequence(G, config.height_cap)
    nil_class = nilpotency_class(G)
    length = derived_length(G)
    solvable = is_solvable(G)
    text = '\n'.join(
        [
            f'group {G.name}',
            f'order {G.order}',
            f'center {Z.render()} (order {len(Z)})',
            f'derived series {_orders(derived)}',
            f'lower central series {_orders(lower)}',
            f'upper central series {" < ".join(str(len(term)) for term in upper)}',
            f'solvable {_yes(solvable)}',
            f'derived length {length if length is not None else "none"}',
            f'nilpotency class {nil_class if nil_class is not None else "not nilpotent"}',
            f'B_p sizes {", ".join(str(len(b)) for b in sequence.sets)} (cycle from p={sequence.cycle_start})',
        ]
    )
    reporter.emit(
        text,
        group=G.name,
        order=G.order,
        center=len(Z),
        derived_series=[len(term) for term in derived],
        lower_central_series=[len(term) for term in lower],
        upper_central_series=[len(term) for term in upper],
        solvable=solvable,
        derived_length=length,
        nilpotency_class=nil_class,
        bp_sizes=[len(b) for b in sequence.sets],
        bp_cycle_start=sequence.cycle_start,
    )
    return EXIT_OK


def cmd_group_identities(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.source, config.order_cap)
    failure = check_commutator_identities(G, samples=config.samples, seed=config.seed)
    if failure is None:
        reporter.emit(f'{G.name}: commutator identities hold', group=G.name, holds=True)
        return EXIT_OK
    witness = ', '.join(G.label(x) for x in failure.witness)
    reporter.emit(
        f'{G.name}: {failure.identity} fails at x, y, z = {witness}',
        group=G.name,
        holds=False,
        identity=failure.identity,
        witness=[G.label(x) for x in failure.witness],
    )
    return EXIT_FAILS


def cmd_f(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    pairs = [parse_pair(text) for text in args.pairs]
    if args.op == 'eq':
        if len(pairs) != 2:
            msg = f'eq compares two pairs, got {len(pairs)}'
            raise ValueError(msg)
        equivalent = pairs_equivalent(*pairs)
        reporter.emit('equivalent' if equivalent else 'not equivalent', op='eq', equivalent=equivalent)
        return EXIT_OK if equivalent else EXIT_FAILS
    if args.op == 'mul':
        results = [reduce(multiply, pairs)]
    elif args.op == 'inv':
        results = [reduce_pair(invert(p)) for p in pairs]
    else:
        results = [reduce_pair(p) for p in pairs]
    for result in results:
        reporter.emit(render_pair(result), op=args.op, pair=render_pair(result))
    return EXIT_OK


def _survey_options(config: RunConfig) -> dict:
    return {
        'budget': config.budget,
        'sample_threshold': config.sample_threshold,
        'samples': config.samples,
        'seed': config.seed,
        'height_cap': config.height_cap,
    }


def cmd_assoc_check(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    pair = parse_pair(args.pair)
    if args.direct:
        verdict = check_instance_direct(G, pair, budget=config.budget, seed=config.seed)
        text = {
            Outcome.HOLDS: 'satisfied as given',
            Outcome.FAILS: f'not satisfied; counterexample {format_assignment(G, verdict.counterexample)}',
            Outcome.BUDGET_EXCEEDED: 'budget exceeded',
        }[verdict.outcome]
        reporter.emit(
            f'{render_pair(pair)}: {text}',
            group=G.name,
            pair=render_pair(pair),
            outcome=verdict.outcome.value,
            counterexample={name: G.label(v) for name, v in (verdict.counterexample or {}).items()},
        )
        return {Outcome.HOLDS: EXIT_OK, Outcome.FAILS: EXIT_FAILS}.get(verdict.outcome, EXIT_BUDGET)

    verdict = eventually_satisfies(G, pair, workers=config.worker_count, **_survey_options(config))
    reporter.emit(verdict_text(G, verdict), **verdict_record(G, verdict))
    return {EventualOutcome.YES: EXIT_OK, EventualOutcome.NO: EXIT_FAILS}.get(verdict.outcome, EXIT_BUDGET)


def cmd_assoc_survey(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    max_leaves = args.max_leaves or config.max_leaves
    report = assoc_survey(
        G, max_leaves, leaf_cap=config.max_leaves, workers=config.worker_count, **_survey_options(config)
    )
    for verdict in report.verdicts:
        reporter.emit(verdict_text(G, verdict), **verdict_record(G, verdict))
    counts = report.counts
    reporter.emit(
        f'{G.name}, at most {max_leaves} leaves: ' + ', '.join(f'{key} {value}' for key, value in counts.items()),
        group=G.name,
        max_leaves=max_leaves,
        counts=counts,
    )
    return EXIT_BUDGET if counts[EventualOutcome.BUDGET_EXCEEDED.value] else EXIT_OK


def cmd_assoc_levi(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    result = levi_check(G, budget=config.budget)
    reporter.emit(
        f'{G.name}: associative: {_yes(result.direct_assoc)}; class ≤ 2: {_yes(result.class_le_2)}; '
        f'Levi {"consistent" if result.consistent else "INCONSISTENT"}',
        group=G.name,
        direct_assoc=result.direct_assoc,
        class_le_2=result.class_le_2,
        consistent=result.consistent,
    )
    return EXIT_OK if result.consistent else EXIT_FAILS


def cmd_assoc_main_theorem(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    groups = [load_group(source, config.order_cap) for source in args.groups]
    max_leaves = args.max_leaves or config.max_leaves
    report = verify_main_theorem(
        groups, max_leaves, leaf_cap=config.max_leaves, workers=config.worker_count, **_survey_options(config)
    )
    for entry in report.entries:
        counts = ', '.join(f'{key} {value}' for key, value in entry.counts.items())
        reporter.emit(
            f'{entry.group}: solvable {_yes(entry.solvable)}; {counts}; '
            f'{"consistent" if entry.consistent else "INCONSISTENT"}',
            group=entry.group,
            solvable=entry.solvable,
            counts=entry.counts,
            consistent=entry.consistent,
        )
    reporter.emit(
        f'main theorem check {"passed" if report.passed else "FAILED"} at {max_leaves} leaves',
        max_leaves=max_leaves,
        passed=report.passed,
    )
    return EXIT_OK if report.passed else EXIT_FAILS


def cmd_assoc_proof(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    pair = reduce_pair(parse_pair(args.pair))
    found = proof_vine(pair)
    where = 'source' if found.caret_in_source else 'target'
    reporter.emit(
        f'{render_pair(pair)}: free caret at leaves {found.i},{found.i + 1} in the {where}; '
        f'ancestor path {"".join(found.ancestor) or "root"}; j={found.j}; m={found.m}',
        pair=render_pair(pair),
        i=found.i,
        caret_in=where,
        ancestor=''.join(found.ancestor),
        j=found.j,
        m=found.m,
    )
    return EXIT_OK


def _check_height(height: int, config: RunConfig):
    if height > config.height_cap:
        msg = f'tree height {height} exceeds the height cap {config.height_cap}'
        raise CapExceededError(msg, config.height_cap)


def _instance(args: Namespace, config: RunConfig) -> ColoringInstance:
    inst = ColoringInstance(args.n, args.j)
    _check_height(inst.h, config)
    return inst


def _placement(args: Namespace, config: RunConfig) -> VinePlacement:
    _check_height(args.n, config)
    turns = args.turns if args.turns is not None else LEFT * (args.n - 1)
    return VinePlacement(VineSpec.from_text(args.n, turns), (args.side or LEFT).upper())


def cmd_vine_rewrite(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    pl = _placement(args, config)
    result = rewrite_to_left_vine(pl)
    bar = render_rewrite(result, 'bar')
    hat = render_rewrite(result, 'hat')
    lines = [f'vine {render_expr(vine_expr(pl))}', f'= {bar}', f'= {hat}', *result.steps]
    reporter.emit(
        '\n'.join(lines),
        vine=render_expr(vine_expr(pl)),
        bar=bar,
        hat=hat,
        sign=result.sign,
        a_exponent=result.a_exponent,
        conjugators=[render_word(w) for w in result.hat_conjugators],
    )
    return EXIT_OK


def cmd_vine_verify(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    _check_height(args.n, config)
    samples = args.samples or config.samples
    if args.turns is not None:
        placements = [_placement(args, config)]
    else:
        sides = [args.side.upper()] if args.side else ['L', 'R']
        placements = [VinePlacement(vine, side) for vine in all_vines(args.n) for side in sides]
    ok = True
    for pl in placements:
        check = verify_rewrite(G, pl, samples=samples, seed=config.seed)
        ok = ok and check.ok
        label = f'{"".join(pl.vine.turns) or "-"} side {pl.side}'
        mode = 'exhaustive' if check.exhaustive else 'sampled'
        text = f'{label}: ok ({mode}, {check.checked})' if check.ok else f'{label}: {check.reason} at {check.failure}'
        reporter.emit(text, group=G.name, turns=''.join(pl.vine.turns), side=pl.side, ok=check.ok)
    reporter.emit('ok' if ok else 'failed', group=G.name, ok=ok)
    return EXIT_OK if ok else EXIT_FAILS


def cmd_vine_centralize(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    report = check_centralize_propagation(G, args.j, args.multiples)
    if report.ok:
        text = f'{G.name}: ok ({report.hypotheses} centralizing pairs checked)'
    else:
        a, b, n, turns, side = report.failure
        text = f'{G.name}: b={G.label(b)} centralizes l_{n}(a={G.label(a)}, u) but not the {turns or "-"} {side} vine'
    reporter.emit(text, group=G.name, ok=report.ok, hypotheses=report.hypotheses)
    return EXIT_OK if report.ok else EXIT_FAILS


def cmd_color_bound(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    inst = _instance(args, config)
    verdict = verify_lower_bound(inst, exact=args.exact)
    parts = [f'lower bound {verdict.bound}']
    if verdict.exact_minimum is not None:
        parts.append(f'exact minimum {verdict.exact_minimum}')
    parts.append(f'proof clique {verdict.clique_size}')
    if verdict.witness is not None:
        parts.append(f'witness {",".join(str(c) for c in verdict.witness.colors)}')
    reporter.emit(
        '; '.join(parts),
        n=inst.n,
        j=inst.j,
        bound=verdict.bound,
        exact_minimum=verdict.exact_minimum,
        clique_size=verdict.clique_size,
        witness=list(verdict.witness.colors) if verdict.witness else None,
        holds=verdict.holds,
    )
    return EXIT_OK if verdict.holds else EXIT_FAILS


def cmd_color_check(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    inst = _instance(args, config)
    colors = LeafColoring(tuple(int(c) for c in args.colors.split(',')))
    verdict = valid_coloring(inst, colors)
    if verdict.valid:
        reporter.emit('valid', n=inst.n, j=inst.j, valid=True)
        return EXIT_OK
    i, k = verdict.violation
    reporter.emit(
        f'invalid: leaves {i} and {k} at distance {verdict.distance} share color {colors.colors[i]}',
        n=inst.n,
        j=inst.j,
        valid=False,
        violation=[i, k],
    )
    return EXIT_FAILS


def cmd_color_table(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    _check_height(args.max_height, config)
    for row in tightness_table(args.max_height):
        reporter.emit(
            f'n={row.n} j={row.j} h={row.h}: bound {row.bound}, minimum {row.minimum}',
            n=row.n,
            j=row.j,
            h=row.h,
            bound=row.bound,
            minimum=row.minimum,
        )
    return EXIT_OK


def cmd_color_pigeonhole(args: Namespace, config: RunConfig, reporter: Reporter) -> int:
    G = load_group(args.group, config.order_cap)
    _instance(args, config)
    report = repeated_label_tree_check(G, args.j, args.n, labelings=args.labelings, seed=config.seed)
    qs = sorted({found.q for found in report.found})
    reporter.emit(
        f'{G.name}, n={args.n}, j={args.j}: repeated label found in {len(report.found)} of {report.labelings} '
        f'labelings (q in {qs})',
        group=G.name,
        found=len(report.found),
        labelings=report.labelings,
        ok=report.ok,
    )
    return EXIT_OK if report.ok else EXIT_FAILS


def build_parser() -> ArgumentParser:
    parser = ArgumentParser('commassoc', description='Commutator associativity experiments on finite groups')
    parser.add_argument('--seed', type=int, help='Seed for all sampling (default 0)')
    parser.add_argument('--budget', type=int, help='Evaluation budget per search (default 10**10)')
    parser.add_argument('--leaf-cap', type=int, dest='leaf_cap', help='Leaf cap for pair enumeration (default 7)')
    parser.add_argument('--order-cap', type=int, help='Largest group order built by closure (default 5040)')
    parser.add_argument('--height-cap', type=int, help='Largest tree height (default 16)')
    parser.add_argument('--sample-threshold', type=int, help='Search size above which sampling runs first')
    parser.add_argument('--samples', type=int, dest='global_samples', help='Random samples (default 10**4)')
    parser.add_argument('--workers', type=int, help='Worker processes (default: all cores)')
    parser.add_argument('--output', help='Write the report to this file instead of stdout')
    parser.add_argument('--format', choices=[mode.value for mode in OutputMode], help='Report format')
    parser.add_argument('--log-level', help='Logging level (default WARNING)')
    parser.add_argument('--log-file', help='Log to this file instead of stderr')
    areas = parser.add_subparsers(dest='area', required=True)

    def command(area, name: str, handler: Handler, help_text: str) -> ArgumentParser:
        sub = area.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    group = areas.add_parser('group', help='Finite group facts').add_subparsers(dest='command', required=True)
    command(group, 'info', cmd_group_info, 'Order, series, solvability and B_p summary').add_argument('source')
    command(group, 'identities', cmd_group_identities, 'Check the commutator identities').add_argument('source')

    f = command(areas, 'f', cmd_f, "Arithmetic in Thompson's group F")
    f.add_argument('op', choices=['reduce', 'mul', 'inv', 'eq'])
    f.add_argument('pairs', nargs='+', help='Tree pairs "<tree> ; <tree>"')

    assoc = areas.add_parser('assoc', help='Eventual satisfaction').add_subparsers(dest='command', required=True)
    check = command(assoc, 'check', cmd_assoc_check, 'Decide one instance')
    check.add_argument('--group', required=True)
    check.add_argument('--pair', required=True)
    check.add_argument('--direct', action='store_true', help='Check the pair as given, without expansions')
    survey = command(assoc, 'survey', cmd_assoc_survey, 'Decide every reduced pair up to a leaf count')
    survey.add_argument('--group', required=True)
    survey.add_argument('--max-leaves', type=int)
    command(assoc, 'levi', cmd_assoc_levi, 'Compare associativity with class at most 2').add_argument(
        '--group', required=True
    )
    main_theorem = command(assoc, 'main-theorem', cmd_assoc_main_theorem, 'Yes verdicts only for solvable groups')
    main_theorem.add_argument('--groups', nargs='+', required=True)
    main_theorem.add_argument('--max-leaves', type=int)
    command(assoc, 'proof', cmd_assoc_proof, 'Locate the vine used by the solvability argument').add_argument(
        '--pair', required=True
    )

    vine = areas.add_parser('vine', help='Vine rewriting').add_subparsers(dest='command', required=True)
    for name, handler, help_text in (
        ('rewrite', cmd_vine_rewrite, 'Rewrite a vine as a left vine'),
        ('verify', cmd_vine_verify, 'Check rewrites in a group'),
    ):
        sub = command(vine, name, handler, help_text)
        sub.add_argument('--n', type=int, required=True)
        sub.add_argument('--turns', help='Root-down L/R turns, n-1 of them')
        sub.add_argument('--side', default='L' if name == 'rewrite' else None, choices=['L', 'R', 'l', 'r'])
        if name == 'verify':
            sub.add_argument('--group', required=True)
            sub.add_argument('--samples', type=int)
    centralize = command(vine, 'centralize', cmd_vine_centralize, 'Centralizers of left vines pass to all vines')
    centralize.add_argument('--group', required=True)
    centralize.add_argument('--j', type=int, required=True)
    centralize.add_argument('--multiples', type=int, nargs='+', default=[1, 2])

    color = areas.add_parser('color', help='Leaf colorings').add_subparsers(dest='command', required=True)
    bound = command(color, 'bound', cmd_color_bound, 'Lower bound 2^n, optionally with the exact minimum')
    bound.add_argument('--n', type=int, required=True)
    bound.add_argument('--j', type=int, required=True)
    bound.add_argument('--exact', action='store_true')
    check_colors = command(color, 'check', cmd_color_check, 'Validate a coloring')
    check_colors.add_argument('--n', type=int, required=True)
    check_colors.add_argument('--j', type=int, required=True)
    check_colors.add_argument('--colors', required=True, help='Comma separated color indices, one per leaf')
    command(color, 'table', cmd_color_table, 'Exact minima against 2^n').add_argument(
        '--max-height', type=int, default=5
    )
    pigeonhole = command(color, 'pigeonhole', cmd_color_pigeonhole, 'Repeated labels at distance qj+1')
    pigeonhole.add_argument('--group', required=True)
    pigeonhole.add_argument('--j', type=int, required=True)
    pigeonhole.add_argument('--n', type=int, required=True)
    pigeonhole.add_argument('--labelings', type=int, default=100)
    return parser


def resolve_config(args: Namespace) -> RunConfig:
    """Environment first, then command-line flags."""
    config = RunConfig.from_environ()
    overrides = {
        'seed': args.seed,
        'budget': args.budget,
        'max_leaves': args.leaf_cap,
        'order_cap': args.order_cap,
        'height_cap': args.height_cap,
        'sample_threshold': args.sample_threshold,
        'samples': args.global_samples,
        'workers': args.workers,
        'output': args.output,
        'log_level': args.log_level,
        'log_file': args.log_file,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    if args.format is not None:
        config.output_mode = OutputMode(args.format)
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = resolve_config(args)

    # Clear loggers from other modules
    logging.config.dictConfig(
        {
            'version': 1,
            'disable_existing_loggers': True,
        }
    )

    log_level = logging._nameToLevel.get(config.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=log_level,
        filename=config.log_file,
        format='%(levelname)s - %(filename)s:%(lineno)d %(funcName)s() %(message)s',
        force=True,
    )
    logging.debug(f'Args: {args}')
    logging.debug(f'Config: {config}')

    try:
        with open_reporter(config.output, config.output_mode, sys.stdout) as reporter:
            return args.handler(args, config, reporter)
    except CapExceededError as error:
        print(f'error: {error}', file=sys.stderr)
        return EXIT_BUDGET
    except (
        TreeSyntaxError,
        ExprSyntaxError,
        LeafCountMismatchError,
        GroupAxiomError,
        GroupDefinitionError,
        ValueError,
        OSError,
    ) as error:
        print(f'error: {error}', file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logging.exception('unexpected failure')
        return EXIT_FAILS


if __name__ == '__main__':
    sys.exit(main())
