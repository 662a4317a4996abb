'''
**cli.main**
The ``cluster-cpd`` command line: register, apply, eval, synth and bench.

Every command prints its resolved configuration as JSON on standard
error before running; standard output carries only command results.
'''
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

from pydantic import ValidationError

from cluster_cpd.bench import (
    DEFAULT_ALPHA_GRID,
    SceneSpec,
    ensemble,
    generate_scene,
    run_benchmark,
    to_csv
)
from cluster_cpd.bench.runner import STATUS_NOT_CONVERGED, STATUS_OK
from cluster_cpd.core import (
    ClusterWeighting,
    Method,
    RegistrationConfig,
    RegistrationResult,
    apply_displacement,
    joint_normalization
)
from cluster_cpd.corelib.exception import BaseRegistrationError
from cluster_cpd.corelib.parsing import FloatList, parse_value
from cluster_cpd.corelib.utils.dataclass_utils import json_dumps_dataclass
from cluster_cpd.dataio import (
    LabeledCloudFile,
    read_field,
    read_point_pair,
    read_point_set,
    read_priors,
    write_point_set,
    write_result,
    write_scene
)
from cluster_cpd.metrics import metric_report
from cluster_cpd.solvers import (
    DEFAULT_ALPHA_SQ,
    ClusterPriorModel,
    CorrespondencePriors,
    priors_from_clusters,
    register_ccpd,
    register_cpd,
    register_ecpd
)
from .exceptions import UsageError
from .interfaces import LOG_DATE_FORMAT, LOG_FORMAT, Command, ExitCode

__all__ = [
    'main',
    'build_parser',
    'cmd_register',
    'cmd_apply',
    'cmd_eval',
    'cmd_synth',
    'cmd_bench'
]

logger = logging.getLogger(__name__)

PROG = 'cluster-cpd'


class _Parser(argparse.ArgumentParser):
    '''argparse parser that raises UsageError instead of exiting with code 2.'''

    def error(self, message: str) -> NoReturn:
        raise UsageError(f'{self.prog}: {message}')


def _float_list(raw: str) -> list[float]:
    try:
        return parse_value(raw, FloatList)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f'expected comma-separated numbers, got "{raw}"') from e


def _method_list(raw: str) -> list[Method]:
    try:
        return [Method(name) for name in parse_value(raw, list)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f'methods must be drawn from {[m.value for m in Method]}, got "{raw}"'
        ) from e


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    defaults = RegistrationConfig()
    group = parser.add_argument_group('solver')
    group.add_argument('--beta-sq', type=float, default=defaults.beta_sq, help='kernel width beta^2')
    group.add_argument('--lambda', dest='lambda_', type=float, default=defaults.lambda_, help='coherence weight')
    group.add_argument('--omega', type=float, default=defaults.omega, help='outlier weight in [0, 1)')
    group.add_argument('--max-iters', type=int, default=defaults.max_iters)
    group.add_argument('--tol', type=float, default=defaults.rel_tol, help='relative NLL tolerance')
    group.add_argument('--sigma2-floor', type=float, default=defaults.sigma2_floor)
    group.add_argument(
        '--cluster-weighting',
        type=ClusterWeighting,
        choices=list(ClusterWeighting),
        default=defaults.cluster_weighting
    )


def _config(args: argparse.Namespace) -> RegistrationConfig:
    return RegistrationConfig(
        beta_sq=args.beta_sq,
        lambda_=args.lambda_,
        omega=args.omega,
        max_iters=args.max_iters,
        rel_tol=args.tol,
        sigma2_floor=args.sigma2_floor,
        cluster_weighting=args.cluster_weighting
    )


def _print_resolved(command: Command, settings: dict[str, Any]) -> None:
    payload = {'command': command.value, **settings}
    print(json.dumps(payload, indent=2, default=str), file=sys.stderr)


def _exit_for(result: RegistrationResult) -> ExitCode:
    return ExitCode.Success if result.converged else ExitCode.NotConverged


def _cloud(path: Path, labeled: bool) -> LabeledCloudFile:
    return LabeledCloudFile.from_path(path, has_labels=True if labeled else None)


def cmd_register(args: argparse.Namespace) -> ExitCode:
    '''Register the template onto the data and write the result artifacts.'''
    config = _config(args)
    method = Method(args.method)
    _print_resolved(Command.REGISTER, {
        'method': method.value,
        'data': str(args.data),
        'template': str(args.template),
        'priors': str(args.priors) if args.priors else None,
        'alpha_sq': args.alpha_sq,
        'normalize': args.normalize,
        'out': str(args.out),
        'config': config.model_dump(mode='json', by_alias=True)
    })

    data, data_labels, template, template_labels = read_point_pair(
        _cloud(args.data, args.labeled), _cloud(args.template, args.labeled)
    )
    raw_template = template
    norm = joint_normalization(data, template) if args.normalize else None
    if norm is not None:
        data, template = norm.apply(data), norm.apply(template)

    if method is Method.CCPD:
        if data_labels is None or template_labels is None:
            raise UsageError('--method ccpd requires cluster labels on both point sets')
        model = ClusterPriorModel.from_labels(data_labels, template_labels, config.cluster_weighting)
        result = register_ccpd(data, template, model, config)
    elif method is Method.ECPD:
        if args.priors is not None:
            priors = read_priors(args.priors, n_data=data.n_points, n_template=template.n_points)
            if args.alpha_sq is not None:
                priors = CorrespondencePriors(priors.data_index, priors.template_index, args.alpha_sq)
        elif data_labels is not None and template_labels is not None:
            priors = priors_from_clusters(
                data_labels, template_labels, alpha_sq=DEFAULT_ALPHA_SQ if args.alpha_sq is None else args.alpha_sq
            )
        else:
            raise UsageError('--method ecpd requires --priors or cluster labels on both point sets')
        result = register_ecpd(data, template, priors, config)
    else:
        result = register_cpd(data, template, config)

    if norm is not None:
        result = norm.invert_result(result, raw_template)
    write_result(result, args.out, labels=template_labels, extra={'normalized': args.normalize})
    return _exit_for(result)


def cmd_apply(args: argparse.Namespace) -> ExitCode:
    '''Move a full template with the field saved by a register run.'''
    _print_resolved(Command.APPLY, {
        'run': str(args.run),
        'template': str(args.template),
        'points': str(args.points),
        'out': str(args.out)
    })
    template, _ = read_point_set(_cloud(args.template, args.labeled))
    points, labels = read_point_set(_cloud(args.points, args.labeled))
    field = read_field(args.run, template)
    moved = apply_displacement(field, points)
    logger.info('moved %d points with a %d-point field', moved.n_points, template.n_points)
    write_point_set(args.out, moved, labels)
    return ExitCode.Success


def cmd_eval(args: argparse.Namespace) -> ExitCode:
    '''Print the Hausdorff report of two point sets as JSON.'''
    _print_resolved(Command.EVAL, {
        'a': str(args.a),
        'b': str(args.b),
        'clustered': args.clustered
    })
    a, a_labels, b, b_labels = read_point_pair(_cloud(args.a, args.labeled), _cloud(args.b, args.labeled))
    if args.clustered:
        if a_labels is None or b_labels is None:
            raise UsageError('--clustered requires cluster labels in both files')
        report = metric_report(a, b, a_labels, b_labels)
    else:
        report = metric_report(a, b)
    print(json_dumps_dataclass(report))
    return ExitCode.Success


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except OSError as e:
        raise UsageError(f'Cannot read "{path}"', cause=e) from e
    except json.JSONDecodeError as e:
        raise UsageError(f'"{path}" is not valid JSON ({e})', cause=e) from e


def cmd_synth(args: argparse.Namespace) -> ExitCode:
    '''Generate one synthetic scene and write it to a directory.'''
    spec = SceneSpec.model_validate(_load_json(args.spec))
    _print_resolved(Command.SYNTH, {'spec': spec.model_dump(mode='json'), 'out': str(args.out)})
    scene = generate_scene(spec)
    write_scene(
        args.out,
        template=scene.template,
        template_labels=scene.template_labels,
        data=scene.data,
        data_labels=scene.data_labels,
        ground_truth=scene.ground_truth,
        metadata={'spec': spec.model_dump(mode='json')}
    )
    return ExitCode.Success


def _scene_specs(payload: Any) -> list[SceneSpec]:
    if isinstance(payload, list):
        return [SceneSpec.model_validate(item) for item in payload]
    if isinstance(payload, dict) and 'base' in payload:
        count = int(payload.get('count', 20))
        return ensemble(SceneSpec.model_validate(payload['base']), count)
    raise UsageError('--specs must hold a list of scene specs or {"base": spec, "count": n}')


def cmd_bench(args: argparse.Namespace) -> ExitCode:
    '''Run the benchmark sweep and write its table as CSV.'''
    config = _config(args)
    specs = _scene_specs(_load_json(args.specs))
    _print_resolved(Command.BENCH, {
        'specs': str(args.specs),
        'n_scenes': len(specs),
        'methods': [m.value for m in args.methods],
        'alphas': args.alphas,
        'workers': args.workers,
        'out': str(args.out),
        'config': config.model_dump(mode='json', by_alias=True)
    })
    rows = run_benchmark(specs, args.methods, config, args.alphas, workers=args.workers)
    to_csv(rows, args.out)

    statuses = {row.status for row in rows}
    if statuses <= {STATUS_OK}:
        return ExitCode.Success
    if statuses <= {STATUS_OK, STATUS_NOT_CONVERGED}:
        return ExitCode.NotConverged
    return ExitCode.Failure


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description='Cluster-aware non-rigid point set registration.')
    parser.add_argument('-v', '--verbose', action='store_true', help='log every EM iteration')
    commands = parser.add_subparsers(dest='command', required=True)

    register = commands.add_parser(Command.REGISTER.value, help='register a template onto data')
    register.add_argument('--method', choices=[m.value for m in Method], default=Method.CPD.value)
    register.add_argument('--data', type=Path, required=True)
    register.add_argument('--template', type=Path, required=True)
    register.add_argument('--priors', type=Path, default=None, help='ECPD correspondence file')
    register.add_argument('--alpha-sq', type=float, default=None, help='ECPD prior reliability alpha^2')
    register.add_argument('--normalize', action='store_true', help='solve in jointly normalized units')
    register.add_argument('--labeled', action='store_true', help='last CSV column is a cluster label')
    register.add_argument('--out', type=Path, required=True)
    _add_solver_flags(register)
    register.set_defaults(handler=cmd_register)

    apply = commands.add_parser(Command.APPLY.value, help='move a full template with a saved field')
    apply.add_argument('--run', type=Path, required=True, help='output directory of a register run')
    apply.add_argument('--template', type=Path, required=True, help='template the run registered')
    apply.add_argument('--points', type=Path, required=True, help='points to move, e.g. the full template')
    apply.add_argument('--labeled', action='store_true', help='last CSV column is a cluster label')
    apply.add_argument('--out', type=Path, required=True)
    apply.set_defaults(handler=cmd_apply)

    evaluate = commands.add_parser(Command.EVAL.value, help='Hausdorff metrics between two sets')
    evaluate.add_argument('--a', type=Path, required=True)
    evaluate.add_argument('--b', type=Path, required=True)
    evaluate.add_argument('--clustered', action='store_true')
    evaluate.add_argument('--labeled', action='store_true', help='last CSV column is a cluster label')
    evaluate.set_defaults(handler=cmd_eval)

    synth = commands.add_parser(Command.SYNTH.value, help='generate a synthetic scene')
    synth.add_argument('--spec', type=Path, required=True)
    synth.add_argument('--out', type=Path, required=True)
    synth.set_defaults(handler=cmd_synth)

    bench = commands.add_parser(Command.BENCH.value, help='benchmark methods over scenes')
    bench.add_argument('--specs', type=Path, required=True)
    bench.add_argument(
        '--methods',
        type=_method_list,
        default=[Method.CPD, Method.ECPD, Method.CCPD],
        help='comma-separated subset of cpd,ecpd,ccpd'
    )
    bench.add_argument('--alphas', type=_float_list, default=list(DEFAULT_ALPHA_GRID))
    bench.add_argument('--workers', type=int, default=1)
    bench.add_argument('--out', type=Path, required=True)
    _add_solver_flags(bench)
    bench.set_defaults(handler=cmd_bench)
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
        stream=sys.stderr
    )


def main(argv: Sequence[str] | None = None) -> int:
    '''
    Entry point of the ``cluster-cpd`` console script.

    Returns
    -------
    int
        An ``ExitCode`` value.
    '''
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        return int(args.handler(args))
    except (BaseRegistrationError, ValidationError) as e:
        print(str(e), file=sys.stderr)
        return int(ExitCode.Failure)
