"""
Command line entry point of the few-shot video classification toolkit.

Commands:
    main.py gen --spec <file> --out <dir>
    main.py splits --manifest <file> --classes 64,12,24 [--cap <n>] --seed <s> [--out <file>]
    main.py train --method <m> --manifest <file> --init scratch|pretrained [--pretrain-manifest <file>] --seed <s> --out <ckpt>
    main.py eval --ckpt <file> --manifest <file> --way 5 --shot 1|5 --episodes 10000 --seed <s> --report <path> [--format json|csv]
    main.py compare --methods baseline,baseline-plus --manifest <file> --seed <s> --report <path>
    main.py selftest

Successful commands print a JSON result to stdout. Failures print "Error: <message>"
lines to stderr and exit with status 1; usage errors exit with status 2.
"""

import argparse
import logging
import sys

from config import DEFAULT_TEST_EPISODES, LOG_LEVEL, THREADS
from schemas.experiment_schemas import INIT_NAMES, METHOD_NAMES, REPORT_FORMATS, SPLIT_NAMES
from shared.common_schemas import OutputDataDTO
from usecases.benchmark_uc import BuildSplitsUC, GenBenchmarkUC
from usecases.experiment_uc import CompareUC, EvalUC, TrainUC
from usecases.selftest_uc import SelftestUC


# optional flag -> MethodConfig field
TRAINING_FLAGS = {
    'way': 'n_way',
    'shot': 'k_shot',
    'tau': 'tau',
    'lr': 'lr_base',
    'lr_adapt': 'lr_adapt',
    'finetune_iters': 'iters_adapt',
    'dropout': 'dropout_p',
    'embed_dim': 'embed_dim',
    'saliency_heads': 'saliency_heads',
    'train_steps': 'train_steps',
    'pretrain_steps': 'pretrain_steps',
    'epochs': 'epochs',
    'episodes_per_epoch': 'episodes_per_epoch',
    'val_episodes': 'val_episodes',
}


def int_list(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f'comma separated integers expected, got "{value}"')


def method_list(value: str) -> list[str]:
    methods = [part.strip() for part in value.split(',') if part.strip()]
    unknown = [method for method in methods if method not in METHOD_NAMES]
    if unknown or not methods:
        raise argparse.ArgumentTypeError(f'unknown methods {unknown}, choose from {list(METHOD_NAMES)}')
    return methods


def cap_value(value: str) -> int | None:
    if value.lower() in ('inf', 'none'):
        return None
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'integer or "inf" expected, got "{value}"')


def add_training_flags(parser: argparse.ArgumentParser, with_episode_shape: bool = True) -> None:
    if with_episode_shape:
        parser.add_argument('--way', type=int, help='classes per episode')
        parser.add_argument('--shot', type=int, help='support samples per class')
    parser.add_argument('--tau', type=float, help='softmax temperature')
    parser.add_argument('--lr', type=float, help='base learning rate (resolved from --init when omitted)')
    parser.add_argument('--lr-adapt', type=float, help='test-time head learning rate')
    parser.add_argument('--finetune-iters', type=int, help='test-time head iterations, 0 = imprint only')
    parser.add_argument('--dropout', type=float, help='dropout probability on embedded features')
    parser.add_argument('--no-imprint', action='store_true', help='random novel head instead of imprinting')
    parser.add_argument('--dtw-normalize', action='store_true', help='divide DTW cost by path length')
    parser.add_argument('--embed-dim', type=int)
    parser.add_argument('--saliency-heads', type=int)
    parser.add_argument('--train-steps', type=int, help='classification training steps')
    parser.add_argument('--pretrain-steps', type=int)
    parser.add_argument('--epochs', type=int, help='meta-training epochs')
    parser.add_argument('--episodes-per-epoch', type=int)
    parser.add_argument('--val-episodes', type=int, help='validation episodes per round, 0 disables selection')


def add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--report', help='report file')
    parser.add_argument('--format', choices=REPORT_FORMATS, default='json')
    parser.add_argument('--with-timing', action='store_true', help='include wall_time in the report')
    parser.add_argument('--threads', type=int, default=THREADS, help='evaluation workers, 0 = serial')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fsvc', description='Few-shot video classification toolkit')
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen = subparsers.add_parser('gen', help='generate a synthetic benchmark')
    gen.add_argument('--spec', required=True, help='generator spec JSON file')
    gen.add_argument('--out', required=True, help='output directory')

    splits = subparsers.add_parser('splits', help='partition classes into train/val/test')
    splits.add_argument('--manifest', required=True)
    splits.add_argument('--classes', type=int_list, required=True, help='train,val,test class counts')
    splits.add_argument('--cap', type=cap_value, default=None, help='per-class training video cap or "inf"')
    splits.add_argument('--seed', type=int, default=0)
    splits.add_argument('--out', help='split manifest file')

    train = subparsers.add_parser('train', help='train one method and save a checkpoint')
    train.add_argument('--method', required=True, choices=METHOD_NAMES)
    train.add_argument('--manifest', required=True)
    train.add_argument('--init', choices=INIT_NAMES, default='scratch')
    train.add_argument('--pretrain-manifest')
    train.add_argument('--seed', type=int, default=0)
    train.add_argument('--out', required=True, help='checkpoint file')
    add_training_flags(train)

    evaluate = subparsers.add_parser('eval', help='evaluate a checkpoint on sampled episodes')
    evaluate.add_argument('--ckpt', required=True)
    evaluate.add_argument('--manifest', required=True)
    evaluate.add_argument('--way', type=int)
    evaluate.add_argument('--shot', type=int)
    evaluate.add_argument('--episodes', type=int, default=DEFAULT_TEST_EPISODES)
    evaluate.add_argument('--seed', type=int, default=0)
    evaluate.add_argument('--split', choices=SPLIT_NAMES, default='test')
    evaluate.add_argument('--finetune-iters', type=int, help='test-time head iterations, 0 = imprint only')
    add_report_flags(evaluate)

    compare = subparsers.add_parser('compare', help='train and evaluate several methods into one report')
    compare.add_argument('--methods', type=method_list, required=True, help='comma separated method names')
    compare.add_argument('--manifest', required=True)
    compare.add_argument('--init', choices=INIT_NAMES, default='scratch')
    compare.add_argument('--pretrain-manifest')
    compare.add_argument('--way', type=int, default=5)
    compare.add_argument('--shot', type=int, default=1)
    compare.add_argument('--episodes', type=int, default=DEFAULT_TEST_EPISODES)
    compare.add_argument('--seed', type=int, default=0)
    add_training_flags(compare, with_episode_shape=False)
    add_report_flags(compare)

    selftest = subparsers.add_parser('selftest', help='run the built-in property checks')
    selftest.add_argument('--seed', type=int, default=0)
    selftest.add_argument('--grad-points', type=int, default=100, help='random points per gradient check')

    return parser


def training_overrides(args: argparse.Namespace) -> dict:
    overrides = {field: getattr(args, flag) for flag, field in TRAINING_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    if args.no_imprint:
        overrides['use_imprint'] = False
    if args.dtw_normalize:
        overrides['dtw_normalize'] = True
    return overrides


def build_request(args: argparse.Namespace):
    """Use case and its input data for the parsed command"""
    if args.command == 'gen':
        return GenBenchmarkUC, {'spec': args.spec, 'out': args.out}
    if args.command == 'splits':
        return BuildSplitsUC, {'manifest': args.manifest, 'classes': args.classes, 'cap': args.cap,
                               'seed': args.seed, 'out': args.out}
    if args.command == 'train':
        return TrainUC, {'method': args.method, 'manifest': args.manifest, 'init': args.init,
                         'pretrain_manifest': args.pretrain_manifest, 'seed': args.seed, 'out': args.out,
                         'overrides': training_overrides(args)}
    if args.command == 'eval':
        return EvalUC, {'ckpt': args.ckpt, 'manifest': args.manifest, 'way': args.way, 'shot': args.shot,
                        'episodes': args.episodes, 'seed': args.seed, 'split': args.split,
                        'finetune_iters': args.finetune_iters, 'threads': args.threads, 'report': args.report,
                        'format': args.format, 'with_timing': args.with_timing}
    if args.command == 'compare':
        return CompareUC, {'methods': args.methods, 'manifest': args.manifest, 'init': args.init,
                           'pretrain_manifest': args.pretrain_manifest, 'way': args.way, 'shot': args.shot,
                           'episodes': args.episodes, 'seed': args.seed, 'threads': args.threads,
                           'overrides': training_overrides(args), 'report': args.report, 'format': args.format,
                           'with_timing': args.with_timing}
    return SelftestUC, {'seed': args.seed, 'grad_points': args.grad_points}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    usecase, data = build_request(args)
    response = usecase(data).exec()

    if not response:
        for message in response.messages:
            print(f'Error: {message}', file=sys.stderr)
        return response.exit_code

    print(OutputDataDTO(data=response.data).json())
    return 0


def main() -> None:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    sys.exit(run())


if __name__ == '__main__':
    main()
