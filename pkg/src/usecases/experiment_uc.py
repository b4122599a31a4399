import logging
from pathlib import Path

from core.feature_schemas import Manifest, Split
from core.manifest_io import load_manifest, load_split
from harness.evaluator import evaluate
from harness.reports import format_summary, write_reports
from protocols.checkpoint_io import load_checkpoint, save_checkpoint
from protocols.method_schemas import MethodConfig
from protocols.training import train_model
from schemas.experiment_schemas import METHOD_NAMES, CompareDTO, EvalDTO, TrainDTO
from shared.base_usecase import BaseUC
from shared.common_schemas import parse_model


logger = logging.getLogger(__name__)


def _pretrain_manifest(path: str | None) -> Manifest | None:
    return load_manifest(Path(path)) if path else None


class TrainUC(BaseUC):
    """Base training of one method, saved as a checkpoint"""
    ReqDTO = TrainDTO

    def process_request(self, req) -> dict:
        manifest = load_manifest(Path(req.manifest))
        cfg = parse_model(MethodConfig, {**req.overrides, 'method': req.method, 'init': req.init, 'seed': req.seed})
        model = train_model(manifest, cfg, _pretrain_manifest(req.pretrain_manifest))
        save_checkpoint(model, Path(req.out))
        return {'checkpoint': req.out, 'method': model.method.value, 'fingerprint': model.fingerprint}


class EvalUC(BaseUC):
    """Episodic evaluation of a checkpoint"""
    ReqDTO = EvalDTO

    def process_request(self, req) -> dict:
        model = load_checkpoint(Path(req.ckpt))
        updates = {'n_way': req.way, 'k_shot': req.shot, 'iters_adapt': req.finetune_iters}
        cfg = parse_model(
            MethodConfig,
            {**model.config.payload(), **{key: value for key, value in updates.items() if value is not None}},
        )
        split = load_split(load_manifest(Path(req.manifest)), req.split)

        report = evaluate(model, cfg, split, req.episodes, req.seed, req.threads)
        if req.report:
            write_reports([report], Path(req.report), req.format, req.with_timing)
        return {'report': report.payload(req.with_timing), 'summary': format_summary(report)}


class CompareUC(BaseUC):
    """Train and evaluate several methods with one seed, one report row per method"""
    ReqDTO = CompareDTO

    def process_request(self, req) -> dict | None:
        unknown = [method for method in req.methods if method not in METHOD_NAMES]
        if unknown:
            self.add_error(error_type='param_error', message=f'unknown methods: {unknown}', location='methods',
                           exit_code=2)
            return

        manifest = load_manifest(Path(req.manifest))
        pretrain = _pretrain_manifest(req.pretrain_manifest)
        test_split = load_split(manifest, Split.test)

        reports = []
        for method in req.methods:
            cfg = parse_model(MethodConfig, {
                **req.overrides, 'method': method, 'init': req.init, 'seed': req.seed,
                'n_way': req.way, 'k_shot': req.shot,
            })
            model = train_model(manifest, cfg, pretrain)
            report = evaluate(model, cfg, test_split, req.episodes, req.seed, req.threads)
            logger.info(format_summary(report))
            reports.append(report)

        if req.report:
            write_reports(reports, Path(req.report), req.format, req.with_timing)
        return {'reports': [report.payload(req.with_timing) for report in reports]}
