from pathlib import Path

from config import MANIFEST_NAME, PRETRAIN_MANIFEST_NAME
from core.feature_schemas import Split
from core.manifest_io import load_manifest, rebase_manifest, save_manifest
from harness.splits import build_splits
from schemas.benchmark_schemas import BuildSplitsDTO, GenBenchmarkDTO
from shared.base_usecase import BaseUC
from shared.common_schemas import parse_model
from shared.exceptions import FeatureFormatError
from shared.file_transporter import load_json
from synthdata.generator import gen_benchmark
from synthdata.generator_schemas import GeneratorSpec


SPLIT_MANIFEST_NAME = 'split_manifest.json'


class GenBenchmarkUC(BaseUC):
    """Generate a synthetic benchmark from a generator spec file"""
    ReqDTO = GenBenchmarkDTO

    def process_request(self, req) -> dict:
        data = load_json(Path(req.spec))
        if data is None:
            raise FeatureFormatError('generator spec is not readable JSON', req.spec)
        spec = parse_model(GeneratorSpec, data, req.spec)

        out_dir = Path(req.out)
        manifest = gen_benchmark(spec, out_dir)
        return {
            'manifest': out_dir.joinpath(MANIFEST_NAME).as_posix(),
            'pretrain_manifest': out_dir.joinpath(PRETRAIN_MANIFEST_NAME).as_posix() if spec.pretrain_classes else None,
            'classes': len(manifest.classes),
            'videos': len(manifest.videos),
        }


class BuildSplitsUC(BaseUC):
    """Partition the classes of a manifest into train/val/test"""
    ReqDTO = BuildSplitsDTO

    def process_request(self, req) -> dict | None:
        if len(req.classes) != 3:
            self.add_error(error_type='param_error', message='three class counts expected (train,val,test)',
                           location='classes', exit_code=2)
            return

        source = load_manifest(Path(req.manifest))
        manifest = build_splits(source, tuple(req.classes), {Split.train: req.cap}, req.seed)

        out = Path(req.out) if req.out else Path(req.manifest).parent.joinpath(SPLIT_MANIFEST_NAME)
        save_manifest(rebase_manifest(manifest, out.parent), out)
        return {
            'manifest': out.as_posix(),
            'videos': {split.value: len(manifest.videos_in(split)) for split in Split},
            'classes': {split.value: len(manifest.class_ids_in(split)) for split in Split},
        }
