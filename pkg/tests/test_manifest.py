import json

import pytest

from core.feature_io import write_feature_file
from core.feature_schemas import ClassEntry, Manifest, Split, VideoEntry
from core.manifest_io import load_manifest, load_split, rebase_manifest, save_manifest
from fixtures.builders import make_sequence
from shared.exceptions import DataValidationError, FeatureFormatError, FeatureIOError


def manifest_payload(splits: dict[int, str]) -> dict:
    return {
        'frame_count': 2,
        'feature_dim': 3,
        'classes': [{'class_id': class_id, 'class_name': f'class_{class_id}'} for class_id in sorted(splits)],
        'videos': [
            {'video_id': f'v{class_id}_{n}', 'class_id': class_id, 'file_path': f'features/v{class_id}_{n}.fsvf',
             'split': split}
            for class_id, split in sorted(splits.items()) for n in range(2)
        ],
    }


@pytest.fixture
def manifest_dir(tmp_path):
    payload = manifest_payload({0: 'train', 1: 'train', 2: 'test', 3: 'test'})
    for video in payload['videos']:
        write_feature_file(make_sequence([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], video['video_id'], video['class_id']),
                           tmp_path / video['file_path'])
    (tmp_path / 'manifest.json').write_text(json.dumps(payload), encoding='utf-8')
    return tmp_path


def test_disjoint_manifest_loads(manifest_dir):
    manifest = load_manifest(manifest_dir / 'manifest.json')
    assert manifest.class_ids_in(Split.train) == [0, 1]
    assert manifest.class_ids_in('test') == [2, 3]
    assert manifest.root_dir == str(manifest_dir.resolve())


def test_overlapping_splits_name_the_class():
    payload = manifest_payload({0: 'train', 1: 'train', 2: 'test'})
    payload['videos'].append({'video_id': 'extra', 'class_id': 1, 'file_path': 'x.fsvf', 'split': 'test'})
    with pytest.raises(DataValidationError) as exc:
        Manifest(**payload)
    assert 'offending class_ids: [1]' in exc.value.message


def test_overlap_rejected_on_load(tmp_path):
    payload = manifest_payload({0: 'train', 1: 'test'})
    payload['videos'][0]['split'] = 'test'
    path = tmp_path / 'manifest.json'
    path.write_text(json.dumps(payload), encoding='utf-8')
    with pytest.raises(DataValidationError):
        load_manifest(path, check_files=False)


def test_unknown_class_rejected():
    payload = manifest_payload({0: 'train'})
    payload['videos'][0]['class_id'] = 9
    with pytest.raises(DataValidationError):
        Manifest(**payload)


def test_save_load_round_trip(manifest_dir, tmp_path):
    original = load_manifest(manifest_dir / 'manifest.json')
    copy_path = manifest_dir / 'copy.json'
    save_manifest(original, copy_path)
    reloaded = load_manifest(copy_path)
    assert reloaded.payload() == original.payload()
    assert list(json.loads(copy_path.read_text(encoding='utf-8'))) == ['frame_count', 'feature_dim', 'classes', 'videos']


def test_missing_feature_file(manifest_dir):
    (manifest_dir / 'features' / 'v0_0.fsvf').unlink()
    with pytest.raises(DataValidationError):
        load_manifest(manifest_dir / 'manifest.json')


def test_missing_and_malformed_manifest(tmp_path):
    with pytest.raises(FeatureIOError):
        load_manifest(tmp_path / 'absent.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"frame_count": 2}', encoding='utf-8')
    with pytest.raises(FeatureFormatError):
        load_manifest(broken)


def test_wrong_field_type_is_a_validation_error(tmp_path):
    payload = manifest_payload({0: 'train'})
    payload['frame_count'] = 'eight'
    path = tmp_path / 'manifest.json'
    path.write_text(json.dumps(payload), encoding='utf-8')
    with pytest.raises(DataValidationError):
        load_manifest(path, check_files=False)


def test_load_split_groups_by_class(manifest_dir):
    split = load_split(load_manifest(manifest_dir / 'manifest.json'), Split.test)
    assert sorted(split) == [2, 3]
    assert [seq.video_id for seq in split[2]] == ['v2_0', 'v2_1']
    assert all(seq.class_id == 2 for seq in split[2])


def test_load_split_checks_shape(manifest_dir):
    manifest = load_manifest(manifest_dir / 'manifest.json')
    write_feature_file(make_sequence([[1.0, 2.0, 3.0]], 'v0_0', 0), manifest_dir / 'features' / 'v0_0.fsvf')
    with pytest.raises(DataValidationError):
        load_split(manifest, Split.train)


def test_rebase_keeps_files_reachable(manifest_dir):
    manifest = load_manifest(manifest_dir / 'manifest.json')
    target = manifest_dir / 'nested' / 'deeper'
    rebased = rebase_manifest(manifest, target)
    assert rebased.videos[0].file_path == '../../features/v0_0.fsvf'
    save_manifest(rebased, target / 'manifest.json')
    assert load_manifest(target / 'manifest.json').payload()['videos'][0]['file_path'] == '../../features/v0_0.fsvf'


def test_entries_are_frozen():
    entry = ClassEntry(class_id=0, class_name='a')
    with pytest.raises(TypeError):
        entry.class_id = 3
    video = VideoEntry(video_id='v', class_id=0, file_path='v.fsvf', split=Split.val)
    assert video.split == 'val'
