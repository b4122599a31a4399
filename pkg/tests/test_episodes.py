import numpy as np
import pytest

from core.rng import RngStream
from fixtures.builders import make_sequence, noise_split
from harness.episodes import Episode, check_capacity, sample_episode
from shared.exceptions import CapacityError, DataValidationError


@pytest.fixture(scope='module')
def split():
    return noise_split(np.random.default_rng(0), classes=24, videos=7)


def assert_well_formed(episode: Episode, n_way: int, k_shot: int):
    assert episode.n_way == n_way
    assert episode.k_shot == k_shot
    assert len(set(episode.class_map)) == n_way
    assert np.bincount(episode.support_labels, minlength=n_way).tolist() == [k_shot] * n_way
    assert 0 <= episode.query_label < n_way

    support_ids = [seq.video_id for seq, _ in episode.support]
    assert len(set(support_ids)) == len(support_ids)
    assert episode.query[0].video_id not in support_ids

    for seq, label in episode.support:
        assert seq.class_id == episode.class_map[label]
    assert episode.query[0].class_id == episode.class_map[episode.query_label]


@pytest.mark.parametrize('n_way,k_shot', [(5, 1), (5, 5), (3, 2), (24, 6)])
def test_episode_structure(split, n_way, k_shot):
    for index in range(10000):
        assert_well_formed(sample_episode(split, n_way, k_shot, RngStream(11, index)), n_way, k_shot)


@pytest.mark.slow
def test_episode_structure_fuzz(split):
    shapes = np.random.default_rng(7)
    for index in range(100000):
        n_way = int(shapes.integers(1, 25))
        k_shot = int(shapes.integers(1, 7))
        assert_well_formed(sample_episode(split, n_way, k_shot, RngStream(12, index)), n_way, k_shot)


def test_same_stream_same_episode(split):
    first = sample_episode(split, 5, 2, RngStream(3, 42))
    second = sample_episode(split, 5, 2, RngStream(3, 42))
    other = sample_episode(split, 5, 2, RngStream(3, 43))
    key = lambda ep: ([seq.video_id for seq, _ in ep.support], ep.query[0].video_id, ep.class_map)
    assert key(first) == key(second)
    assert key(first) != key(other)


def test_every_class_and_label_is_drawn(split):
    classes = set()
    query_labels = set()
    for index in range(500):
        episode = sample_episode(split, 5, 1, RngStream(5, index))
        classes.update(episode.class_map)
        query_labels.add(episode.query_label)
    assert classes == set(split)
    assert query_labels == set(range(5))


def test_too_few_classes(split):
    with pytest.raises(CapacityError, match='short by 3'):
        sample_episode(split, 27, 1, RngStream(0))


def test_too_few_videos():
    split = noise_split(np.random.default_rng(1), classes=6, videos=3)
    check_capacity(split, 5, 2)
    with pytest.raises(CapacityError, match='short by 3'):
        check_capacity(split, 5, 5)


def test_one_short_class_is_enough_to_fail():
    split = noise_split(np.random.default_rng(2), classes=6, videos=6)
    split[4] = split[4][:1]
    with pytest.raises(CapacityError, match='class 4'):
        sample_episode(split, 5, 1, RngStream(0))


def test_episode_rejects_query_in_support():
    videos = [make_sequence(np.ones((2, 3)), f'v{n}', n) for n in range(2)]
    with pytest.raises(DataValidationError, match='query video'):
        Episode(support=((videos[0], 0), (videos[1], 1)), query=(videos[0], 0), class_map=(0, 1))


def test_episode_rejects_unbalanced_support():
    videos = [make_sequence(np.ones((2, 3)), f'v{n}', n % 2) for n in range(4)]
    with pytest.raises(DataValidationError, match='unbalanced'):
        Episode(support=((videos[0], 0), (videos[2], 0), (videos[1], 1)), query=(videos[3], 1), class_map=(0, 1))
