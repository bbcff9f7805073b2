import numpy as np
import pytest

from medianbelief import QualSnapshot, RealSnapshot, Sigma
from medianbelief.checkpoint import CheckpointError, load_snapshot, save_snapshot


@pytest.fixture
def sigma():
    return Sigma(3, ("x", "y", "z"))


def test_qual_round_trip(tmp_path, sigma):
    snap = QualSnapshot(sigma, delta=1.0)
    rng = np.random.default_rng(0)
    for _ in range(5):
        snap.update(sigma.random_vertex(rng), int(rng.integers(0, 4)))
    path = tmp_path / "q.ckpt"
    save_snapshot(path, snap)
    back = load_snapshot(path)
    assert isinstance(back, QualSnapshot)
    assert back.sigma == sigma
    assert back.delta == 1.0
    assert np.array_equal(back.w, snap.w)


def test_real_round_trip(tmp_path, sigma):
    snap = RealSnapshot(sigma, tau=0.05, q=0.9)
    rng = np.random.default_rng(1)
    for _ in range(7):
        snap.update(sigma.random_vertex(rng), float(rng.uniform(1, 5)))
    path = tmp_path / "r.ckpt"
    save_snapshot(path, snap)
    back = load_snapshot(path)
    assert isinstance(back, RealSnapshot)
    assert back.tau == 0.05 and back.q == 0.9 and back.n_obs == 7
    assert np.array_equal(back.w, snap.w)


def test_uninitialized_round_trip(tmp_path, sigma):
    path = tmp_path / "fresh.ckpt"
    save_snapshot(path, QualSnapshot(sigma))
    assert not load_snapshot(path).initialized


def test_empirical_schedule_round_trip(tmp_path, sigma):
    snap = RealSnapshot(sigma, tau=0.1, q=None)
    snap.update(sigma.mask(1, 2, 4, 6), 1.0)
    path = tmp_path / "e.ckpt"
    save_snapshot(path, snap)
    assert load_snapshot(path).q is None


def test_truncated_file_reports_offset(tmp_path, sigma):
    snap = QualSnapshot(sigma)
    snap.update(sigma.mask(1, 2, 4, 6), 1)
    path = tmp_path / "t.ckpt"
    save_snapshot(path, snap)
    blob = path.read_bytes()
    cut = tmp_path / "cut.ckpt"
    cut.write_bytes(blob[: len(blob) // 3])
    with pytest.raises(CheckpointError) as err:
        load_snapshot(cut)
    assert err.value.offset >= 0
    assert "byte" in str(err.value)


def test_bad_magic_rejected(tmp_path, sigma):
    path = tmp_path / "bad.ckpt"
    save_snapshot(path, QualSnapshot(sigma))
    blob = bytearray(path.read_bytes())
    blob[0] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointError):
        load_snapshot(path)
