import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vqc_transfer.dataset import Dataset, LabeledSample
from vqc_transfer.datagen import (DomainTransform, MoonsConfig, dumps_csv, make_moons, parse_csv,
                                  read_csv, transform_domain, write_csv)
from vqc_transfer.errors import CsvParseError, DomainError, ShapeError
from vqc_transfer.rng import box_muller, substream


def test_moons_config_validation():
    for n in (0, 1, 3, 7):
        with pytest.raises(DomainError):
            MoonsConfig(n=n)
    with pytest.raises(DomainError):
        MoonsConfig(noise_sigma=-0.1)


def test_noise_free_arcs():
    data = make_moons(MoonsConfig(n=400, noise_sigma=0.0, seed=3))
    up, lo = data.x[:200], data.x[200:]
    np.testing.assert_array_equal(data.y[:200], -1.0)
    np.testing.assert_array_equal(data.y[200:], 1.0)
    assert np.max(np.abs(up[:, 0] ** 2 + up[:, 1] ** 2 - 1)) <= 1e-12
    assert np.all(up[:, 1] >= 0)
    assert np.max(np.abs((1 - lo[:, 0]) ** 2 + (0.5 - lo[:, 1]) ** 2 - 1)) <= 1e-12
    assert np.all(lo[:, 1] <= 0.5)


def test_arc_formula_points():
    # stream position fixed, so t is known from the same uniforms
    cfg = MoonsConfig(n=4, noise_sigma=0.0, seed=1)
    t = np.pi * substream(1, "data").random((4, 3))[:, 0]
    data = make_moons(cfg)
    np.testing.assert_allclose(data.x[0], [np.cos(t[0]), np.sin(t[0])], atol=0)
    np.testing.assert_allclose(data.x[3], [1 - np.cos(t[3]), 0.5 - np.sin(t[3])], atol=0)
    # endpoints of the parametrization
    assert (np.cos(0.0), np.sin(0.0)) == (1.0, 0.0)
    np.testing.assert_allclose([1 - np.cos(np.pi / 2), 0.5 - np.sin(np.pi / 2)], [1.0, -0.5], atol=1e-16)


def test_class_counts_and_determinism():
    a = make_moons(MoonsConfig(n=2000, seed=42))
    b = make_moons(MoonsConfig(n=2000, seed=42))
    c = make_moons(MoonsConfig(n=2000, seed=43))
    assert (np.sum(a.y == -1), np.sum(a.y == 1)) == (1000, 1000)
    assert a.equals(b)
    assert not a.equals(c)


def test_noise_has_requested_scale():
    clean = make_moons(MoonsConfig(n=20000, noise_sigma=0.0, seed=5))
    noisy = make_moons(MoonsConfig(n=20000, noise_sigma=0.2, seed=5))
    resid = noisy.x - clean.x
    assert abs(resid.std() - 0.2) < 0.005
    assert abs(resid.mean()) < 0.005


def test_box_muller_moments():
    u = substream(0, "bm").random((200000, 2))
    a, b = box_muller(u[:, 0], u[:, 1])
    z = np.concatenate([a, b])
    assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01


def test_transform_identity_and_full_turn():
    data = make_moons(MoonsConfig(n=100, seed=2))
    assert transform_domain(data, DomainTransform()).equals(data)
    turned = transform_domain(data, DomainTransform(rotation_deg=360.0))
    np.testing.assert_allclose(turned.x, data.x, atol=1e-12, rtol=0)
    np.testing.assert_array_equal(turned.y, data.y)


def test_transform_half_turn_keeps_centroid():
    data = make_moons(MoonsConfig(n=100, seed=2))
    turned = transform_domain(data, DomainTransform(rotation_deg=180.0))
    np.testing.assert_allclose(turned.x.mean(axis=0), data.x.mean(axis=0), atol=1e-12, rtol=0)


@given(st.floats(-720, 720), st.floats(-5, 5), st.floats(-5, 5))
def test_transform_is_rigid(deg, dx, dy):
    data = make_moons(MoonsConfig(n=40, seed=9))
    moved = transform_domain(data, DomainTransform(deg, (dx, dy)))
    d0 = np.linalg.norm(data.x[:, None] - data.x[None], axis=-1)
    d1 = np.linalg.norm(moved.x[:, None] - moved.x[None], axis=-1)
    assert np.max(np.abs(d0 - d1)) <= 1e-10


def test_transform_order_and_noise():
    data = Dataset([[1.0, 0.0], [-1.0, 0.0]], [1, -1])
    out = transform_domain(data, DomainTransform(90.0, (2.0, 0.0)))
    np.testing.assert_allclose(out.x, [[2.0, 1.0], [2.0, -1.0]], atol=1e-15)
    a = transform_domain(data, DomainTransform(extra_noise=0.1), seed=1)
    b = transform_domain(data, DomainTransform(extra_noise=0.1), seed=1)
    assert a.equals(b) and not a.equals(data)
    with pytest.raises(ShapeError):
        transform_domain(Dataset(np.zeros((2, 3)), [1, 1]), DomainTransform())


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = Dataset(rng.normal(size=(10, 2)) * 10 ** rng.uniform(-8, 8, (10, 2)), rng.choice([-1, 1], 10))
    write_csv(tmp_path / "d.csv", data)
    assert read_csv(tmp_path / "d.csv").equals(data)


def test_csv_empty_body():
    out = parse_csv(io.StringIO("x1,x2,y\n"))
    assert len(out) == 0 and out.d == 2
    assert dumps_csv(out) == "x1,x2,y\n"


@pytest.mark.parametrize("body,line", [
    ("x1,x2,y\n0.1,0.2,1\n0.3,0.4,0.5\n", 3),
    ("x1,x2,y\n0.1,abc,1\n", 2),
    ("x1,x2,y\n0.1,1\n", 2),
    ("a,b,c\n", 1),
    ("x1,x2,y\nnan,0,1\n", 2),
])
def test_csv_parse_errors(body, line):
    with pytest.raises(CsvParseError) as info:
        parse_csv(io.StringIO(body))
    assert info.value.line == line


def test_dataset_validation():
    with pytest.raises(DomainError):
        Dataset([[0.0]], [0.5])
    with pytest.raises(ShapeError):
        Dataset([[0.0], [1.0]], [1])
    with pytest.raises(DomainError):
        LabeledSample(np.zeros(2), 0.0)
    data = Dataset([[0.0, 1.0], [2.0, 3.0]], [1, -1])
    assert Dataset.from_samples(list(data)).equals(data)
