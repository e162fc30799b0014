import json

import numpy as np
import pytest
from PIL import Image

from pano3d.dataset import (
    ImageRecord,
    InstanceEntry,
    decode_panoptic_png,
    encode_panoptic_png,
    id_to_rgb,
    load_panoptic,
    read_records_jsonl,
    rgb_to_id,
    save_panoptic,
    split_and_filter,
    write_records_jsonl,
)
from pano3d.errors import DecodingError, EncodingError, InvalidArgumentError
from pano3d.panoptic import PanopticMap, SegmentInfo

from conftest import random_panoptic


def rec(image_id, house_id, *instances):
    return ImageRecord(
        image_id=image_id,
        house_id=house_id,
        instances=tuple(
            InstanceEntry(instance_id=i, model_id=m, category_id=1, centered=c)
            for i, (m, c) in enumerate(instances)
        ),
    )


def split_oracle(records, house_order, train_count):
    """Independent set-algebra oracle for the split procedure."""
    train_houses = set(house_order[:train_count])
    train = [r for r in records if r.house_id in train_houses]
    test = [r for r in records if r.house_id not in train_houses]
    models = lambda recs: {i.model_id for r in recs for i in r.instances}
    invalid = models(train) & models(test)

    def keep(r):
        return any(i.model_id not in invalid and i.centered for i in r.instances)

    return [r.image_id for r in train if keep(r)], [r.image_id for r in test if keep(r)], invalid


def test_split_disjoint_models_no_invalidation():
    records = [rec("i0", "A", ("m1", True)), rec("i1", "B", ("m2", True))]
    res = split_and_filter(records, ["A", "B"], 1)
    assert res.invalidated_models == set()
    assert [r.image_id for r in res.train] == ["i0"]
    assert [r.image_id for r in res.test] == ["i1"]


def test_split_shared_model_invalidated_and_image_dropped():
    records = [rec("i0", "A", ("M", True)), rec("i1", "B", ("M", True))]
    res = split_and_filter(records, ["A", "B"], 1)
    assert res.invalidated_models == {"M"}
    assert res.train == [] and res.test == []


def test_split_boundary_only_image_dropped():
    records = [rec("i0", "A", ("m1", False)), rec("i1", "B", ("m2", True))]
    res = split_and_filter(records, ["A", "B"], 1)
    assert res.train == []
    assert [r.image_id for r in res.test] == ["i1"]


def test_split_invalid_instances_flagged_but_kept():
    records = [rec("i0", "A", ("M", True), ("m1", True)), rec("i1", "B", ("M", True), ("m2", True))]
    res = split_and_filter(records, ["A", "B"], 1)
    assert res.invalidated_models == {"M"}
    assert [i.valid for i in res.train[0].instances] == [False, True]


def test_split_unknown_house():
    with pytest.raises(InvalidArgumentError):
        split_and_filter([rec("i0", "Z", ("m", True))], ["A"], 0)


def test_split_train_count_bounds():
    records = [rec("i0", "A", ("m", True))]
    with pytest.raises(InvalidArgumentError):
        split_and_filter(records, ["A"], 1)
    with pytest.raises(InvalidArgumentError):
        split_and_filter(records, ["A", "B"], -1)


def test_split_matches_oracle_randomized():
    rng = np.random.default_rng(17)
    for _ in range(100):
        n_houses = int(rng.integers(2, 8))
        houses = [f"h{i}" for i in range(n_houses)]
        n_models = int(rng.integers(1, 10))
        records = []
        for i in range(int(rng.integers(1, 15))):
            house = houses[int(rng.integers(0, n_houses))]
            n_inst = int(rng.integers(1, 5))
            inst = [
                (f"m{int(rng.integers(0, n_models))}", bool(rng.integers(0, 2)))
                for _ in range(n_inst)
            ]
            records.append(rec(f"img{i}", house, *inst))
        train_count = int(rng.integers(1, n_houses))
        res = split_and_filter(records, houses, train_count)
        exp_train, exp_test, exp_invalid = split_oracle(records, houses, train_count)
        assert [r.image_id for r in res.train] == exp_train
        assert [r.image_id for r in res.test] == exp_test
        assert res.invalidated_models == exp_invalid
        # retained images each have a valid centered thing; valid model sets are disjoint
        valid_models = lambda recs: {
            i.model_id for r in recs for i in r.instances if i.valid
        }
        assert valid_models(res.train) & valid_models(res.test) == set()
        for r in res.train + res.test:
            assert any(i.valid and i.centered for i in r.instances)


def test_records_jsonl_roundtrip(tmp_path):
    records = [rec("i0", "A", ("m1", True), ("m2", False)), rec("i1", "B", ("m3", True))]
    path = tmp_path / "records.jsonl"
    write_records_jsonl(records, path)
    assert read_records_jsonl(path) == records


def test_id_color_examples():
    assert id_to_rgb(0) == (0, 0, 0)
    assert id_to_rgb(300) == (44, 1, 0)
    assert rgb_to_id((44, 1, 0)) == 300


def test_id_overflow():
    with pytest.raises(EncodingError):
        id_to_rgb(256**3)


def test_panoptic_png_roundtrip_random():
    rng = np.random.default_rng(23)
    for _ in range(50):
        pan = random_panoptic(rng, 12, 9, max_segments=5)
        image, info = encode_panoptic_png(pan)
        assert decode_panoptic_png(image, info) == pan


def test_panoptic_png_large_ids():
    raster = np.array([[0, 256**3 - 1], [300, 65536]])
    infos = [
        SegmentInfo(256**3 - 1, 1, True),
        SegmentInfo(300, 2, False),
        SegmentInfo(65536, 3, True),
    ]
    pan = PanopticMap(raster, infos)
    image, info = encode_panoptic_png(pan)
    assert decode_panoptic_png(image, info) == pan


def test_decode_unknown_color_rejected():
    pan = PanopticMap(np.array([[5]]), [SegmentInfo(5, 1, True)])
    image, info = encode_panoptic_png(pan)
    with pytest.raises(DecodingError):
        decode_panoptic_png(image, [])


def test_save_load_panoptic_files(tmp_path):
    rng = np.random.default_rng(31)
    pan = random_panoptic(rng, 16, 12)
    save_panoptic(pan, tmp_path / "p.png", tmp_path / "p.json")
    loaded = load_panoptic(tmp_path / "p.png", tmp_path / "p.json")
    assert loaded == pan
    meta = json.loads((tmp_path / "p.json").read_text())
    for entry in meta["segments_info"]:
        assert entry["iscrowd"] == 0
        assert entry["area"] == int((pan.segment_ids == entry["id"]).sum())
