"""Sidecar parsing, validation, serialization, and box selection."""

from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from demixer.detections import (
    BoxSelectPolicy,
    DetectionSet,
    ScoredBox,
    SidecarParseError,
    SidecarValidationError,
    parse_sidecar,
    select_box,
    serialize_sidecar,
)
from demixer.geometry import ImageDims, PixelBox

from .conftest import sidecar_document
from .oracles import clip_interval


def test_parse_single_image_single_box():
    doc = sidecar_document([("a.png", 100, 80, [(10, 10, 50, 40, 0.95, "bird")])])
    sets = parse_sidecar(doc)
    assert len(sets) == 1
    ds = sets["a.png"]
    assert ds.dims == ImageDims(100, 80)
    assert len(ds.boxes) == 1
    assert ds.boxes[0].box.as_tuple() == (10, 10, 50, 40)
    assert ds.boxes[0].score == 0.95
    assert ds.boxes[0].class_tag == "bird"


def test_parse_empty_detection_list():
    sets = parse_sidecar(sidecar_document([("a.png", 10, 10, [])]))
    assert sets["a.png"].boxes == ()


def test_parse_accepts_bytes():
    doc = sidecar_document([("a.png", 10, 10, [])]).encode("utf-8")
    assert "a.png" in parse_sidecar(doc)


def test_parse_clips_overhanging_box():
    doc = sidecar_document([("a.png", 100, 80, [(90, 0, 30, 40, 0.9, "")])])
    box = parse_sidecar(doc)["a.png"].boxes[0].box
    xs = clip_interval(90, 90 + 30, 0, 100)
    ys = clip_interval(0, 0 + 40, 0, 80)
    assert box.as_tuple() == (xs[0], ys[0], xs[1] - xs[0], ys[1] - ys[0])
    assert box.w == 10


def test_parse_clips_negative_origin():
    doc = sidecar_document([("a.png", 100, 80, [(-5, -3, 20, 10, 0.9, "")])])
    box = parse_sidecar(doc)["a.png"].boxes[0].box
    assert box.as_tuple() == (0, 0, 15, 7)


def test_parse_drops_fully_outside_box():
    doc = sidecar_document([("a.png", 100, 80, [(100, 0, 30, 40, 0.9, ""), (0, 0, 0, 5, 0.9, "")])])
    assert parse_sidecar(doc)["a.png"].boxes == ()


def test_parse_malformed_json_names_byte_offset():
    text = '{"images": [}'
    with pytest.raises(SidecarParseError) as exc_info:
        parse_sidecar(text)
    err = exc_info.value
    assert err.byte_offset == text.index("}")
    assert f"byte offset {err.byte_offset}" in str(err)


def test_parse_byte_offset_counts_bytes_not_codepoints():
    # two-byte character before the fault shifts the byte offset past the
    # codepoint index
    text = '{"é": }'
    with pytest.raises(SidecarParseError) as exc_info:
        parse_sidecar(text)
    assert exc_info.value.byte_offset == len('{"é": '.encode("utf-8"))


def test_parse_invalid_utf8():
    with pytest.raises(SidecarParseError):
        parse_sidecar(b'{"images": [\xff]}')


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d["images"][0].pop("file"), "missing 'file'"),
        (lambda d: d["images"][0].pop("width"), "missing 'width'"),
        (lambda d: d["images"][0]["detections"][0].pop("score"), "missing 'score'"),
        (lambda d: d["images"][0]["detections"][0].__setitem__("w", -3), "negative extent"),
        (lambda d: d["images"][0]["detections"][0].__setitem__("score", 1.5), "outside [0, 1]"),
        (lambda d: d["images"][0]["detections"][0].__setitem__("x", 1.5), "must be an integer"),
        (lambda d: d["images"][0].__setitem__("width", 0), "width must be an integer >= 1"),
    ],
)
def test_parse_validation_errors_name_the_record(mutate, fragment):
    doc = json.loads(sidecar_document([("a.png", 100, 80, [(1, 1, 5, 5, 0.9, "x")])]))
    mutate(doc)
    with pytest.raises(SidecarValidationError) as exc_info:
        parse_sidecar(json.dumps(doc))
    assert fragment in str(exc_info.value)


def test_parse_rejects_duplicate_image_entries():
    doc = sidecar_document([("a.png", 10, 10, []), ("a.png", 10, 10, [])])
    with pytest.raises(SidecarValidationError, match="duplicate"):
        parse_sidecar(doc)


def test_parse_rejects_non_list_images():
    with pytest.raises(SidecarValidationError):
        parse_sidecar('{"images": {}}')
    with pytest.raises(SidecarValidationError):
        parse_sidecar('{"nope": []}')
    with pytest.raises(SidecarValidationError):
        parse_sidecar("[1, 2]")


def test_parse_rejects_boolean_coordinates():
    doc = json.loads(sidecar_document([("a.png", 10, 10, [(1, 1, 2, 2, 0.9, "")])]))
    doc["images"][0]["detections"][0]["x"] = True
    with pytest.raises(SidecarValidationError):
        parse_sidecar(json.dumps(doc))


def test_zero_extent_box_is_dropped_not_error():
    doc = sidecar_document([("a.png", 10, 10, [(2, 2, 0, 0, 0.9, "")])])
    assert parse_sidecar(doc)["a.png"].boxes == ()


def test_round_trip_is_fixed_point():
    doc = sidecar_document(
        [
            ("a/b.png", 64, 48, [(1, 2, 3, 4, 0.75, "cat"), (60, 40, 20, 20, 0.5, "")]),
            ("c.png", 32, 32, []),
        ]
    )
    first = parse_sidecar(doc)
    text = serialize_sidecar(list(first.values()))
    second = parse_sidecar(text)
    assert first == second
    assert serialize_sidecar(list(second.values())) == text


@given(
    data=st.data(),
    width=st.integers(1, 200),
    height=st.integers(1, 200),
)
def test_clipped_boxes_always_inside(data, width, height):
    n = data.draw(st.integers(0, 5))
    boxes = []
    for _ in range(n):
        x = data.draw(st.integers(-50, 250))
        y = data.draw(st.integers(-50, 250))
        w = data.draw(st.integers(0, 100))
        h = data.draw(st.integers(0, 100))
        score = data.draw(st.floats(0.0, 1.0, allow_nan=False))
        boxes.append((x, y, w, h, score, ""))
    sets = parse_sidecar(sidecar_document([("img.png", width, height, boxes)]))
    dims = sets["img.png"].dims
    for sb in sets["img.png"].boxes:
        assert sb.box.inside(dims)


def _det_set(scores, areas=None):
    areas = areas or [(4, 4)] * len(scores)
    boxes = tuple(
        ScoredBox(PixelBox(0, 0, w, h), s, f"c{i}") for i, (s, (w, h)) in enumerate(zip(scores, areas))
    )
    return DetectionSet("img.png", ImageDims(100, 100), boxes)


def test_select_max_score_basic():
    chosen = select_box(_det_set([0.95, 0.60]), BoxSelectPolicy("max-score", 0.7))
    assert chosen.score == 0.95


def test_select_none_below_threshold():
    assert select_box(_det_set([0.5, 0.6]), BoxSelectPolicy("max-score", 0.7)) is None


def test_select_tie_breaks_to_lowest_index():
    chosen = select_box(_det_set([0.9, 0.9]), BoxSelectPolicy("max-score", 0.7))
    assert chosen.class_tag == "c0"


def test_select_max_area():
    dets = _det_set([0.8, 0.9, 0.85], areas=[(2, 2), (10, 1), (3, 4)])
    chosen = select_box(dets, BoxSelectPolicy("max-area", 0.7))
    assert chosen.box.area == 12
    # area tie keeps the lowest index
    dets = _det_set([0.8, 0.9], areas=[(3, 4), (4, 3)])
    assert select_box(dets, BoxSelectPolicy("max-area", 0.7)).class_tag == "c0"


def test_select_random_above_threshold_uses_floor():
    dets = _det_set([0.9, 0.5, 0.8, 0.95])  # candidates c0, c2, c3
    policy = BoxSelectPolicy("random-above-threshold", 0.7)
    assert select_box(dets, policy, u=0.0).class_tag == "c0"
    assert select_box(dets, policy, u=0.34).class_tag == "c2"
    assert select_box(dets, policy, u=0.99).class_tag == "c3"


def test_select_empty_set_is_none():
    empty = DetectionSet("img.png", ImageDims(10, 10))
    for mode in ("max-score", "max-area", "random-above-threshold"):
        assert select_box(empty, BoxSelectPolicy(mode, 0.7), u=0.5) is None


def test_select_deterministic_without_rng():
    dets = _det_set([0.8, 0.9, 0.75])
    for mode in ("max-score", "max-area"):
        policy = BoxSelectPolicy(mode, 0.7)
        assert select_box(dets, policy) == select_box(dets, policy)


def test_select_threshold_is_inclusive():
    chosen = select_box(_det_set([0.7]), BoxSelectPolicy("max-score", 0.7))
    assert chosen is not None


def test_policy_validation():
    with pytest.raises(ValueError):
        BoxSelectPolicy("best", 0.5)
    with pytest.raises(ValueError):
        BoxSelectPolicy("max-score", 1.5)
