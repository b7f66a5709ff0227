"""Tests for the reference curve registry."""

import pytest

from oscint.curve import symmetry_and_circle_certificate, width_profile
from oscint.curves.definitions import (
    CURVE_REGISTRY,
    get_reference_curve,
    list_reference_curves,
)


class TestCurveRegistry:
    def test_names_match_keys(self):
        for name, ref in CURVE_REGISTRY.items():
            assert ref.name == name

    @pytest.mark.parametrize("name", sorted(CURVE_REGISTRY))
    def test_declared_symmetries_hold(self, name):
        ref = CURVE_REGISTRY[name]
        cert = symmetry_and_circle_certificate(ref.curve)
        assert cert.constant_width == ref.constant_width, f"{name}: constant width"
        assert cert.centrally_symmetric == ref.centrally_symmetric, f"{name}: central symmetry"

    @pytest.mark.parametrize("name", sorted(CURVE_REGISTRY))
    def test_width_profile_agrees(self, name):
        ref = CURVE_REGISTRY[name]
        assert width_profile(ref.curve).is_constant == ref.constant_width

    def test_only_the_disk_is_a_circle(self):
        circles = [
            ref.name
            for ref in CURVE_REGISTRY.values()
            if symmetry_and_circle_certificate(ref.curve).is_circle
        ]
        assert circles == ["disk"]


class TestLookup:
    def test_case_insensitive(self):
        ref = get_reference_curve("  Reuleaux3 ")
        assert ref is not None
        assert ref.name == "reuleaux3"

    def test_unknown_name(self):
        assert get_reference_curve("triangle") is None

    def test_listing_is_sorted(self):
        names = [ref.name for ref in list_reference_curves()]
        assert names == sorted(CURVE_REGISTRY)
