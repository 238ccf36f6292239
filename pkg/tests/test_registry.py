import json
import re

import pytest

from ccr_reduce import suites as S
from ccr_reduce.errors import InvalidArgument
from ccr_reduce.scenario import SCHEMA, bundled, bundled_path, validate

ABSTRACT = {"schema_version": 1, "name": "t", "grid": {"kind": "abstract"}, "suites": []}


def test_every_check_has_anchor():
    assert S.REGISTRY
    for chk in S.REGISTRY.values():
        assert chk.anchor.strip(), chk.id
        assert chk.suite in S.SUITES and chk.id in S.SUITES[chk.suite]


def test_anchors_are_descriptive():
    # anchors describe the statement rather than pointing at numbered items
    for chk in S.REGISTRY.values():
        assert not re.search(r"\b(Eq|Sec|Thm|Prop)\.?\s*\(?\d", chk.anchor), chk.anchor
        assert "§" not in chk.anchor


def test_suites_partition_checks():
    ids = [c for ids in S.SUITES.values() for c in ids]
    assert sorted(ids) == sorted(S.REGISTRY)


def test_bundled_scenario_is_valid():
    sc = bundled("gb_small")
    assert sc["name"] == "gb_small"
    assert set(sc["suites"]) == set(S.SUITES) - {"gb.stage1_only"}
    assert json.loads(bundled_path("gb_small").read_text()) == sc
    with pytest.raises(InvalidArgument):
        bundled("nope")


@pytest.mark.parametrize("patch, match", [
    ({"suites": ["no.such.suite"]}, "unknown suite"),
    ({"extra": 1}, "Additional properties"),
    ({"schema_version": 2}, "schema_version"),
    ({"instances": {"no.such.check": 1}}, "unknown checks"),
    ({"suites": ["gb.krein"]}, "need a momentum grid"),
    ({"regions": [{"name": "A", "center": [0, 0, 0, 0], "halfwidths": [1, 1, 1, 1]}] * 2}, "duplicate"),
    ({"spacelike": [["A", "B"]]}, "undeclared"),
])
def test_validation_errors(patch, match):
    with pytest.raises(InvalidArgument, match=match):
        validate({**ABSTRACT, **patch})


def test_schema_is_closed():
    assert SCHEMA["additionalProperties"] is False


def test_rng_streams_are_independent_of_order():
    ctx = S.Context({**ABSTRACT, "seed": 5})
    a = ctx.rng("weyl.algebra_identities").normal(size=3)
    ctx.rng("reduce.stages").normal(size=10)
    b = ctx.rng("weyl.algebra_identities").normal(size=3)
    assert (a == b).all()


def test_failing_instance_is_replayable(monkeypatch):
    calls = []
    real = S.dimension_law_instance

    def broken(inst):
        calls.append(inst)
        return {**real(inst), "agree": False}

    monkeypatch.setattr(S, "dimension_law_instance", broken)
    ctx = S.Context({**ABSTRACT, "seed": 3, "instances": {"symspace.dimension_law": 4}})
    res = S.run_check("symspace.dimension_law", ctx)
    assert not res.passed
    payload = json.loads(res.message.split("first failing instance: ", 1)[1])
    assert payload["index"] == 0 and payload["form"] == calls[0]["form"]
    monkeypatch.undo()
    assert S.dimension_law_instance({"form": payload["form"], "vectors": payload["vectors"]})["agree"]


def test_monotone_rule():
    assert S.monotone([1.0, 0.1, 1e-3], 1e-12)
    assert not S.monotone([1.0, 1.0], 1e-12)
    assert S.monotone([1e-13, 5e-13], 1e-12)
    assert not S.monotone([1e-13, 2e-12], 1e-12)


def test_jsonable():
    import numpy as np
    out = S.jsonable({"a": np.float64(1.5), "b": np.arange(3), "c": np.zeros(100), "d": 1j, "e": (np.bool_(True),)})
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": {"array_shape": [100]}, "d": {"re": 0.0, "im": 1.0}, "e": [True]}
    json.dumps(out)
