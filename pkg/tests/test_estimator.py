from __future__ import annotations

import pytest

from docfuzz.estimator import ConstraintMiner


def test_param_protocol_round_trip():
    miner = ConstraintMiner(min_support=3, min_confidence=0.7, max_size=5)
    params = miner.get_params()
    assert params == {"min_support": 3, "min_confidence": 0.7, "max_size": 5}
    clone = ConstraintMiner(**params)
    assert clone.get_params() == params
    clone.set_params(min_support=2)
    assert clone.min_support == 2
    with pytest.raises(ValueError):
        clone.set_params(bogus=1)


def test_fit_transform_on_annotated_pair(pair_sample, pair_prepared):
    miner = ConstraintMiner(min_support=2, min_confidence=0.9)
    result = miner.fit(pair_sample).transform(pair_prepared)
    c = result.constraints[("tf.nn.atrous_conv2d", "value")]
    assert c.dtypes == frozenset({"float"})
    assert miner.score(pair_sample) > 0.5


def test_transform_requires_fit(pair_prepared):
    with pytest.raises(RuntimeError, match="not fitted"):
        ConstraintMiner().transform(pair_prepared)
