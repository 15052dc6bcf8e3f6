import random

import numpy as np
import pytest

from gmalab import catalog
from gmalab.fuzz import (
    characters,
    extension_classes,
    fuzz_criterion,
    fuzz_gma,
    random_gma_instance,
    random_residual,
    teichmuller,
)


def test_characters_of_s3():
    G = catalog.named_group("S3")
    assert len(characters(G, 3)) == 2
    assert len(characters(catalog.named_group("Z3"), 7)) == 3


def test_extension_classes_sign_by_trivial():
    G = catalog.named_group("S3")
    one, sgn = characters(G, 3)
    assert len(extension_classes(G, 3, one, sgn)) + len(extension_classes(G, 3, sgn, one)) >= 1


def test_teichmuller_is_multiplicative_root():
    for a in range(1, 5):
        t = teichmuller(a, 5, 3)
        assert t % 5 == a and pow(t, 4, 125) == 1


def test_nonsplit_residuals():
    rng = random.Random(0)
    for name, p in [("S3", 3), ("D5", 5), ("D4", 3)]:
        res = random_residual(catalog.named_group(name), p, rng, allow_split=False)
        assert res is None or not res.split


def test_instances_are_deterministic():
    a = random_gma_instance(random.Random(11))
    b = random_gma_instance(random.Random(11))
    assert a.label == b.label and np.array_equal(a.rho.images, b.rho.images)


def test_fuzz_gma_small():
    rep = fuzz_gma(12, seed=2)
    assert rep["count"] == 12 and not rep["violations"]
    assert rep == fuzz_gma(12, seed=2)


def test_fuzz_criterion_small():
    rep = fuzz_criterion(20, seed=7)
    assert rep["consistent_claims"] <= rep["claimed"] and not rep["violations"]


def test_counts_must_be_positive():
    with pytest.raises(ValueError):
        fuzz_gma(0, 1)
    with pytest.raises(ValueError):
        fuzz_criterion(0, 1)
