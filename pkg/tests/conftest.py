"""Shared fixtures: catalog metrics, standard pairs, seeded samplers."""

import numpy as np
import pytest

from finvar import ProjectivePair, catalog_metric
from finvar.config import sample_tangent_points


def make_metric(kind, n, **kw):
    if kind == "randers_df":
        # alpha euclidean, beta = d(0.1 x^1): projectively related to alpha
        return catalog_metric({
            "kind": "randers", "dim": n,
            "beta": {"potential": "linear", "params": [0.1] + [0.0] * (n - 1)},
        })
    if kind == "curved":
        return catalog_metric({"kind": "riemannian", "dim": n,
                               "field": "curved_x1"})
    if kind == "scaled":
        return catalog_metric({"kind": "scaled", "factor": kw["factor"],
                               "base": kw["base"]})
    return catalog_metric({"kind": kind, "dim": n})


def make_pair(base_kind, comp_kind, n, **kw):
    return ProjectivePair(make_metric(base_kind, n, **kw),
                          make_metric(comp_kind, n, **kw))


# (base, comparison) kinds that share unparameterized geodesics
PASSING_KINDS = [("euclidean", "klein"), ("euclidean", "funk"),
                 ("klein", "funk"), ("euclidean", "randers_df")]


def catalog_metrics(n):
    """One representative of every catalog family in dimension n."""
    return [
        make_metric("euclidean", n),
        make_metric("klein", n),
        make_metric("funk", n),
        make_metric("curved", n),
        catalog_metric({"kind": "riemannian", "dim": n, "field": "const_diag",
                        "params": list(range(2, n + 2))}),
        catalog_metric({"kind": "randers", "dim": n,
                        "beta": {"potential": "quadratic",
                                 "params": [0.3] * n}}),
        make_metric("scaled", n, factor=2.0, base={"kind": "funk", "dim": n}),
    ]


def sample_points(pair, count, seed=0, velocity_scale=1.0, box=(-0.35, 0.35)):
    rng = np.random.default_rng(seed)
    return sample_tangent_points(pair, count, rng, box=box,
                                 velocity_scale=velocity_scale)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
