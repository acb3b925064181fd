"""Targeted multivariate GARCH estimation and correlation networks."""

import json

from ._covtarget import (
    DegenerateSeriesError,
    DomainError,
    Error,
    EstimationError,
    InsufficientDataError,
    NotPositiveDefiniteError,
    NumericalOverflowError,
    ParseError,
    ShapeError,
    build_target,
    chol_sqrt,
    cliques_of_edges,
    cut_tree,
    frobenius_path_loss,
    garch11_fit,
    graph_dot,
    kl_divergence,
    load_returns,
    logdet,
    maximal_cliques,
    nearest_pd,
    simulate,
    threshold_correlation,
)
from . import _covtarget

__version__ = "0.1.0"


def build_graph(corr, delta, labels=()):
    return json.loads(_covtarget.graph_json(corr, delta, list(labels)))


def dendrogram(corr, labels=()):
    return json.loads(_covtarget.dendrogram_json(corr, list(labels)))


def fit(model, returns, delta=None, labels=(), starts=5, seed=0):
    """Fit one of bekk, bekk_mod, dcc, dcc_mod; returns the parameter record as a dict."""
    return json.loads(_covtarget.fit_json(model, returns, delta, list(labels), starts, seed))


def simulate_fitted(params, t_len, seed):
    return simulate(json.dumps(params), t_len, seed)


def evaluate(returns, delta, models=("bekk", "bekk_mod", "dcc", "dcc_mod"), labels=(), seed=0, sim_len=0, starts=5):
    return json.loads(_covtarget.evaluate_json(returns, delta, list(models), list(labels), seed, sim_len, starts))
