"""Toy enhanced arc/label predictor with hand-written gradients."""

from .mixing import LayerStack, ScalarMixParams, average_subwords, scalar_mix
from .model import (
    AdjacencyScores,
    LabelScores,
    PredictorParams,
    arc_scores,
    decode_arcs,
    decode_graph,
    init_params,
    label_scores,
    loss,
    loss_and_grads,
)
