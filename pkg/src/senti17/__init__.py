"""Ensemble of convolutional networks for three-way tweet sentiment."""

from .embeddings import EmbeddingTable, build_input_matrix, load_embeddings
from .ensemble import ensemble_predict, majority_vote, select_members
from .labels import LABELS
from .model import Hyperparams, backward, forward, init_params, predict_label
from .nadam import NadamConfig, nadam_step
from .text import load_dataset, normalize, tokenize
from .train import TrainConfig, train_network

__version__ = "0.1.0"
