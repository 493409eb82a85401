"""Learned initial-pressure guesses from boundary pressure data."""

from .data import PairDataset, load_dataset
from .model import BoundaryToPressureNet
from .predict import predict_guess
from .training import TrainSettings, load_model, save_model, train_model, write_history

__version__ = "0.1.0"
