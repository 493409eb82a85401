"""Convolutional network mapping boundary traces to an initial-pressure estimate.

Input tensors are [batch, sensors, time]: each boundary sensor is one input
channel. The trunk downsamples time with strided convolutions and max pooling,
then four dense layers feed a linear output sized to the reconstruction grid.
"""

from __future__ import annotations

import torch
from torch import nn


class BoundaryToPressureNet(nn.Module):
    """conv(32,k3,s2) -> pool2 -> 3x conv(64,k3,s2) (first two pooled) ->
    flatten -> 4x dense(64) -> linear output."""

    def __init__(self, n_sensors: int, n_times: int, n_out: int):
        super().__init__()
        self.n_sensors = n_sensors
        self.n_times = n_times
        self.n_out = n_out
        self.features = nn.Sequential(
            nn.Conv1d(n_sensors, 32, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.MaxPool1d(2),
            nn.Conv1d(32, 64, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.MaxPool1d(2),
            nn.Conv1d(64, 64, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.MaxPool1d(2),
            nn.Conv1d(64, 64, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
        )
        with torch.no_grad():
            n_flat = self.features(torch.zeros(1, n_sensors, n_times)).numel()
        dense = []
        width = n_flat
        for _ in range(4):
            dense += [nn.Linear(width, 64), nn.ReLU()]
            width = 64
        dense.append(nn.Linear(64, n_out))  # linear activation on the output
        self.head = nn.Sequential(*dense)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        z = self.features(x)
        return self.head(z.flatten(1))
