#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import time


class ProgressBar:
    """Prints the number of finished time steps or samples together with an estimate of the remaining time."""

    def __init__(self, maxValue: float, label: str = "Step", updateInterval: float = 2.0):
        # fmt: off
        self._getTime        = time.time
        self.maxValue        = maxValue
        self.label           = label
        self.creationTime    = self._getTime()
        self.lastUpdateTime  = self.creationTime
        self.lastUpdateValue = 0.0
        self.updateInterval  = updateInterval  # seconds
        # fmt: on

    @staticmethod
    def _formatDuration(seconds: float) -> str:
        seconds = int(max(seconds, 0))
        return f"{seconds // 60} min {seconds % 60} s"

    def update(self, value: float) -> None:
        """Should be called whenever the monitored value changes. Prints at most once per update interval."""
        now = self._getTime()
        if now - self.lastUpdateTime < self.updateInterval and value < self.maxValue:
            return

        fraction = value / self.maxValue if self.maxValue != 0 else 1.0
        spent = now - self.creationTime
        remaining = spent / fraction - spent if fraction > 0 else 0.0
        # The rate since the last update reacts faster to changes than the average over the whole run.
        if value > self.lastUpdateValue:
            currentRemaining = (now - self.lastUpdateTime) / (value - self.lastUpdateValue) * (self.maxValue - value)
        else:
            currentRemaining = float('inf')

        print(
            f"[Info] {self.label} {value} of {self.maxValue} ({fraction * 100.0:.2f}%). "
            f"Remaining time: "
            f"{self._formatDuration(currentRemaining) if currentRemaining != float('inf') else 'unknown'} "
            f"(current rate), {self._formatDuration(remaining)} (average rate). "
            f"Spent time: {self._formatDuration(spent)}",
            flush=True,
        )

        self.lastUpdateTime = now
        self.lastUpdateValue = value
