"""Environments, value signals, observer experiments and binary agents."""

from .env import Environment, ValueSignal, expected_pcr, ground_truth_pcr, iid_step, lazy_step
from .observer import run_observer
from .bua import BuaAgent, arbitrate, delayed_extend, run_sniffy

__all__ = [
    "Environment",
    "ValueSignal",
    "ground_truth_pcr",
    "expected_pcr",
    "iid_step",
    "lazy_step",
    "run_observer",
    "BuaAgent",
    "delayed_extend",
    "arbitrate",
    "run_sniffy",
]
