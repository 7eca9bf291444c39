"""Discrete ergodic fading models for the two-user Gaussian interference channel.

A fading state collects the four power gains (squared channel magnitudes)
linking the two transmitters to the two receivers.  A fading process is a
finite collection of such states with probabilities; ergodicity means every
long codeword sees the states in their stationary proportions, so only the
per-state gains and their probabilities matter.

Everything downstream (classification, power allocation, sum-rate
optimization) consumes these types.  Rates are in bits per channel use;
``shannon_bits`` is the scalar map snr -> log2(1 + snr) used throughout.
Power policies map fading states to transmit powers and are feasible when
each user's average power stays within its budget to ``POWER_TOL``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

POWER_TOL = 1e-9


class ChannelFormatError(ValueError):
    """Raised when a channel description is malformed; the message names the field."""


class PreconditionError(ValueError):
    """Raised when an operation's structural precondition fails for the given channel."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its budget without meeting tolerance."""


def shannon_bits(snr):
    """Capacity of a scalar Gaussian channel at the given SNR, in bits.

    Accepts scalars or arrays; snr must be >= 0.
    """
    return np.log2(1.0 + snr)


@dataclass(frozen=True)
class FadingState:
    """Power gains of one fading state.

    ``gjk`` is the gain from transmitter k to receiver j, so g11 and g22 are
    the direct links while g12 and g21 carry interference.
    """

    g11: float
    g12: float
    g21: float
    g22: float

    def __post_init__(self) -> None:
        for name in ("g11", "g12", "g21", "g22"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ChannelFormatError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value < 0.0:
                raise ChannelFormatError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, float(value))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g11, self.g12, self.g21, self.g22)


@dataclass(frozen=True)
class FadingProcess:
    """Finite-state fading process: states plus their probabilities.

    Probabilities must be positive and sum to 1 within 1e-6 (they are then
    renormalized exactly).  State order is preserved and meaningful: policies
    index states by position.
    """

    states: tuple[FadingState, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.states) == 0:
            raise ChannelFormatError("states must be non-empty")
        if len(self.states) != len(self.probs):
            raise ChannelFormatError(
                f"probs has {len(self.probs)} entries for {len(self.states)} states"
            )
        for i, p in enumerate(self.probs):
            if not math.isfinite(p) or p <= 0.0:
                raise ChannelFormatError(f"probs[{i}] must be finite and > 0, got {p!r}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-6:
            raise ChannelFormatError(f"probabilities sum to {total:g}, expected 1 within 1e-6")
        object.__setattr__(self, "probs", tuple(p / total for p in self.probs))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def prob_array(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    @cached_property
    def gain_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Per-state gain vectors (g11, g12, g21, g22), each of shape (n_states,)."""
        g = np.array([s.as_tuple() for s in self.states], dtype=float)
        return g[:, 0], g[:, 1], g[:, 2], g[:, 3]

    def swap_users(self) -> "FadingProcess":
        """Mirror image with user indices 1 and 2 exchanged in every state."""
        swapped = tuple(
            FadingState(g11=s.g22, g12=s.g21, g21=s.g12, g22=s.g11) for s in self.states
        )
        return FadingProcess(states=swapped, probs=self.probs)


StateLike = FadingState | Sequence[float]


def make_discrete_channel(weighted_states: Iterable[tuple[StateLike, float]]) -> FadingProcess:
    """Build a FadingProcess from (state, probability) pairs.

    States may be FadingState instances or (g11, g12, g21, g22) sequences.
    Probabilities must sum to 1 within 1e-6.
    """
    states: list[FadingState] = []
    probs: list[float] = []
    for i, item in enumerate(weighted_states):
        try:
            raw_state, prob = item
        except (TypeError, ValueError) as exc:
            raise ChannelFormatError(f"entry {i} is not a (state, probability) pair") from exc
        if isinstance(raw_state, FadingState):
            states.append(raw_state)
        else:
            gains = tuple(raw_state)
            if len(gains) != 4:
                raise ChannelFormatError(
                    f"entry {i}: state needs 4 gains (g11, g12, g21, g22), got {len(gains)}"
                )
            states.append(FadingState(*gains))
        probs.append(float(prob))
    return FadingProcess(states=tuple(states), probs=tuple(probs))


def sample_rayleigh_channel(
    sigma2: float,
    direct_gains: tuple[float, float] = (1.0, 1.0),
    n_samples: int = 20000,
    seed: int = 0,
) -> FadingProcess:
    """Equiprobable Monte Carlo discretization of a Rayleigh-faded cross-link channel.

    Cross gains are i.i.d. exponential with mean ``sigma2`` (the squared
    magnitude of a complex Gaussian with variance sigma2 per link); direct
    gains are fixed at ``direct_gains``.  The same seed always yields the
    same process.
    """
    if not (sigma2 > 0) or not math.isfinite(sigma2):
        raise ChannelFormatError(f"sigma2 must be finite and > 0, got {sigma2!r}")
    if n_samples < 1:
        raise ChannelFormatError(f"n_samples must be >= 1, got {n_samples!r}")
    rng = np.random.default_rng(seed)
    g12 = rng.exponential(scale=sigma2, size=n_samples)
    g21 = rng.exponential(scale=sigma2, size=n_samples)
    d1, d2 = float(direct_gains[0]), float(direct_gains[1])
    prob = 1.0 / n_samples
    states = tuple(
        FadingState(g11=d1, g12=float(a), g21=float(b), g22=d2) for a, b in zip(g12, g21)
    )
    return FadingProcess(states=states, probs=(prob,) * n_samples)


@dataclass(frozen=True)
class PowerBudget:
    """Long-term average transmit power limits for the two users.

    Budgets are finite and >= 0; a zero budget silences that user.
    """

    p1_bar: float
    p2_bar: float

    def __post_init__(self) -> None:
        for name in ("p1_bar", "p2_bar"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ChannelFormatError(f"budget {name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value < 0.0:
                raise ChannelFormatError(f"budget {name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, float(value))


@dataclass(frozen=True)
class PowerPolicy:
    """Per-state transmit powers for both users, indexed like the process states."""

    p1: tuple[float, ...]
    p2: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.p1) != len(self.p2):
            raise ChannelFormatError(
                f"policy arrays disagree: {len(self.p1)} vs {len(self.p2)} states"
            )
        object.__setattr__(self, "p1", tuple(float(x) for x in self.p1))
        object.__setattr__(self, "p2", tuple(float(x) for x in self.p2))

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.p1, dtype=float), np.array(self.p2, dtype=float)

    @staticmethod
    def from_arrays(p1: np.ndarray, p2: np.ndarray) -> "PowerPolicy":
        return PowerPolicy(p1=tuple(np.asarray(p1, dtype=float)), p2=tuple(np.asarray(p2, dtype=float)))

    @staticmethod
    def constant(p1: float, p2: float, n_states: int) -> "PowerPolicy":
        return PowerPolicy(p1=(float(p1),) * n_states, p2=(float(p2),) * n_states)


@dataclass(frozen=True)
class PolicyFeasibility:
    """Budget audit of a policy: average powers and whether each respects its cap."""

    mean_p1: float
    mean_p2: float
    within_p1: bool
    within_p2: bool
    has_negative: bool

    @property
    def feasible(self) -> bool:
        return self.within_p1 and self.within_p2 and not self.has_negative


def expect(process: FadingProcess, values) -> float:
    """Expectation over the fading process.

    ``values`` is either an array of per-state numbers or a callable mapping
    FadingState to a number.
    """
    if callable(values):
        values = np.array([values(s) for s in process.states], dtype=float)
    else:
        values = np.asarray(values, dtype=float)
        if values.shape != (process.n_states,):
            raise ValueError(
                f"expected {process.n_states} per-state values, got shape {values.shape}"
            )
    return float(np.dot(process.prob_array, values))


def validate_policy(
    process: FadingProcess, policy: PowerPolicy, budget: PowerBudget
) -> PolicyFeasibility:
    """Audit a policy against the power budgets at tolerance POWER_TOL."""
    p1, p2 = policy.arrays
    if p1.shape != (process.n_states,):
        raise ChannelFormatError(
            f"policy has {p1.shape[0]} states, process has {process.n_states}"
        )
    mean1 = float(np.dot(process.prob_array, p1))
    mean2 = float(np.dot(process.prob_array, p2))
    return PolicyFeasibility(
        mean_p1=mean1,
        mean_p2=mean2,
        within_p1=mean1 <= budget.p1_bar + POWER_TOL,
        within_p2=mean2 <= budget.p2_bar + POWER_TOL,
        has_negative=bool((p1 < 0).any() or (p2 < 0).any()),
    )


def _require_number(obj, field: str) -> float:
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ChannelFormatError(f"{field} must be a number, got {obj!r}")
    return float(obj)


def channel_from_dict(doc: dict) -> tuple[FadingProcess, PowerBudget]:
    """Parse the JSON channel description into a process and budget.

    Expected shape::

        {"states": [{"g11": .., "g12": .., "g21": .., "g22": .., "p": ..}, ...],
         "budget": {"p1": .., "p2": ..}}

    Raises ChannelFormatError naming the offending field on any problem.
    """
    if not isinstance(doc, dict):
        raise ChannelFormatError("top-level document must be a JSON object")
    if "states" not in doc:
        raise ChannelFormatError("missing required field 'states'")
    if "budget" not in doc:
        raise ChannelFormatError("missing required field 'budget'")
    raw_states = doc["states"]
    if not isinstance(raw_states, list) or not raw_states:
        raise ChannelFormatError("'states' must be a non-empty list")
    pairs: list[tuple[FadingState, float]] = []
    for i, entry in enumerate(raw_states):
        if not isinstance(entry, dict):
            raise ChannelFormatError(f"states[{i}] must be an object")
        gains = {}
        for key in ("g11", "g12", "g21", "g22", "p"):
            if key not in entry:
                raise ChannelFormatError(f"states[{i}] missing field '{key}'")
            gains[key] = _require_number(entry[key], f"states[{i}].{key}")
        try:
            state = FadingState(gains["g11"], gains["g12"], gains["g21"], gains["g22"])
        except ChannelFormatError as exc:
            raise ChannelFormatError(f"states[{i}]: {exc}") from exc
        pairs.append((state, gains["p"]))
    raw_budget = doc["budget"]
    if not isinstance(raw_budget, dict):
        raise ChannelFormatError("'budget' must be an object")
    for key in ("p1", "p2"):
        if key not in raw_budget:
            raise ChannelFormatError(f"budget missing field '{key}'")
    budget = PowerBudget(
        p1_bar=_require_number(raw_budget["p1"], "budget.p1"),
        p2_bar=_require_number(raw_budget["p2"], "budget.p2"),
    )
    try:
        process = make_discrete_channel(pairs)
    except ChannelFormatError as exc:
        raise ChannelFormatError(f"states: {exc}") from exc
    return process, budget


def load_channel_json(path: str) -> tuple[FadingProcess, PowerBudget]:
    """Read a channel JSON file; see channel_from_dict for the format."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ChannelFormatError(f"cannot read channel file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"channel file {path!r} is not valid JSON: {exc}") from exc
    return channel_from_dict(doc)


def channel_to_dict(process: FadingProcess, budget: PowerBudget) -> dict:
    """Inverse of channel_from_dict."""
    return {
        "states": [
            {"g11": s.g11, "g12": s.g12, "g21": s.g21, "g22": s.g22, "p": p}
            for s, p in zip(process.states, process.probs)
        ],
        "budget": {"p1": budget.p1_bar, "p2": budget.p2_bar},
    }
