# Evaluation traces and their JSON lines form.
import json
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from atbench.exceptions import FormatException
from atbench.space import Configuration


@dataclass(frozen=True)
class TraceEvent:
    """One completed evaluation. Memoised repeats are not fresh and complete at the time of the event before."""
    completion_time: float
    config: Configuration
    objective: float
    fresh: bool


class Trace:
    """The append-only sequence of evaluations of one optimizer run"""

    def __init__(self, run_id: int = 0, master_seed: int = 0, events: Iterable[TraceEvent] = ()):
        self.run_id = run_id
        self.master_seed = master_seed
        self.events: List[TraceEvent] = []
        self._replay = None
        for event in events:
            self.append(event)

    def __len__(self):
        return len(self.events)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (self.run_id, self.master_seed, self.events) == (other.run_id, other.master_seed, other.events)

    def __repr__(self):
        return f"Trace(run_id={self.run_id}, events={len(self.events)})"

    def append(self, event: TraceEvent):
        if self.events and event.completion_time < self.events[-1].completion_time:
            raise ValueError(f"event at {event.completion_time} completes before the previous event "
                             f"at {self.events[-1].completion_time}")
        self.events.append(event)
        self._replay = None

    @property
    def fresh_events(self) -> List[TraceEvent]:
        return [e for e in self.events if e.fresh]

    def _best_so_far(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._replay is None:
            times = np.array([e.completion_time for e in self.events], dtype=np.float64)
            best = np.minimum.accumulate(np.array([e.objective for e in self.events], dtype=np.float64))
            self._replay = times, best
        return self._replay

    def best_so_far_at(self, t: float) -> Optional[float]:
        """Lowest objective among the events completed by time t, None if nothing completed yet"""
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        if not self.events:
            return None
        times, best = self._best_so_far()
        i = int(np.searchsorted(times, t, side="right")) - 1
        return float(best[i]) if i >= 0 else None

    def best_so_far_curve(self, grid: Sequence[float]) -> np.ndarray:
        """best_so_far_at for every time of a grid, NaN where nothing had completed"""
        curve = np.full(len(grid), np.nan)
        if not self.events:
            return curve
        times, best = self._best_so_far()
        i = np.searchsorted(times, np.asarray(grid, dtype=np.float64), side="right") - 1
        completed = i >= 0
        curve[completed] = best[i[completed]]
        return curve

    def to_records(self) -> List[dict]:
        return [{"run_id": self.run_id, "completion_time": e.completion_time, "config": list(e.config),
                 "objective": e.objective, "fresh": e.fresh} for e in self.events]


def best_so_far_at(trace: Trace, t: float) -> Optional[float]:
    return trace.best_so_far_at(t)


def _dumps(record) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def write_traces(path, traces: Sequence[Trace], header: Optional[dict] = None):
    """Write traces as JSON lines: one header object, then one object per event ordered by run_id.

    Arguments:
        path: output file
        traces: the runs to write
        header: extra fields for the header line (algorithm, cache, budget...)
    """
    header = dict(header or {})
    header["runs"] = len(traces)
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(_dumps({"header": header}) + "\n")
        for trace in sorted(traces, key=lambda tr: tr.run_id):
            fp.write(_dumps({"run": trace.run_id, "master_seed": trace.master_seed}) + "\n")
            for record in trace.to_records():
                fp.write(_dumps(record) + "\n")


def read_traces(path) -> Tuple[dict, List[Trace]]:
    """Read a file written by :func:`write_traces`

    Returns:
        The header fields and the traces, ordered by run_id
    """
    header = None
    traces = {}
    with open(path, encoding="utf-8") as fp:
        for number, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatException(f"line {number} of {path} is not JSON ({e})")
            if "header" in record:
                header = record["header"]
            elif "run" in record:
                traces[record["run"]] = Trace(run_id=record["run"], master_seed=record["master_seed"])
            else:
                try:
                    trace = traces[record["run_id"]]
                    trace.append(TraceEvent(completion_time=record["completion_time"],
                                            config=tuple(record["config"]),
                                            objective=record["objective"],
                                            fresh=record["fresh"]))
                except KeyError as e:
                    raise FormatException(f"line {number} of {path}: missing or unknown {e}")
    if header is None:
        raise FormatException(f"{path} has no header line")
    return header, [traces[run_id] for run_id in sorted(traces)]
