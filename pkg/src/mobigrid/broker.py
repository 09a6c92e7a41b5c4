"""Brokering server, resource repository, and station monitoring state.

All state here is owned by the single-threaded simulation loop. Methods
mutate the stores and report each transition through an optional log
callback; the engine adds timing and sequencing, and the same callbacks
drive the replay oracle in :mod:`mobigrid.eventlog`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from mobigrid.hexgrid import HexCoord, MoveClass

LogFn = Callable[..., None]


class SubJobStatus(Enum):
    PENDING = "pending"
    ASSIGNED = "assigned"
    EXECUTING = "executing"
    COMPLETED = "completed"
    ABORTED = "aborted"


@dataclass
class ResourceEntry:
    """One station's row in the resource repository."""

    ms_id: int
    cpu_rate: float
    cell: HexCoord
    ao: int
    vo: int
    active_subjobs: int = 0
    in_grid: bool = True


@dataclass(frozen=True)
class Job:
    job_id: int
    initiator: int
    total_work: int
    subjob_count: int
    dispatch_payload_bytes: int
    result_payload_bytes: int

    def __post_init__(self) -> None:
        if self.total_work <= 0:
            raise ValueError("total_work must be > 0")
        if self.subjob_count < 1:
            raise ValueError("subjob_count must be >= 1")


@dataclass
class SubJobRecord:
    """One sub job's row in the job allocation database."""

    subjob_id: int
    job_id: int
    work: int
    status: SubJobStatus = SubJobStatus.PENDING
    assignee: int | None = None
    result: str | None = None
    abort_count: int = 0
    # Bumped on every dispatch so stale finish/delivery events are ignored.
    assignment_seq: int = 0


@dataclass
class BsmsRegistry:
    """Monitoring-server view: who is in the grid and where."""

    stations: dict[int, tuple[HexCoord, int, int]] = field(default_factory=dict)
    update_count: int = 0
    registration_count: int = 0
    deregistration_count: int = 0


def split_work(total_work: int, subjob_count: int) -> list[int]:
    """Equal split of the work units; the remainder goes to the last sub job."""
    base = total_work // subjob_count
    works = [base] * subjob_count
    works[-1] = total_work - base * (subjob_count - 1)
    return works


class GridServices:
    """Brokering server (RR + JADB) plus the BSMS registry."""

    def __init__(self, initiator_executes: bool = False, log: LogFn | None = None):
        self.initiator_executes = initiator_executes
        self._log = log or (lambda *args, **fields: None)
        self.rr: dict[int, ResourceEntry] = {}
        self.jadb: dict[int, SubJobRecord] = {}
        self.jobs: dict[int, Job] = {}
        self.bsms = BsmsRegistry()
        self.pending: list[int] = []
        self.total_dispatches = 0
        self.total_aborts = 0
        self._next_subjob_id = 0

    # -- membership ------------------------------------------------------

    def register_station(
        self, ms_id: int, cpu_rate: float, cell: HexCoord, ao: int, vo: int
    ) -> None:
        if cpu_rate <= 0:
            raise ValueError("cpu_rate must be > 0")
        if ms_id in self.rr and self.rr[ms_id].in_grid:
            raise ValueError(f"station {ms_id} already registered")
        self.rr[ms_id] = ResourceEntry(ms_id, cpu_rate, cell, ao, vo)
        self.bsms.stations[ms_id] = (cell, ao, vo)
        self.bsms.registration_count += 1
        self._log(
            "register", ms=ms_id, cpu=repr(cpu_rate), cell=str(cell), ao=ao, vo=vo
        )

    def is_active(self, ms_id: int) -> bool:
        entry = self.rr.get(ms_id)
        return entry is not None and entry.in_grid

    # -- job intake ------------------------------------------------------

    def submit_job(self, job: Job) -> list[SubJobRecord]:
        """Decompose a job into pending sub jobs stored in the JADB."""
        if not self.is_active(job.initiator):
            raise ValueError(f"initiator {job.initiator} is not in the grid")
        if job.job_id in self.jobs:
            raise ValueError(f"duplicate job id {job.job_id}")
        self.jobs[job.job_id] = job
        records = []
        for work in split_work(job.total_work, job.subjob_count):
            sj = SubJobRecord(self._next_subjob_id, job.job_id, work)
            self._next_subjob_id += 1
            self.jadb[sj.subjob_id] = sj
            self.pending.append(sj.subjob_id)
            records.append(sj)
        self._log(
            "job_submit",
            job=job.job_id,
            initiator=job.initiator,
            work=job.total_work,
            subjobs=job.subjob_count,
            dbytes=job.dispatch_payload_bytes,
            rbytes=job.result_payload_bytes,
        )
        return records

    # -- scheduling ------------------------------------------------------

    def select_subordinate(self, subjob_id: int) -> int | None:
        """Least-loaded eligible station; ties by higher cpu, then lower id."""
        rec = self.jadb[subjob_id]
        if rec.status is not SubJobStatus.PENDING:
            raise ValueError(f"sub job {subjob_id} is not pending")
        initiator = self.jobs[rec.job_id].initiator
        eligible = [
            e
            for e in self.rr.values()
            if e.in_grid and (self.initiator_executes or e.ms_id != initiator)
        ]
        if not eligible:
            return None
        best = min(eligible, key=lambda e: (e.active_subjobs, -e.cpu_rate, e.ms_id))
        return best.ms_id

    def dispatch(self, subjob_id: int, ms_id: int) -> int:
        """Assign a pending sub job; returns the new assignment sequence."""
        rec = self.jadb[subjob_id]
        if rec.status is not SubJobStatus.PENDING:
            raise ValueError(f"sub job {subjob_id} is not pending")
        if not self.is_active(ms_id):
            raise ValueError(f"station {ms_id} is not in the grid")
        rec.status = SubJobStatus.ASSIGNED
        rec.assignee = ms_id
        rec.assignment_seq += 1
        self.rr[ms_id].active_subjobs += 1
        self.pending.remove(subjob_id)
        self.total_dispatches += 1
        self._log("dispatch", subjob=subjob_id, ms=ms_id, asg=rec.assignment_seq)
        return rec.assignment_seq

    def begin_execution(self, subjob_id: int, ms_id: int) -> None:
        rec = self.jadb[subjob_id]
        if rec.status is not SubJobStatus.ASSIGNED or rec.assignee != ms_id:
            raise RuntimeError(
                f"sub job {subjob_id} is not assigned to station {ms_id}"
            )
        rec.status = SubJobStatus.EXECUTING
        self._log("exec_start", subjob=subjob_id, ms=ms_id)

    def complete_subjob(self, ms_id: int, subjob_id: int, result: str) -> None:
        rec = self.jadb[subjob_id]
        if rec.status is not SubJobStatus.EXECUTING or rec.assignee != ms_id:
            raise RuntimeError(
                f"completion from station {ms_id} for sub job {subjob_id} "
                f"in state {rec.status.value} (assignee {rec.assignee})"
            )
        rec.status = SubJobStatus.COMPLETED
        rec.result = result
        rec.assignee = None
        self.rr[ms_id].active_subjobs -= 1
        self._log("complete", subjob=subjob_id, ms=ms_id, result=result)

    # -- movement --------------------------------------------------------

    def on_location_update(
        self, ms_id: int, cell: HexCoord, ao: int, vo: int, move_class: MoveClass
    ) -> None:
        """Record a within-VO move; running sub jobs are unaffected."""
        if move_class not in (MoveClass.SAME_AO, MoveClass.INTRA_VO):
            raise ValueError(f"{move_class} is a handover, not a location update")
        if not self.is_active(ms_id):
            raise ValueError(f"station {ms_id} is not in the grid")
        entry = self.rr[ms_id]
        entry.cell, entry.ao, entry.vo = cell, ao, vo
        self.bsms.stations[ms_id] = (cell, ao, vo)
        self.bsms.update_count += 1
        self._log(
            "loc_update",
            ms=ms_id,
            cell=str(cell),
            ao=ao,
            vo=vo,
            cls=move_class.value,
        )

    def on_handover(
        self,
        ms_id: int,
        move_class: MoveClass,
        new_cell: HexCoord | None = None,
        new_ao: int | None = None,
        new_vo: int | None = None,
    ) -> list[int]:
        """Abort and requeue the station's sub jobs; update its membership.

        An inter-VO move re-registers the station under the new VO; a move
        out of coverage (or a churn departure) deregisters it. Returns the
        aborted sub-job ids, already re-entered as pending.
        """
        if move_class not in (MoveClass.INTER_VO, MoveClass.OUT_OF_COVERAGE):
            raise ValueError(f"{move_class} is not a handover")
        if not self.is_active(ms_id):
            raise ValueError(f"station {ms_id} is not in the grid")
        entry = self.rr[ms_id]
        aborted = [
            sj.subjob_id
            for sj in self.jadb.values()
            if sj.assignee == ms_id
            and sj.status in (SubJobStatus.ASSIGNED, SubJobStatus.EXECUTING)
        ]
        for subjob_id in sorted(aborted):
            rec = self.jadb[subjob_id]
            rec.status = SubJobStatus.ABORTED
            rec.abort_count += 1
            self.total_aborts += 1
            self._log("abort", subjob=subjob_id, ms=ms_id)
            rec.status = SubJobStatus.PENDING
            rec.assignee = None
            self.pending.append(subjob_id)
        entry.active_subjobs = 0
        if move_class is MoveClass.INTER_VO:
            assert new_cell is not None and new_ao is not None and new_vo is not None
            entry.cell, entry.ao, entry.vo = new_cell, new_ao, new_vo
            self.bsms.stations[ms_id] = (new_cell, new_ao, new_vo)
            self.bsms.registration_count += 1
            self._log(
                "handover",
                ms=ms_id,
                cls=move_class.value,
                cell=str(new_cell),
                ao=new_ao,
                vo=new_vo,
            )
        else:
            entry.in_grid = False
            del self.bsms.stations[ms_id]
            self.bsms.deregistration_count += 1
            self._log("handover", ms=ms_id, cls=move_class.value)
        return sorted(aborted)

    # -- results and metrics --------------------------------------------

    def collect_results(self, job_id: int) -> list[str]:
        """All partial results stored so far for one job."""
        if job_id not in self.jobs:
            raise ValueError(f"unknown job {job_id}")
        return [
            sj.result
            for sj in sorted(self.jadb.values(), key=lambda s: s.subjob_id)
            if sj.job_id == job_id and sj.status is SubJobStatus.COMPLETED
        ]

    def job_complete(self, job_id: int) -> bool:
        if job_id not in self.jobs:
            raise ValueError(f"unknown job {job_id}")
        return all(
            sj.status is SubJobStatus.COMPLETED
            for sj in self.jadb.values()
            if sj.job_id == job_id
        )

    def failure_rate(self) -> float:
        """Aborted assignments over total assignments; 0 with no dispatches."""
        if self.total_dispatches == 0:
            return 0.0
        return self.total_aborts / self.total_dispatches

    # -- consistency -----------------------------------------------------

    def check_invariants(self) -> None:
        """Structural consistency of JADB, RR, and BSMS; raises on violation."""
        per_job: dict[int, int] = {job_id: 0 for job_id in self.jobs}
        loads: dict[int, int] = {ms_id: 0 for ms_id in self.rr}
        for sj in self.jadb.values():
            if sj.status is SubJobStatus.ABORTED:
                raise AssertionError(f"sub job {sj.subjob_id} resting in ABORTED")
            per_job[sj.job_id] += 1
            if sj.status is SubJobStatus.COMPLETED and sj.result is None:
                raise AssertionError(f"completed sub job {sj.subjob_id} lacks result")
            if sj.status in (SubJobStatus.ASSIGNED, SubJobStatus.EXECUTING):
                if sj.assignee is None:
                    raise AssertionError(f"sub job {sj.subjob_id} has no assignee")
                loads[sj.assignee] += 1
        for job_id, job in self.jobs.items():
            if per_job[job_id] != job.subjob_count:
                raise AssertionError(
                    f"job {job_id}: {per_job[job_id]} records, "
                    f"expected {job.subjob_count}"
                )
        for ms_id, entry in self.rr.items():
            if entry.active_subjobs != loads[ms_id]:
                raise AssertionError(
                    f"station {ms_id}: RR load {entry.active_subjobs} != "
                    f"JADB load {loads[ms_id]}"
                )
            if entry.in_grid != (ms_id in self.bsms.stations):
                raise AssertionError(f"station {ms_id}: RR/BSMS membership mismatch")

    def snapshot(self) -> dict:
        """Deterministic value snapshot for replay comparison."""
        return {
            "rr": {
                ms: (e.cpu_rate, e.cell, e.ao, e.vo, e.active_subjobs, e.in_grid)
                for ms, e in sorted(self.rr.items())
            },
            "jadb": {
                sj.subjob_id: (
                    sj.job_id,
                    sj.work,
                    sj.status.value,
                    sj.assignee,
                    sj.result,
                    sj.abort_count,
                )
                for sj in sorted(self.jadb.values(), key=lambda s: s.subjob_id)
            },
            "bsms": (
                dict(sorted(self.bsms.stations.items())),
                self.bsms.update_count,
                self.bsms.registration_count,
                self.bsms.deregistration_count,
            ),
            "totals": (self.total_dispatches, self.total_aborts),
        }
