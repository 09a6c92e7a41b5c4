"""Deterministic event loop: movement, churn, execution, and transfers.

Events are processed in (time, sequence) order from a binary heap; every
random draw comes from streams derived from the single run seed, so a
(config, seed) pair yields a bit-identical event log.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from mobigrid.broker import GridServices, Job, SubJobStatus
from mobigrid.config import ConfigError, ScenarioConfig
from mobigrid.hexgrid import MoveClass, TopologyMap, build_topology, classify_transition
from mobigrid.mobility import (
    CellGeometry,
    MobilityParams,
    WalkerState,
    advance,
    classify_angle,
    confining_angles,
    sample_drift_angle,
)


@dataclass
class VoLink:
    """Serialized FIFO transfer link shared by one VO."""

    capacity_mbps: float
    busy_until: float = 0.0
    bytes_transferred: int = 0

    def __post_init__(self) -> None:
        if self.capacity_mbps <= 0:
            raise ValueError("link capacity must be > 0")

    def transfer_seconds(self, size_bytes: int) -> float:
        return size_bytes * 8.0 / (self.capacity_mbps * 1e6)


@dataclass
class Station:
    ms_id: int
    cpu_rate: float
    walker: WalkerState
    rng: random.Random
    is_initiator: bool = False
    in_grid: bool = True
    busy_until: float = 0.0


@dataclass
class RunResult:
    """Raw outcome of one run; metric shaping lives in experiments."""

    config: ScenarioConfig
    seed: int
    end_time: float
    log_lines: list[str]
    services: GridServices
    exec_times: list[float]
    total_jobs: int
    completed_jobs: int
    link_bytes: dict[int, int]
    link_capacity_mbps: float

    def log_text(self) -> str:
        return "".join(line + "\n" for line in self.log_lines)

    def bandwidth_utilization(self) -> dict[int, float]:
        """Per-VO fraction of capacity used over the run's elapsed time."""
        if self.end_time <= 0:
            return {vo: 0.0 for vo in self.link_bytes}
        denom = self.link_capacity_mbps * 1e6 * self.end_time
        return {vo: n * 8.0 / denom for vo, n in self.link_bytes.items()}

    def overall_utilization(self) -> float:
        if self.end_time <= 0:
            return 0.0
        total = sum(self.link_bytes.values())
        denom = len(self.link_bytes) * self.link_capacity_mbps * 1e6 * self.end_time
        return total * 8.0 / denom


class Simulation:
    """One seeded run over a fixed topology and job schedule."""

    def __init__(
        self, config: ScenarioConfig, seed: int, check_invariants: bool = False
    ):
        config.validate()
        self.config = config
        self.seed = seed
        self.check_invariants = check_invariants
        self.topology: TopologyMap = build_topology(
            config.vo_count, config.aos_per_vo, config.ao_radius
        )
        self.params = MobilityParams(config.sigma_deg)
        self.angles = confining_angles(CellGeometry(config.cell_ri, config.cell_ro))
        self.log_lines: list[str] = []
        self._log_seq = 0
        self.now = 0.0
        self.services = GridServices(
            initiator_executes=config.initiator_executes, log=self._log
        )
        self.links = {
            vo: VoLink(config.bandwidth_mbps) for vo in range(config.vo_count)
        }
        self.stations: dict[int, Station] = {}
        self._heap: list[tuple[float, int, str, tuple]] = []
        self._event_seq = 0
        self._next_ms_id = 0
        self._next_job_id = 0
        self._next_message_id = 0
        self._messages: dict[int, tuple[str, int, int, tuple]] = {}
        self._job_submit_time: dict[int, float] = {}
        self._job_remaining: dict[int, int] = {}
        self.exec_times: list[float] = []
        self.total_jobs = config.initiator_count * config.jobs_per_initiator
        self.completed_jobs = 0
        self._completed_subjobs: set[int] = set()
        self._churn_rng = random.Random(f"{seed}:churn")
        self._events_processed = 0

    # -- logging ---------------------------------------------------------

    def _log(self, kind: str, /, **fields: object) -> None:
        parts = [repr(self.now), str(self._log_seq), kind]
        parts.extend(f"{key}={value}" for key, value in fields.items())
        self.log_lines.append("\t".join(parts))
        self._log_seq += 1

    # -- scheduling ------------------------------------------------------

    def _schedule(self, time: float, kind: str, payload: tuple = ()) -> None:
        heapq.heappush(self._heap, (time, self._event_seq, kind, payload))
        self._event_seq += 1

    # -- setup -----------------------------------------------------------

    def _station_rng(self, ms_id: int) -> random.Random:
        return random.Random(f"{self.seed}:ms:{ms_id}")

    def _spawn_station(self, rng: random.Random, is_initiator: bool) -> Station:
        cells = self.topology.coverage_cells
        cell = cells[rng.randrange(len(cells))]
        heading = rng.randrange(6)
        cpu = rng.uniform(self.config.cpu_rate_min, self.config.cpu_rate_max)
        ms_id = self._next_ms_id
        self._next_ms_id += 1
        station = Station(
            ms_id=ms_id,
            cpu_rate=cpu,
            walker=WalkerState(cell, heading),
            rng=self._station_rng(ms_id),
            is_initiator=is_initiator,
        )
        self.stations[ms_id] = station
        self.services.register_station(
            ms_id, cpu, cell, self.topology.ao_of(cell), self.topology.vo_of(cell)
        )
        return station

    def _setup(self) -> None:
        cfg = self.config
        master = random.Random(f"{self.seed}:master")
        for i in range(cfg.population):
            station = self._spawn_station(master, is_initiator=i < cfg.initiator_count)
            if not station.is_initiator and math.isfinite(cfg.step_interval_s):
                self._schedule(cfg.step_interval_s, "walk", (station.ms_id,))
        if cfg.mobility_factor > 0:
            self._schedule(cfg.churn_scan_interval_s, "churn_scan")
        job_rng = random.Random(f"{self.seed}:jobs")
        for initiator in range(cfg.initiator_count):
            for j in range(cfg.jobs_per_initiator):
                # Round the draw down to a multiple of the sub-job count so
                # the equal split is exact; a lone remainder chunk would
                # otherwise dominate the job's critical path.
                units = job_rng.randint(cfg.job_work_min, cfg.job_work_max)
                work = max(1, units // cfg.subjobs_per_job) * cfg.subjobs_per_job
                self._schedule(j * cfg.job_interval_s, "job_arrival", (initiator, work))

    # -- messaging -------------------------------------------------------

    def _send(self, kind: str, size: int, vo: int, meta: tuple = ()) -> None:
        link = self.links[vo]
        start = max(self.now, link.busy_until)
        deliver = start + link.transfer_seconds(size)
        link.busy_until = deliver
        message_id = self._next_message_id
        self._next_message_id += 1
        self._messages[message_id] = (kind, size, vo, meta)
        self._log("msg_enqueue", msg=message_id, kind=kind, size=size, vo=vo)
        self._schedule(deliver, "message", (message_id,))

    # -- handlers --------------------------------------------------------

    def _try_dispatch_pending(self) -> None:
        for subjob_id in sorted(self.services.pending):
            ms_id = self.services.select_subordinate(subjob_id)
            if ms_id is None:
                continue
            assignment = self.services.dispatch(subjob_id, ms_id)
            vo = self.services.rr[ms_id].vo
            job = self.services.jobs[self.services.jadb[subjob_id].job_id]
            self._send(
                "dispatch",
                job.dispatch_payload_bytes,
                vo,
                (subjob_id, ms_id, assignment),
            )

    def _on_job_arrival(self, initiator: int, work: int) -> None:
        cfg = self.config
        job = Job(
            job_id=self._next_job_id,
            initiator=initiator,
            total_work=work,
            subjob_count=cfg.subjobs_per_job,
            dispatch_payload_bytes=cfg.dispatch_payload_bytes,
            result_payload_bytes=cfg.result_payload_bytes,
        )
        self._next_job_id += 1
        self.services.submit_job(job)
        self._job_submit_time[job.job_id] = self.now
        self._job_remaining[job.job_id] = job.subjob_count
        self._try_dispatch_pending()

    def _assignment_current(self, subjob_id: int, ms_id: int, assignment: int) -> bool:
        rec = self.services.jadb[subjob_id]
        return (
            rec.assignment_seq == assignment
            and rec.assignee == ms_id
            and self.services.is_active(ms_id)
        )

    def _on_message(self, message_id: int) -> None:
        kind, size, vo, meta = self._messages.pop(message_id)
        self.links[vo].bytes_transferred += size
        self._log("msg_deliver", msg=message_id, kind=kind, size=size, vo=vo)
        if kind == "dispatch":
            subjob_id, ms_id, assignment = meta
            rec = self.services.jadb[subjob_id]
            if (
                not self._assignment_current(subjob_id, ms_id, assignment)
                or rec.status is not SubJobStatus.ASSIGNED
            ):
                self._log("drop", reason="stale_dispatch", subjob=subjob_id, ms=ms_id)
                return
            self.services.begin_execution(subjob_id, ms_id)
            station = self.stations[ms_id]
            finish = max(self.now, station.busy_until) + rec.work / station.cpu_rate
            station.busy_until = finish
            self._schedule(finish, "subjob_finish", (subjob_id, ms_id, assignment))
        elif kind == "result":
            (subjob_id,) = meta
            job_id = self.services.jadb[subjob_id].job_id
            self._job_remaining[job_id] -= 1
            if self._job_remaining[job_id] == 0:
                self.exec_times.append(self.now - self._job_submit_time[job_id])
                self.completed_jobs += 1
                self._log("job_complete", job=job_id)
        # location-update and registration traffic needs no further action

    def _on_subjob_finish(self, subjob_id: int, ms_id: int, assignment: int) -> None:
        rec = self.services.jadb[subjob_id]
        if (
            not self._assignment_current(subjob_id, ms_id, assignment)
            or rec.status is not SubJobStatus.EXECUTING
        ):
            self._log("drop", reason="stale_finish", subjob=subjob_id, ms=ms_id)
            return
        token = f"{subjob_id}/{ms_id}/{self.now:.9f}"
        self.services.complete_subjob(ms_id, subjob_id, token)
        vo = self.services.rr[ms_id].vo
        job = self.services.jobs[rec.job_id]
        self._send("result", job.result_payload_bytes, vo, (subjob_id,))

    def _depart(self, ms_id: int) -> None:
        """Out-of-coverage exit or churn departure: deregister and reallocate."""
        station = self.stations[ms_id]
        vo = self.services.rr[ms_id].vo
        self.services.on_handover(ms_id, MoveClass.OUT_OF_COVERAGE)
        station.in_grid = False
        station.busy_until = self.now
        self._send("registration", self.config.control_message_bytes, vo)
        self._try_dispatch_pending()

    def _on_walk(self, ms_id: int) -> None:
        station = self.stations.get(ms_id)
        if station is None or not station.in_grid:
            return
        theta = sample_drift_angle(station.rng, self.params)
        direction = classify_angle(theta, self.angles)
        old = station.walker
        new = advance(old, direction)
        move_class = classify_transition(self.topology, old.cell, new.cell)
        station.walker = new
        self._log(
            "walk",
            ms=ms_id,
            theta=f"{theta:.6f}",
            k=direction.name,
            heading=new.heading,
            cell=str(new.cell),
            cls=move_class.value,
        )
        if move_class in (MoveClass.SAME_AO, MoveClass.INTRA_VO):
            ao = self.topology.ao_of(new.cell)
            vo = self.topology.vo_of(new.cell)
            self.services.on_location_update(ms_id, new.cell, ao, vo, move_class)
            self._send("loc_update", self.config.control_message_bytes, vo)
        elif move_class is MoveClass.INTER_VO:
            ao = self.topology.ao_of(new.cell)
            vo = self.topology.vo_of(new.cell)
            self.services.on_handover(
                ms_id, move_class, new_cell=new.cell, new_ao=ao, new_vo=vo
            )
            station.busy_until = self.now
            self._send("registration", self.config.control_message_bytes, vo)
            self._try_dispatch_pending()
        else:
            self._depart(ms_id)
            return
        self._schedule(self.now + self.config.step_interval_s, "walk", (ms_id,))

    def _on_churn_scan(self) -> None:
        cfg = self.config
        leave_p = cfg.mobility_factor / 2.0
        self._log("churn_scan")
        in_grid = sorted(
            ms
            for ms, st in self.stations.items()
            if st.in_grid and not st.is_initiator
        )
        for ms_id in in_grid:
            if self._churn_rng.random() < leave_p:
                self._depart(ms_id)
        joins = sum(
            self._churn_rng.random() < leave_p for _ in range(cfg.population)
        )
        for _ in range(joins):
            station = self._spawn_station(self._churn_rng, is_initiator=False)
            self._send(
                "registration",
                cfg.control_message_bytes,
                self.services.rr[station.ms_id].vo,
            )
            if math.isfinite(cfg.step_interval_s):
                self._schedule(
                    self.now + cfg.step_interval_s, "walk", (station.ms_id,)
                )
        if joins:
            self._try_dispatch_pending()
        self._schedule(self.now + cfg.churn_scan_interval_s, "churn_scan")

    # -- main loop -------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.config
        if cfg.duration_s == 0:
            return self._result(0.0)
        if cfg.population == 0 and self.total_jobs:
            raise ConfigError("jobs configured but population is 0")
        self._setup()
        end = 0.0
        handlers = {
            "walk": self._on_walk,
            "churn_scan": self._on_churn_scan,
            "job_arrival": self._on_job_arrival,
            "message": self._on_message,
            "subjob_finish": self._on_subjob_finish,
        }
        while self._heap:
            time, _, kind, payload = heapq.heappop(self._heap)
            if time > cfg.duration_s:
                end = cfg.duration_s
                break
            self.now = end = time
            handlers[kind](*payload)
            self._events_processed += 1
            if self.check_invariants:
                self.services.check_invariants()
                self._check_completed_monotone()
            if self.total_jobs and self.completed_jobs == self.total_jobs:
                break
        return self._result(end)

    def _check_completed_monotone(self) -> None:
        done = {
            sj.subjob_id
            for sj in self.services.jadb.values()
            if sj.status is SubJobStatus.COMPLETED
        }
        if not self._completed_subjobs <= done:
            raise AssertionError("a completed sub job changed status")
        self._completed_subjobs = done

    def _result(self, end: float) -> RunResult:
        return RunResult(
            config=self.config,
            seed=self.seed,
            end_time=end,
            log_lines=self.log_lines,
            services=self.services,
            exec_times=self.exec_times,
            total_jobs=self.total_jobs,
            completed_jobs=self.completed_jobs,
            link_bytes={vo: link.bytes_transferred for vo, link in self.links.items()},
            link_capacity_mbps=self.config.bandwidth_mbps,
        )


def run(
    config: ScenarioConfig, seed: int, check_invariants: bool = False
) -> RunResult:
    """Execute one run to completion and return its raw outcome."""
    return Simulation(config, seed, check_invariants=check_invariants).run()
