"""Parsing and replay of the tab-separated run log.

Each line is `time<TAB>seq<TAB>kind<TAB>key=value...`. Replaying the
broker-level lines through a fresh :class:`GridServices` must reproduce
the final RR/JADB/BSMS state of the run that wrote the log.
"""

from __future__ import annotations

from dataclasses import dataclass

from mobigrid.broker import GridServices, Job
from mobigrid.hexgrid import HexCoord, MoveClass


@dataclass(frozen=True)
class LogLine:
    time: float
    seq: int
    kind: str
    fields: dict[str, str]


def parse_line(line: str) -> LogLine:
    parts = line.rstrip("\n").split("\t")
    if len(parts) < 3:
        raise ValueError(f"malformed log line: {line!r}")
    fields = {}
    for part in parts[3:]:
        key, _, value = part.partition("=")
        fields[key] = value
    return LogLine(float(parts[0]), int(parts[1]), parts[2], fields)


def parse_log(text: str) -> list[LogLine]:
    return [parse_line(line) for line in text.splitlines() if line]


def replay(lines: list[LogLine]) -> GridServices:
    """Re-drive the broker state machines from a parsed log."""
    services = GridServices()
    for line in lines:
        f = line.fields
        if line.kind == "register":
            services.register_station(
                int(f["ms"]),
                float(f["cpu"]),
                HexCoord.parse(f["cell"]),
                int(f["ao"]),
                int(f["vo"]),
            )
        elif line.kind == "job_submit":
            services.submit_job(
                Job(
                    job_id=int(f["job"]),
                    initiator=int(f["initiator"]),
                    total_work=int(f["work"]),
                    subjob_count=int(f["subjobs"]),
                    dispatch_payload_bytes=int(f["dbytes"]),
                    result_payload_bytes=int(f["rbytes"]),
                )
            )
        elif line.kind == "dispatch":
            services.dispatch(int(f["subjob"]), int(f["ms"]))
        elif line.kind == "exec_start":
            services.begin_execution(int(f["subjob"]), int(f["ms"]))
        elif line.kind == "complete":
            services.complete_subjob(int(f["ms"]), int(f["subjob"]), f["result"])
        elif line.kind == "loc_update":
            services.on_location_update(
                int(f["ms"]),
                HexCoord.parse(f["cell"]),
                int(f["ao"]),
                int(f["vo"]),
                MoveClass(f["cls"]),
            )
        elif line.kind == "handover":
            move_class = MoveClass(f["cls"])
            if move_class is MoveClass.INTER_VO:
                services.on_handover(
                    int(f["ms"]),
                    move_class,
                    new_cell=HexCoord.parse(f["cell"]),
                    new_ao=int(f["ao"]),
                    new_vo=int(f["vo"]),
                )
            else:
                services.on_handover(int(f["ms"]), move_class)
        # walk/msg/abort/drop/churn/job_complete lines are informational
    return services


def replay_text(text: str) -> GridServices:
    return replay(parse_log(text))
