"""System description documents that accompany a submission."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from ..errors import FormatError

TASKS = ("SAD", "SD", "SID", "ASR", "SENTIMENT")

SECTIONS = {
    "task": "Task",
    "abstract": "Abstract",
    "data_resources": "Data resources",
    "algorithm": "Detailed description of algorithm",
    "hardware": "Hardware requirements",
}

HARDWARE_FIELDS = {
    "cpu_cores": "Total number of CPU cores used",
    "cpu_model": "Description of CPUs used",
    "gpu_count": "Total number of GPUs used",
    "gpu_model": "Description of used GPUs",
    "ram": "Total available RAM",
    "disk": "Used disk storage",
    "frameworks": "Machine learning frameworks used",
    "runtime_per_30min_file": "System execution times to process a single 30 minute File",
}
_INT_FIELDS = {"cpu_cores", "gpu_count"}


@dataclass(frozen=True)
class Hardware:
    cpu_cores: int
    cpu_model: str
    gpu_count: int
    gpu_model: str
    ram: str
    disk: str
    frameworks: str
    runtime_per_30min_file: str


@dataclass(frozen=True)
class SystemDescription:
    task: str
    abstract: str
    data_resources: str
    algorithm: str
    hardware: Hardware

    def to_dict(self) -> dict:
        return asdict(self)


def validate_description(doc: dict, *, source=None) -> SystemDescription:
    """Check every section and hardware field; collect all problems at once."""
    problems = []
    if not isinstance(doc, dict):
        raise FormatError("system description must be a JSON object", source=source)
    for key, title in SECTIONS.items():
        value = doc.get(key)
        if key == "hardware":
            if not isinstance(value, dict):
                problems.append(f"missing section {title!r}")
            continue
        if not isinstance(value, str) or not value.strip():
            problems.append(f"missing section {title!r}")
    task = doc.get("task")
    if isinstance(task, str) and task.strip() and task.upper() not in TASKS:
        problems.append(f"section 'Task': {task!r} is not one of {list(TASKS)}")

    hw = doc.get("hardware")
    if isinstance(hw, dict):
        for key, title in HARDWARE_FIELDS.items():
            value = hw.get(key)
            if key in _INT_FIELDS:
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    problems.append(f"'Hardware requirements' field {title!r} must be a "
                                    "non-negative integer")
                elif key == "cpu_cores" and value == 0:
                    problems.append(f"'Hardware requirements' field {title!r} must be at least 1")
            elif not isinstance(value, str) or not value.strip():
                problems.append(f"missing 'Hardware requirements' field {title!r}")
    if problems:
        raise FormatError("; ".join(problems), source=source, field="description")
    return SystemDescription(
        task=doc["task"].upper(),
        abstract=doc["abstract"],
        data_resources=doc["data_resources"],
        algorithm=doc["algorithm"],
        hardware=Hardware(**{k: hw[k] for k in HARDWARE_FIELDS}),
    )


def parse_description(text, *, source=None) -> SystemDescription:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", source=source, line=exc.lineno) from None
    return validate_description(doc, source=source)


def serialize_description(desc: SystemDescription) -> str:
    return json.dumps(desc.to_dict(), indent=2, ensure_ascii=False) + "\n"
