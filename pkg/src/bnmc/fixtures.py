"""Bundled example inputs."""

from __future__ import annotations

from importlib import resources

from .bif import parse_bif
from .network import BayesianNetwork, subnetwork
from .psdd import Psdd, parse_psdd


def _data(name: str) -> str:
    return resources.files("bnmc").joinpath("data").joinpath(name).read_text("utf-8")


def student_mood() -> BayesianNetwork:
    """The four-variable student-mood network (Dif, Prep, Grade, Mood)."""
    return parse_bif(_data("student_mood.bif"))


def student_mood_dpg() -> BayesianNetwork:
    """Student-mood restricted to Dif, Prep, Grade (Mood is a sink)."""
    bn = student_mood()
    return subnetwork(bn, [bn.by_name(n).id for n in ("Dif", "Prep", "Grade")])


def student_mood_psdd() -> Psdd:
    """PSDD fixture inducing the same distribution as `student_mood()`."""
    return parse_psdd(_data("student_mood.vtree"), _data("student_mood.psdd"))


def student_mood_texts() -> tuple[str, str]:
    """Raw (vtree, psdd) fixture texts."""
    return _data("student_mood.vtree"), _data("student_mood.psdd")
