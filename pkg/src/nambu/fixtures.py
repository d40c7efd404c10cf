"""Bundled example systems: ``n3.sys``, ``n4.sys``, ``n6.sys``."""

from importlib import resources

from .parser import SystemSpec, parse_system

NAMES = ("n3", "n4", "n6")


def text(name: str) -> str:
    return resources.files("nambu").joinpath("data", f"{name}.sys").read_text(encoding="utf-8")


def path(name: str):
    return resources.files("nambu").joinpath("data", f"{name}.sys")


def load(name: str, **overrides) -> SystemSpec:
    return parse_system(text(name), overrides)
