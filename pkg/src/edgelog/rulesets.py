"""The three packaged rule sets: RS1 (wind-farm anomalies), RS2 and RS3 (synthetic)."""

from importlib import resources

from .parser import parse_rules

RULE_SETS = ("rs1", "rs2", "rs3")


def rule_set_text(name: str) -> str:
    name = name.lower()
    if name not in RULE_SETS:
        raise KeyError(f"unknown rule set {name!r}; choose from {', '.join(RULE_SETS)}")
    return resources.files("edgelog").joinpath("data", f"{name}.dl").read_text(encoding="utf-8")


def load_rule_set(name: str) -> list:
    return parse_rules(rule_set_text(name), source=f"{name}.dl")
