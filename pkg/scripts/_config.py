"""Command-line overrides for dataclass configs."""
import argparse
from dataclasses import fields, replace


def parse_config(default, description):
    p = argparse.ArgumentParser(description=description)
    for f in fields(default):
        value = getattr(default, f.name)
        flag = "--" + f.name.replace("_", "-")
        if isinstance(value, bool):
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=value)
        elif isinstance(value, (list, tuple)):
            kind = type(value[0]) if value else float
            p.add_argument(flag, type=kind, nargs="+", default=list(value))
        else:
            p.add_argument(flag, type=type(value), default=value)
    ns = p.parse_args()
    return replace(default, **{f.name: getattr(ns, f.name) for f in fields(default)})
