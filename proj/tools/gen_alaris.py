#!/usr/bin/env python3
"""Writes models/alaris.emuc: the Alaris GP chevron data-entry rules.

The model language has no floor operation, so the double-chevron rules are
spelled out as one arc per decade band.
"""
import pathlib
import sys


def arc(trigger, guard, value):
    return f"    on -> on : {trigger} [{guard}] {{ display := {value} }}"


def build():
    out = []
    out.append("# Alaris GP numeric data entry (single and double chevrons).")
    out.append("# Generated by tools/gen_alaris.py; edit the script, not this file.")
    out.append("#")
    out.append("# Single chevron: +-0.1 below 100, +-1 from 100 to 1000, +-10 above.")
    out.append("# Double chevron up: next decade below 100; next hundred plus the decade")
    out.append("# from 100 to 1000; next hundred from 1000.")
    out.append("# Down rules mirror the up rules. Values stay within [0, 1200]: at the")
    out.append("# ends the chevrons have no effect.")
    out.append("diagram alaris {")
    out.append("  nodes { off, on }")
    out.append("  initial off")
    out.append("  variables {")
    out.append("    display : real64 = 0.0;")
    out.append("  }")
    out.append("  arcs {")
    out.append("    off -> on : click_on_off")
    out.append("    on -> off : click_on_off")

    up = "click_alaris_up"
    out.append(arc(up, "display < 100", "display + 0.1"))
    out.append(arc(up, "display >= 100 && display < 1000", "display + 1"))
    out.append(arc(up, "display >= 1000 && display <= 1190", "display + 10"))
    out.append(arc(up, "display > 1190 && display < 1200", "1200.0"))

    dn = "click_alaris_dn"
    out.append(arc(dn, "display > 1000", "display - 10"))
    out.append(arc(dn, "display > 100 && display <= 1000", "display - 1"))
    out.append(arc(dn, "display >= 0.1 && display <= 100", "display - 0.1"))
    out.append(arc(dn, "display > 0 && display < 0.1", "0.0"))

    UP = "click_alaris_UP"
    out.append(arc(UP, "display >= 0 && display < 10", "10.0"))
    for k in range(1, 10):
        out.append(arc(UP, f"display >= {10 * k} && display < {10 * k + 10}", f"{10 * k + 10}.0"))
    for j in range(0, 90):
        lo = 100 + 10 * j
        out.append(arc(UP, f"display >= {lo} && display < {lo + 10}", f"{lo + 100}.0"))
    out.append(arc(UP, "display >= 1000 && display < 1100", "1100.0"))
    out.append(arc(UP, "display >= 1100 && display < 1200", "1200.0"))

    DN = "click_alaris_DN"
    out.append(arc(DN, "display > 0 && display <= 10", "0.0"))
    for k in range(1, 10):
        out.append(arc(DN, f"display > {10 * k} && display <= {10 * k + 10}", f"{10 * k}.0"))
    out.append(arc(DN, "display > 100 && display <= 200", "100.0"))
    for j in range(0, 80):
        lo = 200 + 10 * j
        out.append(arc(DN, f"display > {lo} && display <= {lo + 10}", f"{lo - 90}.0"))
    out.append(arc(DN, "display > 1000 && display <= 1100", "1000.0"))
    out.append(arc(DN, "display > 1100 && display <= 1200", "1100.0"))

    out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent
    target = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else root / "models" / "alaris.emuc"
    target.write_text(build())
