#!/usr/bin/env python3
"""Validate .xosc files against the OpenSCENARIO 1.0 XSD.

Usage: xsd_validate.py [--schema PATH] FILE...

Prints one line per file ("ok" or the first error) and exits 0 only when
every file is valid.
"""
import argparse
import pathlib
import sys

import xmlschema

DEFAULT_SCHEMA = pathlib.Path(__file__).resolve().parent.parent / "schemas" / "OpenSCENARIO_1_0.xsd"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--schema", default=str(DEFAULT_SCHEMA))
    ap.add_argument("files", nargs="+")
    args = ap.parse_args()
    schema = xmlschema.XMLSchema(args.schema)
    failed = 0
    for f in args.files:
        err = next(schema.iter_errors(f), None)
        if err is None:
            print(f"{f}: ok")
        else:
            failed += 1
            reason = (err.reason or str(err)).splitlines()[0]
            print(f"{f}: invalid: {err.path}: {reason}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
