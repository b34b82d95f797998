#!/usr/bin/env python3
"""Regenerate src/example.ts from a trained model bundle.

Starts the prediction service on a free port, reads one row out of a CSV,
and freezes the schema, the row, and the service's exact answer for it.
Going through HTTP keeps the frozen values bit-identical to what the form
will see at runtime.

Usage:
    python3 scripts/generate-example.py --bundle run/model_bundle.json \
        --rows data.csv --row-index 72
"""

import argparse
import csv
import json
import pathlib
import socket
import subprocess
import sys
import time
import urllib.error
import urllib.request

HEADER = """\
/**
 * Frozen demo fixture: the feature schema, one example inventory row, and
 * the service's exact prediction for it.  Generated by
 * scripts/generate-example.py; regenerate after retraining, do not edit.
 */

import type { PredictResponse, SchemaResponse } from "./types.js";
"""


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_for_health(base: str, deadline: float) -> None:
    while time.monotonic() < deadline:
        try:
            with urllib.request.urlopen(base + "/health", timeout=1) as response:
                if json.load(response).get("status") == "ok":
                    return
        except (urllib.error.URLError, ConnectionError):
            time.sleep(0.1)
    raise SystemExit("service did not come up in time")


def get_json(url: str, payload: dict | None = None) -> dict:
    data = None if payload is None else json.dumps(payload).encode()
    request = urllib.request.Request(url, data=data, headers={"content-type": "application/json"})
    with urllib.request.urlopen(request, timeout=5) as response:
        return json.load(response)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bundle", required=True, help="model_bundle.json to serve")
    parser.add_argument("--rows", required=True, help="CSV with feature columns")
    parser.add_argument("--row-index", type=int, default=0, help="0-based data row to freeze")
    parser.add_argument("--out", default=None, help="output path (default src/example.ts)")
    args = parser.parse_args()

    out = pathlib.Path(args.out) if args.out else pathlib.Path(__file__).parent.parent / "src" / "example.ts"

    with open(args.rows, newline="") as handle:
        rows = list(csv.DictReader(handle))
    row = rows[args.row_index]

    port = free_port()
    base = f"http://127.0.0.1:{port}"
    server = subprocess.Popen(
        ["imbapipe", "serve", "--bundle", args.bundle, "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        wait_for_health(base, time.monotonic() + 20)
        schema = get_json(base + "/api/schema")
        features = {name: float(row[name]) for name in schema["features"]}
        prediction = get_json(base + "/api/predict", {"features": features})
    finally:
        server.terminate()
        server.wait(timeout=10)

    body = [
        HEADER,
        "export const EXAMPLE_SCHEMA: SchemaResponse = " + json.dumps(schema, indent=2) + ";",
        "",
        "export const EXAMPLE_ROW: Record<string, number> = " + json.dumps(features, indent=2) + ";",
        "",
        "export const EXAMPLE_PREDICTION: PredictResponse = " + json.dumps(prediction, indent=2) + ";",
    ]
    out.write_text("\n".join(body) + "\n")
    print(f"wrote {out}: {len(features)} features, {prediction['label']} ({prediction['score']})")


if __name__ == "__main__":
    main()
