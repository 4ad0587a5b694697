# SPDX-License-Identifier: Apache-2.0
"""Minimal stand-in for the guest executor, speaking the sandbox/1 stdio
protocol. Each request runs in a fresh interpreter process.

Test hooks: a source containing '#!crash-runner' makes the runner exit,
'#!hang-runner' makes it stop answering."""
import importlib.util
import json
import os
import subprocess
import sys
import tempfile
import time

CANDIDATES = ["z3", "networkx", "sympy", "numpy"]


def main():
    libs = [name for name in CANDIDATES if importlib.util.find_spec(name) is not None]
    print(json.dumps({"protocol": "sandbox/1", "libs": libs}), flush=True)
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            rid, source, timeout_ms = req["id"], req["source"], int(req["timeout_ms"])
            cap = int(req.get("limits", {}).get("max_stdout_bytes", 65536))
        except (ValueError, KeyError, TypeError) as exc:
            print(json.dumps({"id": None, "exit_status": "protocol_error", "stdout": "", "stderr": str(exc),
                              "duration_ms": 0}), flush=True)
            continue
        if "#!crash-runner" in source:
            os._exit(3)
        if "#!hang-runner" in source:
            time.sleep(3600)
        t0 = time.monotonic()
        with tempfile.TemporaryDirectory() as scratch:
            try:
                proc = subprocess.run([sys.executable, "-c", source], cwd=scratch, capture_output=True,
                                      timeout=timeout_ms / 1000.0, text=True)
                status = "ok" if proc.returncode == 0 else "nonzero"
                out, err = proc.stdout, proc.stderr
            except subprocess.TimeoutExpired:
                status, out, err = "timeout", "", "timed out"
        if len(out.encode()) > cap:
            out = out.encode()[:cap].decode(errors="ignore") + "\n[stdout truncated]\n"
        print(json.dumps({"id": rid, "exit_status": status, "stdout": out, "stderr": err,
                          "duration_ms": int((time.monotonic() - t0) * 1000)}), flush=True)


if __name__ == "__main__":
    main()
