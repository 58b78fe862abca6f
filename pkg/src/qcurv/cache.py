"""Text cache of heat-trace partial sums keyed by (operator, j_max).

Each record is one line ``t_hex value_hex`` under a header naming the
format version, operator label and truncation, so that a cache hit
returns the bit-identical float that was computed.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

VERSION = 1


class PartialSumCache:
    def __init__(self, root):
        self.root = Path(root)
        self._mem = {}

    def _file(self, label, j_max):
        h = hashlib.sha256(f"{label}|{j_max}".encode()).hexdigest()[:16]
        return self.root / f"v{VERSION}-{h}.txt"

    def _load(self, label, j_max):
        key = (label, j_max)
        if key in self._mem:
            return self._mem[key]
        table = {}
        path = self._file(label, j_max)
        if path.exists():
            lines = path.read_text().splitlines()
            if lines and lines[0] == self._header(label, j_max):
                for line in lines[1:]:
                    t, v = line.split()
                    table[t] = float.fromhex(v)
        self._mem[key] = table
        return table

    @staticmethod
    def _header(label, j_max):
        return f"# qcurv-cache v{VERSION} {label} j_max={j_max}"

    def get(self, label, j_max, t):
        return self._load(label, j_max).get(float(t).hex())

    def put(self, label, j_max, t, value):
        table = self._load(label, j_max)
        table[float(t).hex()] = float(value)

    def flush(self):
        self.root.mkdir(parents=True, exist_ok=True)
        for (label, j_max), table in self._mem.items():
            path = self._file(label, j_max)
            body = [self._header(label, j_max)]
            body += [f"{t} {v.hex()}" for t, v in sorted(table.items(), key=lambda kv: float.fromhex(kv[0]))]
            tmp = path.with_suffix(f".{os.getpid()}.tmp")
            tmp.write_text("\n".join(body) + "\n")
            tmp.replace(path)


__all__ = ["PartialSumCache", "VERSION"]
