import csv
import json
import math
import os
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.errors import InputError
from core.scene import Scene


def format_float(x: float) -> str:
    """17 significant digits, so equal doubles always print the same"""
    return format(float(x), '.17g')


def _to_json(value, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_to_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_to_json(v, indent + 1) for v in value) + "]"
    if isinstance(value, (bool, np.bool_)) or value is None:
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value) if math.isfinite(value) else "null"
    return json.dumps(str(value))


class DataManager:
    """Handles data input/output operations"""

    def __init__(self, input_dir: str = os.path.join("data", "input"), output_dir: str = os.path.join("data", "output")):
        self.input_dir = input_dir
        self.output_dir = output_dir

    def new_run_directory(self, out: Optional[str] = None) -> str:
        """The given directory, or the next free numbered directory under output_dir"""
        if out is None:
            os.makedirs(self.output_dir, exist_ok=True)
            taken = (int(f) for f in os.listdir(self.output_dir)
                     if f.isdigit() and os.path.isdir(os.path.join(self.output_dir, f)))
            out = os.path.join(self.output_dir, str(max(taken, default=0) + 1))
        os.makedirs(out, exist_ok=True)
        return out

    def save_scene(self, scene: Scene, filename: str) -> str:
        """Save scene to a JSON file in the input directory"""
        os.makedirs(self.input_dir, exist_ok=True)
        filepath = os.path.join(self.input_dir, filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(scene.to_dict(), f, indent=2)
        print(f"Scene saved to {filepath}")
        return filepath

    def load_scene(self, path: str) -> Scene:
        """Load a scene by path, or by file name inside the input directory"""
        filepath = path if os.path.exists(path) else os.path.join(self.input_dir, path)
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError as exc:
            raise InputError(f"scene file {path!r} not found") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"scene file {filepath!r} is not valid JSON: {exc}") from exc
        return Scene.from_dict(data)

    def list_input_files(self) -> List[str]:
        """List all JSON files in input directory"""
        if not os.path.isdir(self.input_dir):
            return []
        return sorted(f for f in os.listdir(self.input_dir) if f.endswith('.json'))

    def write_polyline(self, points: np.ndarray, filepath: str):
        """One 'x y z' line per sample"""
        with open(filepath, 'w', encoding='utf-8') as f:
            for p in np.atleast_2d(points):
                f.write(" ".join(format_float(c) for c in p) + "\n")

    def write_summary(self, record: Dict, filepath: str):
        """Summary record as JSON with fixed float formatting"""
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(_to_json(record) + "\n")

    def write_error(self, kind: str, message: str, filepath: str, diagnostics: Sequence[Dict] = ()):
        """Machine-readable failure record"""
        self.write_summary({"error": kind, "message": message, "diagnostics": list(diagnostics)}, filepath)

    def write_table(self, columns: Sequence[str], rows: Sequence[Dict], filepath: str):
        """Comma-separated table; floats at 17 significant digits, missing values empty"""
        with open(filepath, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([self._cell(row.get(c)) for c in columns])

    @staticmethod
    def _cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value)).lower()
        if isinstance(value, (float, np.floating)):
            return format_float(value) if math.isfinite(value) else ""
        return str(value)

    def print_solve_to_console(self, summary: Dict):
        """Print a solve or projection summary"""
        print("\n" + "=" * 60)
        print("DISTANCE SUMMARY")
        print("=" * 60)
        for key in ("mode", "length", "energy", "grad_norm", "iterations", "trim_rounds", "candidate_index"):
            if key in summary:
                print(f"  {key}: {summary[key]}")
        lengths = summary.get("candidate_lengths") or []
        for i, value in enumerate(lengths):
            print(f"    candidate {i}: {'failed' if value is None else f'{value:.12g}'}")
        angles = summary.get("angles")
        if angles:
            shown = ", ".join("-" if a is None else f"{a:.6f}" for a in angles)
            print(f"  endpoint angles (deg): {shown}")
        if "foot" in summary:
            print(f"  foot point: ({summary['foot'][0]:.12g}, {summary['foot'][1]:.12g})")
        for flag in ("saddle", "degenerate"):
            if summary.get(flag):
                print(f"  warning: {flag}")
        print("=" * 60)

    def print_table_to_console(self, columns: Sequence[str], rows: Sequence[Dict]):
        """Print a convergence table"""
        print("\n" + "  ".join(f"{c:>16}" for c in columns))
        for row in rows:
            cells = []
            for c in columns:
                value = row.get(c)
                if isinstance(value, float):
                    cells.append(f"{value:>16.9e}" if math.isfinite(value) else f"{'-':>16}")
                else:
                    cells.append(f"{'-' if value is None else str(value):>16}")
            print("  ".join(cells))

    def print_oracle_to_console(self, summary: Dict):
        """Print brute-force and geodesic-like results side by side"""
        print("\n" + "=" * 60)
        print("ORACLE COMPARISON")
        print("=" * 60)
        print(f"  brute force ({summary['m']} x {summary['n']}): length {summary['oracle_length']:.12g}, "
              f"pair ({summary['i']}, {summary['j']}), skipped {summary['skipped']}, "
              f"{summary['oracle_time']:.3f}s")
        print(f"  geodesic-like: length {summary['solve_length']:.12g}, {summary['solve_time']:.3f}s")
        print("=" * 60)
