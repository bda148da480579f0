import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import matplotlib.patches as patches  # noqa: E402

from core.boundary import BoundaryCurve  # noqa: E402
from core.problem import SolveReport  # noqa: E402
from core.surface import Surface  # noqa: E402


class Visualizer:
    """Parameter-domain and convergence plots, written as SVG"""

    def __init__(self, samples: int = 256):
        self.samples = samples

    def _draw_boundary(self, ax, boundary: BoundaryCurve, color: str, label: Optional[str], alpha: float = 1.0):
        if boundary.is_point:
            ax.plot(*boundary.point, 'o', color=color, markersize=7, alpha=alpha, label=label)
        else:
            uv = boundary.sample(self.samples)
            ax.plot(uv[:, 0], uv[:, 1], '-', color=color, linewidth=1.5, alpha=alpha, label=label)

    def _draw_domain(self, ax, surface: Surface):
        u0, u1, v0, v1 = surface.domain()
        if not all(math.isfinite(b) for b in (u0, u1, v0, v1)):
            return
        du, dv = (p or 0.0 for p in surface.periods())
        shifts = {(i * du, j * dv) for i in (-1, 0, 1) for j in (-1, 0, 1)
                  if (i == 0 or du) and (j == 0 or dv)}
        for su, sv in sorted(shifts):
            base = (su, sv) == (0.0, 0.0)
            ax.add_patch(patches.Rectangle((u0 + su, v0 + sv), u1 - u0, v1 - v0, fill=False,
                                           linestyle='-' if base else ':', color='gray', alpha=0.8 if base else 0.3))

    def plot_parameter_domain(self, surface: Surface, c1: BoundaryCurve, c2: BoundaryCurve,
                              report: SolveReport, filename: str, title: str = "") -> int:
        """Domain, boundaries, every periodic candidate and the winner; returns the candidate count drawn"""
        fig, ax = plt.subplots(1, 1, figsize=(10, 8))
        self._draw_domain(ax, surface)

        self._draw_boundary(ax, c1, 'tab:green', 'c1')
        self._draw_boundary(ax, c2, 'tab:red', 'c2')

        drawn = 0
        for index, curve in enumerate(report.candidate_curves):
            if curve is None:
                continue
            uv = curve.sample(self.samples)
            ax.plot(uv[:, 0], uv[:, 1], '--', color='tab:blue', linewidth=1.0, alpha=0.6,
                    label='candidates' if drawn == 0 else None)
            ax.annotate(str(index), uv[len(uv) // 2], xytext=(4, 4), textcoords='offset points', fontsize=8)
            drawn += 1

        if report.problem is not None and report.problem.shift != (0.0, 0.0):
            self._draw_boundary(ax, report.problem.c1, 'tab:green', 'c1 (shifted copy)', alpha=0.4)

        uv = report.curve.sample(self.samples)
        ax.plot(uv[:, 0], uv[:, 1], '-', color='black', linewidth=2.0, label='winner')

        info_text = f"length: {report.length:.10g}\ncandidate: {report.candidate_index}\norder: {report.order}"
        ax.text(0.02, 0.98, info_text, transform=ax.transAxes, verticalalignment='top',
                bbox=dict(boxstyle='round', facecolor='wheat', alpha=0.8), fontsize=10)

        ax.set_xlabel('u')
        ax.set_ylabel('v')
        ax.grid(True, alpha=0.3)
        ax.legend(loc='lower right')
        ax.set_aspect('equal', adjustable='datalim')
        ax.set_title(title or 'Geodesic-like curve (uv-plane)')

        fig.tight_layout()
        self.save_plot(fig, filename)
        return drawn

    def plot_convergence(self, orders: Sequence[int], errors: Sequence[Optional[float]], filename: str,
                         title: str = ""):
        """|error percent| against order on a log scale; missing or zero errors are left out"""
        pairs = [(k, abs(e)) for k, e in zip(orders, errors) if e is not None and math.isfinite(e) and e != 0.0]
        fig, ax = plt.subplots(1, 1, figsize=(8, 5))
        if pairs:
            ks, es = zip(*pairs)
            ax.semilogy(ks, es, 'o-', color='tab:blue')
        else:
            ax.text(0.5, 0.5, 'all errors are zero', transform=ax.transAxes, ha='center')
        ax.set_xlabel('order (control points)')
        ax.set_ylabel('|error| (%)')
        ax.grid(True, which='both', alpha=0.3)
        ax.set_title(title or 'Length error against order')
        fig.tight_layout()
        self.save_plot(fig, filename)

    def save_plot(self, fig, filename: str):
        """Save figure as SVG and release it"""
        fig.savefig(filename, format='svg', bbox_inches='tight', metadata={'Date': None})
        plt.close(fig)
