import argparse
import logging
import os.path
import time
from typing import Dict, List, Optional, Sequence

from core.boundary import BoundaryCurve
from core.brute_force import BruteForceSolver
from core.catalog import AnalyticSurface, analytic_distance
from core.energy import Mode, error_percent, geodesic_residual
from core.errors import (ContractError, ConvergenceError, DegenerateTangentError, GeodesicError, InputError,
                         SingularityError)
from core.geodesic import DEFAULT_SCHEDULE, GeodesicLikeSolver, endpoint_orthogonality, refine_order
from core.problem import DEFAULT_DEGREE, DEFAULT_ORDER, ProblemSpec, SolveReport, SolverConfig
from data.data_generator import SceneGenerator
from data.data_manager import DataManager
from data.visualizer import Visualizer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_TRIM = 4

CONFIG_FLAGS = ("grad_tol", "step_tol", "max_iters", "armijo_slope", "backtrack_ratio",
                "max_backtracks", "trim_max_rounds", "fd_hessian_step")
CONVERGE_COLUMNS = ("order", "length", "error_percent", "iterations", "residual", "converged", "failure")


def parse_pair(text: str) -> List[float]:
    """'u,v' -> [u, v]"""
    try:
        u, v = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected 'u,v', got {text!r}") from exc
    return [u, v]


def parse_orders(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated orders, got {text!r}") from exc


class Runner:
    """Main runner class for the application"""

    def __init__(self, data_manager: Optional[DataManager] = None):
        self.data_generator = SceneGenerator()
        self.data_manager = data_manager or DataManager()
        self.visualizer = Visualizer()
        self.solvers = {
            'geodesic': GeodesicLikeSolver,
            'brute_force': BruteForceSolver,
        }
        self.commands = {
            'solve': self.cmd_solve,
            'project': self.cmd_project,
            'converge': self.cmd_converge,
            'oracle': self.cmd_oracle,
            'generate': self.cmd_generate,
        }
        self.output: Optional[str] = None

    def build_config(self, args) -> SolverConfig:
        try:
            return SolverConfig().with_overrides(**{name: getattr(args, name, None) for name in CONFIG_FLAGS})
        except ContractError as exc:
            raise InputError(str(exc)) from exc

    def build_problem(self, surface, c1: BoundaryCurve, c2: BoundaryCurve, order: int, degree: int) -> ProblemSpec:
        try:
            return ProblemSpec.between(surface, c1, c2, order, degree)
        except ContractError as exc:
            raise InputError(f"cannot set up the problem: {exc}") from exc

    def load_problem(self, args) -> ProblemSpec:
        scene = self.data_manager.load_scene(args.scene)
        c1, c2 = scene.curve(args.source), scene.curve(args.target)
        return self.build_problem(scene.surface, c1, c2, args.order, args.degree)

    @staticmethod
    def angles(report: SolveReport):
        if report.degenerate:
            return [None, None]
        try:
            return list(endpoint_orthogonality(report))
        except DegenerateTangentError as exc:
            logger.warning("endpoint angles unavailable: %s", exc)
            return [None, None]

    def summarize(self, report: SolveReport) -> Dict:
        """Summary record of a distance solve"""
        problem = report.problem
        summary = {"mode": problem.mode.value if problem is not None else None,
                   "swapped": problem.swapped if problem is not None else False}
        summary.update(report.to_dict())
        summary["angles"] = self.angles(report)
        return summary

    def write_solve_artifacts(self, solver: GeodesicLikeSolver, summary: Dict):
        report, problem = solver.report, solver.problem
        self.data_manager.write_polyline(solver.polyline(256), os.path.join(self.output, "geodesic.xyz"))
        self.visualizer.plot_parameter_domain(problem.surface, problem.c1, problem.c2, report,
                                              os.path.join(self.output, "parameter_domain.svg"))
        self.data_manager.write_summary(summary, os.path.join(self.output, "summary.json"))

    def cmd_solve(self, args) -> int:
        problem = self.load_problem(args)
        cfg = self.build_config(args)
        self.output = self.data_manager.new_run_directory(args.out)

        solver = self.solvers['geodesic'](problem, cfg)
        start_time = time.perf_counter()
        report = solver.solve()
        print(f"  Completed in {time.perf_counter() - start_time:.3f}s")

        summary = self.summarize(report)
        self.write_solve_artifacts(solver, summary)
        self.data_manager.print_solve_to_console(summary)
        print(f"Artifacts written to {self.output}")
        return EXIT_OK

    def cmd_project(self, args) -> int:
        scene = self.data_manager.load_scene(args.scene)
        target = scene.curve(args.onto)
        if target.is_point:
            raise InputError(f"projection target {args.onto!r} must be a curve")
        point = BoundaryCurve.at(*parse_pair(args.point))
        problem = self.build_problem(scene.surface, point, target, args.order, args.degree)
        cfg = self.build_config(args)
        self.output = self.data_manager.new_run_directory(args.out)

        solver = self.solvers['geodesic'](problem, cfg)
        report = solver.solve()
        summary = self.summarize(report)
        summary["foot"] = [float(x) for x in problem.c2.evaluate(report.dof.t)]
        self.write_solve_artifacts(solver, summary)
        self.data_manager.print_solve_to_console(summary)
        return EXIT_OK

    @staticmethod
    def reference_length(problem: ProblemSpec, reports: Sequence[SolveReport], given: Optional[float]) -> Optional[float]:
        """--reference, else a closed-form distance, else the last converged order"""
        if given is not None:
            return given
        if problem.mode is Mode.TWO_POINTS and isinstance(problem.surface, AnalyticSurface):
            exact = analytic_distance(problem.surface, problem.c1.point, problem.c2.point)
            if exact is not None:
                return exact
        converged = [r for r in reports if r.converged]
        return converged[-1].length if converged else None

    @staticmethod
    def residual(problem: ProblemSpec, report: SolveReport) -> Optional[float]:
        if not report.converged or report.degenerate:
            return None
        try:
            return geodesic_residual(problem.surface, report.curve)
        except SingularityError as exc:
            logger.warning("order %d: residual unavailable: %s", report.order, exc)
            return None

    def cmd_converge(self, args) -> int:
        problem = self.load_problem(args)
        cfg = self.build_config(args)
        orders = parse_orders(args.orders)
        if not orders or min(orders) < 3:
            raise InputError(f"orders must be at least 3, got {orders}")
        self.output = self.data_manager.new_run_directory(args.out)

        try:
            reports = refine_order(problem, cfg, orders)
        except ContractError as exc:
            raise InputError(str(exc)) from exc
        reference = self.reference_length(problem, reports, args.reference)

        rows = []
        for order, report in zip(orders, reports):
            error = None
            if report.converged and reference:
                error = error_percent(report.length, reference)
            rows.append({"order": order, "length": report.length if report.converged else None,
                         "error_percent": error, "iterations": report.iterations,
                         "residual": self.residual(problem, report), "converged": report.converged,
                         "failure": report.failure})

        self.data_manager.write_table(CONVERGE_COLUMNS, rows, os.path.join(self.output, "convergence.csv"))
        self.visualizer.plot_convergence(orders, [r["error_percent"] for r in rows],
                                         os.path.join(self.output, "convergence.svg"))
        self.data_manager.print_table_to_console(CONVERGE_COLUMNS, rows)
        print(f"Reference length: {reference}")

        if not any(r.converged for r in reports):
            raise ConvergenceError("no order of the schedule converged",
                                   [r.diagnostics() for r in reports])
        return EXIT_OK

    def cmd_oracle(self, args) -> int:
        problem = self.load_problem(args)
        cfg = self.build_config(args)
        if args.m < 1 or args.n < 1:
            raise InputError(f"m and n must be positive, got {args.m}, {args.n}")
        self.output = self.data_manager.new_run_directory(args.out)

        oracle = self.solvers['brute_force'](problem, cfg, args.m, args.n)
        start_time = time.perf_counter()
        oracle.solve()
        oracle_time = time.perf_counter() - start_time

        solver = self.solvers['geodesic'](problem, cfg)
        start_time = time.perf_counter()
        solver.solve()
        solve_time = time.perf_counter() - start_time

        result = oracle.result
        summary = {"m": args.m, "n": args.n, "oracle_length": result.length, "i": result.i, "j": result.j,
                   "skipped": result.skipped, "oracle_time": oracle_time,
                   "solve_length": solver.report.length, "solve_time": solve_time}
        self.data_manager.write_summary(summary, os.path.join(self.output, "oracle.json"))
        self.data_manager.print_oracle_to_console(summary)
        return EXIT_OK

    def cmd_generate(self, args) -> int:
        self.data_manager.input_dir = args.dir
        for name, scene in self.data_generator.generate_all().items():
            self.data_manager.save_scene(scene, f"{name}.json")
        return EXIT_OK

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(description='Geodesic-like distances on parametric surfaces')
        parser.add_argument('-v', '--verbose', action='store_true', help='Log every Newton iteration')
        commands = parser.add_subparsers(dest='command', required=True)

        config = argparse.ArgumentParser(add_help=False)
        config.add_argument('--order', type=int, default=DEFAULT_ORDER, help='Control points of the curve')
        config.add_argument('--degree', type=int, default=DEFAULT_DEGREE, help='Degree of the curve')
        config.add_argument('--out', default=None, help='Output directory (default: next data/output/<n>)')
        for name in CONFIG_FLAGS:
            kind = int if name.startswith(("max_", "trim_")) else float
            config.add_argument('--' + name.replace('_', '-'), dest=name, type=kind, default=None)

        pair = argparse.ArgumentParser(add_help=False)
        pair.add_argument('scene', help='Scene file (path or name in data/input)')
        pair.add_argument('--from', dest='source', required=True, help='Curve name for c1')
        pair.add_argument('--to', dest='target', required=True, help='Curve name for c2')

        commands.add_parser('solve', parents=[pair, config], help='Distance between two named curves')

        project = commands.add_parser('project', parents=[config], help='Project a point onto a curve')
        project.add_argument('scene')
        project.add_argument('--point', required=True, help='u,v')
        project.add_argument('--onto', required=True, help='Curve name')

        converge = commands.add_parser('converge', parents=[pair, config], help='Length against order')
        converge.add_argument('--orders', default=",".join(str(k) for k in DEFAULT_SCHEDULE))
        converge.add_argument('--reference', type=float, default=None, help='Reference length')

        oracle = commands.add_parser('oracle', parents=[pair, config], help='Brute-force distance')
        oracle.add_argument('-m', type=int, default=16, help='Samples on c1')
        oracle.add_argument('-n', type=int, default=16, help='Samples on c2')

        generate = commands.add_parser('generate', help='Write the fixture scenes')
        generate.add_argument('--dir', default=self.data_manager.input_dir)
        return parser

    def main(self, argv: Optional[Sequence[str]] = None) -> int:
        """Main entry point; returns the exit status"""
        args = self.build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        try:
            return self.commands[args.command](args)
        except InputError as exc:
            return self.fail(EXIT_INPUT, "input", exc)
        except ConvergenceError as exc:
            code = EXIT_TRIM if exc.trim_failure else EXIT_NUMERICAL
            return self.fail(code, "trim" if code == EXIT_TRIM else "numerical", exc, exc.diagnostics)
        except GeodesicError as exc:
            return self.fail(EXIT_NUMERICAL, "numerical", exc)

    def fail(self, code: int, kind: str, exc: Exception, diagnostics: Sequence[Dict] = ()) -> int:
        logger.error("%s error: %s", kind, exc)
        if self.output is not None:
            self.data_manager.write_error(kind, str(exc), os.path.join(self.output, "error.json"), diagnostics)
        return code
