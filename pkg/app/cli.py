"""
명령행 인터페이스
solve / trace / compare / verify / simulate
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from pydantic import ValidationError

from app.baselines import BaselineComparison, get_policy
from app.config.config import get_settings
from app.core.exceptions import HorizonTooSmall, PersuasionError, UsageError
from app.core.logging_config import setup_logging
from app.core.scalar import format_scalar, interval_str, to_decimal, to_scalar
from app.models.base import jsonable
from app.models.run_config import RunConfig
from app.services import AuditService, ReportService, SimulationService
from app.solver import PersuasionSolver, compare_with_exact, load_problem, report_belief, report_interval

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 3


# ============================================================
# 인자 파싱
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="oldtown",
        description="이진 상태 반복 설득 문제의 최적 공개 정책 계산/검증/시뮬레이션",
    )
    parser.add_argument("--problem", required=True, help="문제 JSON 파일")
    parser.add_argument("--format", dest="output_format", choices=["text", "json", "csv"], default="text")
    parser.add_argument("--digits", type=int, default=settings.DEFAULT_DIGITS, help="십진 표기 자릿수 (1~50)")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--threads", type=int, default=settings.THREADS)
    parser.add_argument("--log-level", default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", help="임계값, q*, 최적값, T_δ")

    trace = sub.add_parser("trace", help="사다리 / 포락선 꺾임점 / 가치 곡선 CSV")
    trace.add_argument("--ladder", action="store_true")
    trace.add_argument("--envelope", action="store_true")
    trace.add_argument("--values", action="store_true")

    sub.add_parser("compare", help="기준 정책 비교표")

    verify = sub.add_parser("verify", help="최적성 조건 검증 (CI 용 종료 코드)")
    verify.add_argument("--q", default=None, help="검증할 절단점 (기본 q*)")
    verify.add_argument("--grid-p", type=int, default=settings.VERIFY_GRID_P)
    verify.add_argument("--grid-w", type=int, default=settings.VERIFY_GRID_W)
    verify.add_argument("--oracle", action="store_true", help="격자 가치 반복과 비교")
    verify.add_argument("--oracle-np", type=int, default=settings.ORACLE_NP)
    verify.add_argument("--oracle-nw", type=int, default=settings.ORACLE_NW)
    verify.add_argument("--dump-grid", default=None, help="격자 고정점 CSV 경로")

    simulate = sub.add_parser("simulate", help="경로 시뮬레이션")
    simulate.add_argument("--policy", choices=["optimal", "kg", "random", "delayed"], default="optimal")
    simulate.add_argument("--paths", type=int, default=settings.DEFAULT_PATHS)
    simulate.add_argument("--horizon", type=int, default=settings.DEFAULT_HORIZON)
    simulate.add_argument("--tree-depth", type=int, default=None)
    simulate.add_argument("--out-csv", default=None)
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """argparse 결과 → RunConfig (범위 오류는 UsageError)"""
    fields = {
        "command": args.command,
        "problem_path": args.problem,
        "output_format": args.output_format,
        "digits": args.digits,
        "seed": args.seed,
        "threads": args.threads,
    }
    optional = (
        "grid_p", "grid_w", "oracle", "oracle_np", "oracle_nw", "dump_grid", "q",
        "ladder", "envelope", "values",
        "policy", "paths", "horizon", "tree_depth", "out_csv",
    )
    for name in optional:
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    try:
        return RunConfig(**fields)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(x) for x in first.get("loc", ()))
        raise UsageError(f"잘못된 인자 {loc}: {first.get('msg')}")


# ============================================================
# 출력 도우미
# ============================================================

def _scalar_text(x: Optional[Fraction], digits: int) -> str:
    if x is None:
        return "-"
    return f"{format_scalar(x)} ({to_decimal(x, digits)})"


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload: dict) -> None:
    _emit(json.dumps(jsonable(payload), ensure_ascii=False, indent=2))


# ============================================================
# 명령
# ============================================================

def cmd_solve(cfg: RunConfig) -> int:
    solver = PersuasionSolver(load_problem(cfg.problem_path))
    result = solver.solve()
    problem = solver.problem

    if cfg.output_format == "json":
        payload = result.model_dump(mode="json")
        payload["original_labels"] = {
            "prior": report_belief(problem, result.prior),
            "q1": report_interval(problem, result.q1),
            "q_star": report_belief(problem, result.q_star),
            "static_interval": report_interval(problem, result.static_interval),
        }
        payload["decimal"] = {
            "value": to_decimal(result.value, cfg.digits),
            "agent_value": to_decimal(result.agent_value, cfg.digits),
        }
        _emit_json(payload)
        return EXIT_OK

    lines = []
    if result.notice:
        lines.append(f"notice      : {result.notice}")
    if result.relabeled:
        lines.append("relabeled   : yes (beliefs below are P(ω₁) in the normalized labels)")
    lines += [
        f"prior       : {_scalar_text(result.prior, cfg.digits)}",
        f"Q1          : {interval_str(result.q1)}",
        f"q1_lower    : {_scalar_text(result.q1[0] if result.q1 else None, cfg.digits)}",
        f"q1_upper    : {_scalar_text(result.q1[1] if result.q1 else None, cfg.digits)}",
        f"Q_inf       : {interval_str(result.q_inf)}",
        f"P           : {interval_str(result.static_interval)}",
        f"k_star      : {result.k_star if result.k_star is not None else '-'}",
        f"q_star      : {_scalar_text(result.q_star, cfg.digits)}",
        f"value       : {_scalar_text(result.value, cfg.digits)}",
        f"agent_value : {_scalar_text(result.agent_value, cfg.digits)}",
        f"T_delta     : {result.t_delta if result.t_delta is not None else 'inf'}",
    ]
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_trace(cfg: RunConfig) -> int:
    solver = PersuasionSolver(load_problem(cfg.problem_path))
    reports = ReportService(cfg.digits)
    show_all = not (cfg.ladder or cfg.envelope or cfg.values)

    sections = []
    if cfg.envelope or show_all:
        sections.append(("envelope", reports.kink_frame(solver.env)))
    if (cfg.ladder or show_all) and solver.ladder is not None:
        sections.append(("ladder", reports.ladder_frame(solver.ladder)))
    if (cfg.values or show_all) and solver.solvable:
        points = [Fraction(i, 20) for i in range(21)]
        sections.append(("values", reports.value_curve_frame(solver.value_function().curve(points))))

    for name, frame in sections:
        if len(sections) > 1:
            _emit(f"# {name}")
        _emit(reports.write_csv(frame))
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    comparison = BaselineComparison(load_problem(cfg.problem_path))
    results = comparison.compare()
    frame = comparison.to_frame(results, cfg.digits)

    if cfg.output_format == "json":
        _emit_json({
            "results": [r.model_dump(mode="json") for r in results],
            "ordering": comparison.check_ordering(results),
            "skipped": comparison.errors,
        })
    elif cfg.output_format == "csv":
        _emit(ReportService(cfg.digits).write_csv(frame))
    else:
        _emit(frame.to_string(index=False))
        for name, message in comparison.errors.items():
            _emit(f"{name}: {message}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    solver = PersuasionSolver(load_problem(cfg.problem_path))
    q = to_scalar(cfg.q, "q") if cfg.q is not None else None
    report = solver.verify(q, cfg.grid_p, cfg.grid_w)
    passed = report.passed

    comparison = None
    if cfg.oracle:
        exact = solver.value(solver.problem.prior, q=q)
        comparison, grid = compare_with_exact(
            solver.problem, solver.env, exact, n_p=cfg.oracle_np, n_w=cfg.oracle_nw,
        )
        passed = passed and comparison.within_budget
        if cfg.dump_grid:
            reports = ReportService(cfg.digits)
            reports.write_csv(reports.grid_frame(grid), cfg.dump_grid)

    if cfg.output_format == "json":
        payload = {"passed": passed, "verification": report.model_dump(mode="json")}
        if comparison is not None:
            payload["oracle"] = comparison.model_dump(mode="json")
        _emit_json(payload)
    else:
        lines = [f"q = {_scalar_text(report.q, cfg.digits)} (grid {report.grid_p}x{report.grid_w})"]
        if report.error:
            lines.append(f"error: {report.error}")
        for check in report.checks:
            status = "ok" if check.passed else "FAILED"
            lines.append(
                f"{check.name:<14} {status:<6} checked={check.checked} violations={check.violations}"
                + (f" worst={float(check.worst_violation):.3e} at {check.location}" if check.violations else "")
            )
        if comparison is not None:
            lines.append(
                f"oracle         {'ok' if comparison.within_budget else 'FAILED':<6} "
                f"grid={comparison.grid_value:.6f} exact={to_decimal(comparison.exact_value, cfg.digits)} "
                f"gap={comparison.gap:.3e} refined_gap={comparison.refined_gap}"
            )
        lines.append("verified" if passed else "verification failed")
        _emit("\n".join(lines))

    if not passed:
        logger.error("검증 실패")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    solver = PersuasionSolver(load_problem(cfg.problem_path))
    policy = get_policy(cfg.policy, solver)
    service = SimulationService(solver.problem, policy, threads=cfg.threads)
    reports = ReportService(cfg.digits)

    if cfg.tree_depth is not None:
        nodes = service.reachable_tree(cfg.tree_depth)
        text = reports.write_csv(reports.tree_frame(nodes), cfg.out_csv)
        if cfg.out_csv is None:
            _emit(text)
        return EXIT_OK

    if cfg.policy == "optimal":
        t_delta = solver.t_delta(solver.problem.prior)
        if t_delta is not None and cfg.horizon <= t_delta:
            raise HorizonTooSmall(
                f"horizon={cfg.horizon} 가 T_δ={t_delta} 이하입니다", horizon=cfg.horizon
            )

    summary, frame, beliefs = service.monte_carlo(cfg.paths, cfg.horizon, cfg.seed)
    martingale = AuditService(solver.problem, policy).audit_martingale_paths(beliefs)

    if cfg.out_csv is not None:
        reports.write_csv(frame, cfg.out_csv)
    if cfg.output_format == "csv" and cfg.out_csv is None:
        _emit(reports.write_csv(frame))
        return EXIT_OK

    payload = summary.model_dump(mode="json")
    payload["martingale_check"] = martingale.passed
    _emit_json(payload)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "trace": cmd_trace,
    "compare": cmd_compare,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    CLI 진입점

    Returns:
        종료 코드 (0 성공, 1 입력/파싱, 2 검증, 3 검증 실패/계산 오류)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse 사용법 오류
        return 1 if e.code else 0

    setup_logging(args.log_level)
    try:
        cfg = to_run_config(args)
        return COMMANDS[cfg.command](cfg)
    except PersuasionError as e:
        logger.error(f"{e.code}: {e.message}")
        sys.stderr.write(json.dumps(e.to_dict(), ensure_ascii=False) + "\n")
        return e.exit_code


def run(args: Optional[List[str]] = None) -> None:
    sys.exit(main(args))


if __name__ == "__main__":
    run()
