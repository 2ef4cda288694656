"""
감사 서비스
정책 분할의 IC / 약속 이행 / 마팅게일 조건 점검
"""
import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from app.models.policy import PolicyStep
from app.models.problem import Problem
from app.models.results import AuditReport, AuditViolation
from app.services.simulation_service import SimulationService
from app.solver.base_policy import DisclosurePolicy

logger = logging.getLogger(__name__)


class AuditService:
    """
    정책 감사

    한 기간 분할마다 다음을 확인한다.
    - simplex: 분기 확률이 음이 아니고 합이 1
    - martingale: Σλ_s p_s = p
    - state: 모든 (p_s, w_s) ∈ 𝒲
    - ic: (1-δ)u(a_s, p_s) + δw_s ≥ m(p_s)
    - promise: Σλ_s[(1-δ)u(a_s, p_s) + δw_s] ≥ w
    - target_count: a*를 추천하는 분기는 많아야 하나
    - indifference (선택): a* 분기에서 IC 가 등호
    """

    def __init__(self, problem: Problem, policy: DisclosurePolicy, check_indifference: bool = False):
        self.problem = problem
        self.policy = policy
        self.env = policy.env
        self.delta = problem.discount
        self.check_indifference = check_indifference

    def _violation(self, step: PolicyStep, kind: str, magnitude: Fraction, detail: str = None) -> AuditViolation:
        return AuditViolation(p=step.p, w=step.w, kind=kind, magnitude=abs(magnitude), detail=detail)

    # ============================================================
    # 한 기간 점검
    # ============================================================

    def check_step(self, step: PolicyStep) -> List[AuditViolation]:
        """분할 하나의 위반 목록 (없으면 빈 리스트)"""
        env = self.env
        violations: List[AuditViolation] = []

        if any(o.prob < 0 for o in step.outcomes) or step.total_prob() != 1:
            violations.append(self._violation(step, "simplex", step.total_prob() - 1))

        drift = step.mean_posterior() - step.p
        if drift != 0:
            violations.append(self._violation(step, "martingale", drift))

        promised = Fraction(0)
        for o in step.outcomes:
            if not env.in_W(o.posterior, o.promised_w):
                violations.append(self._violation(
                    step, "state", o.promised_w - env.eval(o.posterior),
                    detail=f"({o.posterior}, {o.promised_w}) ∉ 𝒲",
                ))
                continue
            continuation = self.policy.continuation(o)
            slack = continuation - env.eval(o.posterior)
            if slack < 0:
                violations.append(self._violation(step, "ic", slack, detail=f"action={o.action}"))
            elif self.check_indifference and o.action == env.target and not step.absorbed and slack != 0:
                violations.append(self._violation(step, "indifference", slack))
            promised += o.prob * continuation

        if promised < step.w:
            violations.append(self._violation(step, "promise", promised - step.w))

        if len(step.target_outcomes(env.target)) > 1:
            violations.append(self._violation(
                step, "target_count", Fraction(len(step.target_outcomes(env.target)) - 1)
            ))
        return violations

    # ============================================================
    # 트리 감사
    # ============================================================

    def audit_ic(self, depth: int, prior: Optional[Fraction] = None) -> AuditReport:
        """
        도달 가능 트리 전체의 IC / 약속 이행 감사

        Args:
            depth: 펼칠 깊이
            prior: 시작 믿음 (기본 p₀)
        """
        tree = SimulationService(self.problem, self.policy).reachable_tree(depth, prior)
        violations: List[AuditViolation] = []
        for node in tree:
            violations.extend(v for v in self.check_step(node.step) if v.kind != "martingale")
        if violations:
            worst = max(violations, key=lambda v: v.magnitude)
            logger.warning(f"IC 감사 실패: {len(violations)}건, 최악 {worst.kind} {float(worst.magnitude):.3e}")
        else:
            logger.info(f"IC 감사 통과: 노드 {len(tree)}개")
        return AuditReport(
            kind="ic",
            nodes=len(tree),
            passed=not violations,
            violations=violations,
            details={"policy": self.policy.name, "depth": depth},
        )

    def audit_martingale_tree(self, depth: int, prior: Optional[Fraction] = None) -> AuditReport:
        """트리 모드: 모든 노드에서 Σλ_s p_s = p 를 정확히 확인"""
        tree = SimulationService(self.problem, self.policy).reachable_tree(depth, prior)
        violations: List[AuditViolation] = []
        for node in tree:
            drift = node.step.mean_posterior() - node.p
            if drift != 0:
                violations.append(self._violation(node.step, "martingale", drift))
        return AuditReport(
            kind="martingale-tree",
            nodes=len(tree),
            passed=not violations,
            violations=violations,
            details={"policy": self.policy.name, "depth": depth},
        )

    # ============================================================
    # 경로 감사
    # ============================================================

    def audit_martingale_paths(self, beliefs: np.ndarray, prior: Optional[Fraction] = None,
                               z: float = 3.0) -> AuditReport:
        """
        경로 모드: 기간별 표본 평균 믿음이 p₀ 의 z 표준오차 안인지

        Args:
            beliefs: (경로 수, 기간 수) 믿음 행렬
            prior: 기준 믿음 (기본 p₀)
            z: 허용 표준오차 배수
        """
        p0 = self.problem.prior if prior is None else Fraction(prior)
        n, periods = beliefs.shape
        means = beliefs.mean(axis=0)
        stderrs = beliefs.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(periods)
        violations: List[AuditViolation] = []
        for t in range(periods):
            gap = abs(float(means[t]) - float(p0))
            if gap > max(z * float(stderrs[t]), 1e-12):
                violations.append(AuditViolation(
                    p=p0,
                    w=Fraction(0),
                    kind="martingale",
                    magnitude=Fraction(gap).limit_denominator(10 ** 12),
                    detail=f"period {t + 1}: mean={means[t]:.6f}, stderr={stderrs[t]:.2e}",
                ))
        return AuditReport(
            kind="martingale-paths",
            nodes=n,
            passed=not violations,
            violations=violations,
            details={
                "policy": self.policy.name,
                "means": [float(x) for x in means],
                "stderrs": [float(x) for x in stderrs],
            },
        )


def get_audit_service(problem: Problem, policy: DisclosurePolicy,
                      check_indifference: bool = False) -> AuditService:
    """AuditService 생성"""
    return AuditService(problem, policy, check_indifference)
