"""
시뮬레이션 서비스
정확한 경로 실현, 도달 가능 상태 트리, 몬테카를로 할인 보수 추정
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.config.config import get_settings
from app.core.exceptions import HorizonTooSmall
from app.models.policy import Absorption, PolicyStep
from app.models.problem import Problem
from app.models.results import MonteCarloSummary, PeriodRecord, Trajectory
from app.solver.base_policy import DisclosurePolicy

logger = logging.getLogger(__name__)

State = Tuple[Fraction, Fraction]

_BATCH_SIZE = 8192


def branch_probabilities(step: PolicyStep, omega: int) -> List[Fraction]:
    """상태 ω 조건부 신호 확률: ω₁ 이면 λp_s/p, ω₀ 이면 λ(1-p_s)/(1-p)"""
    p = step.p
    if omega == 1:
        return [o.prob * o.posterior / p if p != 0 else Fraction(0) for o in step.outcomes]
    return [o.prob * (1 - o.posterior) / (1 - p) if p != 1 else Fraction(0) for o in step.outcomes]


def absorption_tag(p: Fraction) -> Absorption:
    if p == 0:
        return Absorption.DEGENERATE_0
    if p == 1:
        return Absorption.DEGENERATE_1
    return Absorption.P_ABSORBED


@dataclass
class TreeNode:
    """도달 가능 상태 트리의 노드 (같은 깊이의 같은 상태는 합침)"""

    depth: int
    p: Fraction
    w: Fraction
    prob: Fraction
    step: PolicyStep


@dataclass
class _Node:
    """몬테카를로용 노드 (부동소수 배열)"""

    absorbed: bool
    cum0: np.ndarray        # ω₀ 조건부 누적 확률
    cum1: np.ndarray
    child_states: List[State]
    principal: np.ndarray   # (분기, ω) 실현 주체 흐름
    agent: np.ndarray
    p: float
    tag: Optional[str] = None
    child_ids: Optional[np.ndarray] = None


class SimulationService:
    """
    정책 하의 경로 시뮬레이션

    - run_trajectory: 정확 유리수 경로 하나
    - reachable_tree: 깊이 d 까지의 상태 트리
    - tree_bracket: 트리 기대 할인 보수의 하한/상한
    - monte_carlo: 벡터화된 경로 표본 평균
    """

    def __init__(self, problem: Problem, policy: DisclosurePolicy, threads: Optional[int] = None):
        self.problem = problem
        self.policy = policy
        self.delta = problem.discount
        self.threads = threads or get_settings().THREADS

        pays = [abs(x) for pay in problem.agent_payoff.values() for x in pay]
        pays += [abs(x) for x in problem.principal_payoff]
        self.max_payoff = max(pays)

        self._nodes: List[_Node] = []
        self._node_ids: Dict[State, int] = {}
        self._lock = threading.Lock()

    # ============================================================
    # 정확 경로
    # ============================================================

    def run_trajectory(
            self,
            horizon: int,
            seed: int,
            omega: Optional[int] = None,
            prior: Optional[Fraction] = None,
            t_delta: Optional[int] = None
    ) -> Trajectory:
        """
        경로 하나 실현

        Args:
            horizon: 최대 기간 수
            seed: 난수 시드
            omega: 실제 상태 (None 이면 사전 믿음에서 추출)
            prior: 시작 믿음 (기본 p₀)
            t_delta: 유한 학습 시간 (horizon 이 이보다 커야 함)

        absorbed_at 은 신호로 믿음이 흡수 상태에 들어간 기간이다 (처음부터 흡수 상태면 1).

        Raises:
            HorizonTooSmall: horizon ≤ T_δ
        """
        if horizon < 1:
            raise HorizonTooSmall(f"horizon 은 1 이상이어야 합니다: {horizon}")
        if t_delta is not None and horizon <= t_delta:
            raise HorizonTooSmall(f"horizon={horizon} 가 T_δ={t_delta} 이하입니다", horizon=horizon)

        rng = np.random.Generator(np.random.Philox(seed))
        p0 = self.problem.prior if prior is None else Fraction(prior)
        if omega is None:
            omega = int(rng.random() < float(p0))

        d = self.delta
        p, w = self.policy.initial_state(p0)
        records: List[PeriodRecord] = []
        principal_total = Fraction(0)
        agent_total = Fraction(0)
        absorption = Absorption.HORIZON
        absorbed_at: Optional[int] = None

        for t in range(1, horizon + 1):
            step = self.policy.step(p, w)
            probs = branch_probabilities(step, omega)
            if step.absorbed:
                s = 0
            else:
                s = int(rng.choice(len(probs), p=np.array([float(x) for x in probs])))
            outcome = step.outcomes[s]
            v = self.problem.v_state(outcome.action, omega)
            u = self.problem.u_state(outcome.action, omega)
            records.append(PeriodRecord(
                period=t,
                belief_before=p,
                promised_before=w,
                signal=s,
                belief_after=outcome.posterior,
                promised_w=outcome.promised_w,
                action=outcome.action,
                principal_flow=v,
                agent_flow=u,
            ))
            weight = d ** (t - 1)
            if step.absorbed:
                # 이후 모든 기간 같은 흐름
                principal_total += weight * v
                agent_total += weight * u
                absorption = absorption_tag(p)
                absorbed_at = max(t - 1, 1)
                break
            principal_total += (1 - d) * weight * v
            agent_total += (1 - d) * weight * u
            p, w = outcome.posterior, outcome.promised_w
        else:
            # 마지막 기간의 신호로 흡수 상태에 들어간 경로는 꼬리가 정확히 알려져 있다
            last = self.policy.step(p, w)
            if last.absorbed:
                action = last.outcomes[0].action
                principal_total += d ** horizon * self.problem.v_state(action, omega)
                agent_total += d ** horizon * self.problem.u_state(action, omega)
                absorption = absorption_tag(p)
                absorbed_at = horizon

        tail = Fraction(0)
        warning = None
        if absorption == Absorption.HORIZON:
            tail = d ** horizon * self.max_payoff
            warning = f"{horizon} 기간 안에 흡수되지 않음 (꼬리 상한 {float(tail):.3e})"
            logger.warning(warning)
        return Trajectory(
            omega=omega,
            records=records,
            principal_total=principal_total,
            agent_total=agent_total,
            absorption=absorption,
            absorbed_at=absorbed_at,
            tail_bound=tail,
            warning=warning,
        )

    # ============================================================
    # 도달 가능 상태 트리
    # ============================================================

    def reachable_tree(self, depth: int, prior: Optional[Fraction] = None) -> List[TreeNode]:
        """
        깊이 0..depth-1 의 도달 가능 상태 (ω 혼합 확률)

        흡수 상태는 더 펼치지 않는다.
        """
        p0 = self.problem.prior if prior is None else Fraction(prior)
        frontier: Dict[State, Fraction] = {self.policy.initial_state(p0): Fraction(1)}
        nodes: List[TreeNode] = []
        for level in range(depth):
            nxt: Dict[State, Fraction] = {}
            for (p, w), prob in frontier.items():
                step = self.policy.step(p, w)
                nodes.append(TreeNode(depth=level, p=p, w=w, prob=prob, step=step))
                if step.absorbed:
                    continue
                for o in step.outcomes:
                    key = (o.posterior, o.promised_w)
                    nxt[key] = nxt.get(key, Fraction(0)) + prob * o.prob
            frontier = nxt
            if not frontier:
                break
        logger.debug(f"도달 가능 트리: 깊이 {depth}, 노드 {len(nodes)}개")
        return nodes

    def tree_bracket(self, depth: int, prior: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
        """
        기대 할인 주체 보수의 [하한, 상한]

        깊이 d 까지의 정확한 기대 흐름에 남은 확률 질량 × δ^d × max v 를 더해 상한을 만든다.
        """
        d = self.delta
        v_max = max(self.problem.principal_payoff)
        expected = Fraction(0)
        open_mass = Fraction(0)
        for node in self.reachable_tree(depth, prior):
            weight = d ** node.depth
            flow = sum(
                (o.prob * self.problem.v(o.action, o.posterior) for o in node.step.outcomes),
                Fraction(0),
            )
            if node.step.absorbed:
                expected += node.prob * weight * flow
            else:
                expected += node.prob * (1 - d) * weight * flow
                if node.depth == depth - 1:
                    open_mass += node.prob
        upper = expected + open_mass * d ** depth * v_max
        return expected, upper

    # ============================================================
    # 몬테카를로
    # ============================================================

    def _node(self, state: State) -> int:
        with self._lock:
            if state in self._node_ids:
                return self._node_ids[state]

        step = self.policy.step(*state)
        prob0 = np.array([float(x) for x in branch_probabilities(step, 0)])
        prob1 = np.array([float(x) for x in branch_probabilities(step, 1)])
        principal = np.array([
            [float(self.problem.v_state(o.action, 0)), float(self.problem.v_state(o.action, 1))]
            for o in step.outcomes
        ])
        agent = np.array([
            [float(self.problem.u_state(o.action, 0)), float(self.problem.u_state(o.action, 1))]
            for o in step.outcomes
        ])
        children_states = [(o.posterior, o.promised_w) for o in step.outcomes]

        with self._lock:
            if state in self._node_ids:
                return self._node_ids[state]
            node_id = len(self._nodes)
            self._node_ids[state] = node_id
            self._nodes.append(_Node(
                absorbed=step.absorbed,
                cum0=np.cumsum(prob0),
                cum1=np.cumsum(prob1),
                child_states=children_states,
                principal=principal,
                agent=agent,
                p=float(state[0]),
                tag=absorption_tag(state[0]).value if step.absorbed else None,
            ))
        return node_id

    def _children(self, node_id: int) -> np.ndarray:
        """분기별 자식 노드 번호 (처음 요청 시 한 번 등록)"""
        node = self._nodes[node_id]
        if node.child_ids is None:
            node.child_ids = np.array([self._node(state) for state in node.child_states], dtype=int)
        return node.child_ids

    def _run_batch(self, n: int, horizon: int, seed_seq: np.random.SeedSequence,
                   root: int, p0: float, check_periods: int) -> Dict[str, np.ndarray]:
        rng = np.random.Generator(np.random.Philox(seed_seq))
        d = float(self.delta)
        omega = (rng.random(n) < p0).astype(int)
        node = np.full(n, root, dtype=int)
        alive = np.ones(n, dtype=bool)
        principal = np.zeros(n)
        agent = np.zeros(n)
        absorbed_at = np.zeros(n, dtype=int)
        tag = np.full(n, Absorption.HORIZON.value, dtype=object)
        beliefs = np.full((n, check_periods), p0)

        def absorb(mask: np.ndarray, info: _Node, weight: float, period: int) -> None:
            om = omega[mask]
            principal[mask] += weight * info.principal[0, om]
            agent[mask] += weight * info.agent[0, om]
            alive[mask] = False
            absorbed_at[mask] = period
            tag[mask] = info.tag

        for t in range(1, horizon + 1):
            if not alive.any():
                break
            weight = d ** (t - 1)
            uniforms = rng.random(n)
            # 한 기간에 경로당 한 번만 전이: 이동은 복사본에 기록
            moved = node.copy()
            for node_id in np.unique(node[alive]):
                info = self._nodes[node_id]
                mask = alive & (node == node_id)
                if info.absorbed:
                    absorb(mask, info, weight, max(t - 1, 1))
                    continue
                om = omega[mask]
                cum = np.where(om[:, None] == 1, info.cum1[None, :], info.cum0[None, :])
                branch = (uniforms[mask][:, None] > cum).sum(axis=1)
                branch = np.minimum(branch, cum.shape[1] - 1)
                principal[mask] += (1 - d) * weight * info.principal[branch, om]
                agent[mask] += (1 - d) * weight * info.agent[branch, om]
                moved[mask] = self._children(node_id)[branch]
            node = moved
            if t <= check_periods:
                beliefs[:, t - 1] = [self._nodes[k].p for k in node]

        # 마지막 기간의 신호로 흡수된 경로
        for node_id in np.unique(node[alive]):
            info = self._nodes[node_id]
            if info.absorbed:
                absorb(alive & (node == node_id), info, d ** horizon, horizon)
        return {
            "omega": omega,
            "principal": principal,
            "agent": agent,
            "absorbed_at": absorbed_at,
            "absorption": tag,
            "beliefs": beliefs,
        }

    def monte_carlo(
            self,
            n_paths: int,
            horizon: int,
            seed: int,
            check_periods: int = 5
    ) -> Tuple[MonteCarloSummary, pd.DataFrame, np.ndarray]:
        """
        할인 보수의 표본 평균과 표준오차

        Returns:
            (요약, 경로별 DataFrame, 기간별 믿음 행렬)
        """
        p0 = self.problem.prior
        root = self._node(self.policy.initial_state(p0))
        check_periods = max(1, min(check_periods, horizon))

        sizes = [min(_BATCH_SIZE, n_paths - start) for start in range(0, n_paths, _BATCH_SIZE)]
        children = np.random.SeedSequence(seed).spawn(len(sizes))
        # 노드 등록이 배치 간에 공유되므로 배치 결과는 스레드 순서와 무관
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            batches = list(pool.map(
                lambda args: self._run_batch(args[0], horizon, args[1], root, float(p0), check_periods),
                zip(sizes, children),
            ))

        merged = {key: np.concatenate([b[key] for b in batches]) for key in batches[0]}
        principal, agent = merged["principal"], merged["agent"]
        n = principal.size
        stderr = (lambda x: float(x.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0)

        counts = pd.Series(merged["absorption"]).value_counts().to_dict()
        absorbed = merged["absorbed_at"][merged["absorbed_at"] > 0]
        tail = float(self.delta) ** horizon * float(self.max_payoff)

        summary = MonteCarloSummary(
            policy=self.policy.name,
            n_paths=n,
            horizon=horizon,
            seed=seed,
            principal_mean=float(principal.mean()),
            principal_stderr=stderr(principal),
            agent_mean=float(agent.mean()),
            agent_stderr=stderr(agent),
            absorption_counts={str(k): int(v) for k, v in counts.items()},
            max_absorption_period=int(absorbed.max()) if absorbed.size else None,
            tail_bound=tail,
        )
        frame = pd.DataFrame({
            "path": np.arange(n),
            "omega": merged["omega"],
            "principal": principal,
            "agent": agent,
            "absorption": merged["absorption"],
            "absorbed_at": merged["absorbed_at"],
        })
        logger.info(
            f"몬테카를로 ({self.policy.name}): 주체 {summary.principal_mean:.6f}±{summary.principal_stderr:.2e}, "
            f"대리인 {summary.agent_mean:.6f}±{summary.agent_stderr:.2e}, 노드 {len(self._nodes)}개"
        )
        return summary, frame, merged["beliefs"]


def get_simulation_service(problem: Problem, policy: DisclosurePolicy) -> SimulationService:
    """SimulationService 생성"""
    return SimulationService(problem, policy)
