from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from swarm.exceptions import InvalidArgumentError, InvalidProblemError


@dataclass(frozen=True, order=True)
class GroundElement:
    """地面集元素：某个智能体的某个动作

    比较与哈希只看 (agent_id, action_id)，payload_ref 只是指向场景数据的句柄
    （动作中心坐标、两步动作序列等）。
    """
    agent_id: int
    action_id: int
    payload_ref: Any = field(default=None, compare=False, hash=False, repr=False)

    @property
    def key(self) -> Tuple[int, int]:
        return self.agent_id, self.action_id


@dataclass(frozen=True)
class Selection:
    """有序元素集合，迭代顺序即决策顺序"""
    elements: Tuple[GroundElement, ...] = ()

    def __post_init__(self):
        keys = [e.key for e in self.elements]
        if len(set(keys)) != len(keys):
            raise InvalidArgumentError("selection contains a duplicate element")

    @classmethod
    def of(cls, elements: Iterable[GroundElement]) -> 'Selection':
        return cls(tuple(elements))

    def __iter__(self) -> Iterator[GroundElement]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, item: object) -> bool:
        return item in self.elements

    def __getitem__(self, index):
        return self.elements[index]

    def add(self, element: GroundElement) -> 'Selection':
        """返回追加一个元素后的新选择"""
        if element in self.elements:
            raise InvalidArgumentError(f"element {element.key} already present")
        return Selection(self.elements + (element,))

    def union(self, other: Iterable[GroundElement]) -> 'Selection':
        """按顺序合并，已存在的元素跳过"""
        merged = list(self.elements)
        for element in other:
            if element not in merged:
                merged.append(element)
        return Selection(tuple(merged))

    def prefix(self, length: int) -> 'Selection':
        return Selection(self.elements[:length])

    def agents(self) -> List[int]:
        return [e.agent_id for e in self.elements]

    def by_agent(self) -> Dict[int, GroundElement]:
        return {e.agent_id: e for e in self.elements}

    def restrict_to(self, agents: Iterable[int]) -> 'Selection':
        """保留指定智能体的决策，顺序不变"""
        keep = set(agents)
        return Selection(tuple(e for e in self.elements if e.agent_id in keep))

    def keys(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(e.key for e in self.elements)


@dataclass(frozen=True)
class SimplePartitionMatroid:
    """简单划分拟阵：每个智能体一个动作块，每块至多选一个元素

    Attributes:
        blocks: 每个智能体的动作数 |B_i|
        payloads: 可选的元素负载，payloads[i][a] 挂到 GroundElement.payload_ref
    """
    blocks: Tuple[int, ...]
    payloads: Optional[Tuple[Tuple[Any, ...], ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'blocks', tuple(int(b) for b in self.blocks))
        if not self.blocks:
            raise InvalidProblemError("matroid needs at least one agent")
        empty = [i for i, size in enumerate(self.blocks) if size < 1]
        if empty:
            raise InvalidProblemError(f"empty action block for agents {empty}")
        if self.payloads is not None and [len(p) for p in self.payloads] != list(self.blocks):
            raise InvalidProblemError("payloads do not match block sizes")

    @property
    def n_agents(self) -> int:
        return len(self.blocks)

    def element(self, agent_id: int, action_id: int) -> GroundElement:
        self.check_element(agent_id, action_id)
        payload = self.payloads[agent_id][action_id] if self.payloads is not None else None
        return GroundElement(agent_id, action_id, payload)

    def block(self, agent_id: int) -> List[GroundElement]:
        """智能体 agent_id 的全部候选元素，按 action_id 升序"""
        return [self.element(agent_id, a) for a in range(self.blocks[agent_id])]

    def check_element(self, agent_id: int, action_id: int) -> None:
        if not 0 <= agent_id < self.n_agents:
            raise InvalidArgumentError(f"agent id {agent_id} out of range [0, {self.n_agents})")
        if not 0 <= action_id < self.blocks[agent_id]:
            raise InvalidArgumentError(
                f"action id {action_id} out of range for agent {agent_id} (block size {self.blocks[agent_id]})")

    def n_bases(self) -> int:
        size = 1
        for b in self.blocks:
            size *= b
        return size
