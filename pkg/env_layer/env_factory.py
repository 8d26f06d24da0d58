"""
环境工厂模块
按名称注册与构造基准 CMDP
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from cmdp_layer import Cmdp
from utils.exceptions import ValidationError
from .benchmark_envs import constrained_catch, paradoxical_cmdp, random_cmdp

logger = logging.getLogger(__name__)


@dataclass
class EnvSpec:
    """环境名称与构造参数"""
    name: str
    parameters: Dict[str, Any] = field(default_factory=dict)

    def build(self) -> Cmdp:
        return make_env(self.name, **self.parameters)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'parameters': dict(self.parameters)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EnvSpec':
        if 'name' not in data:
            raise ValidationError("环境配置缺少 name 字段")
        return cls(name=data['name'], parameters=dict(data.get('parameters', {})))


class EnvFactory:
    """环境注册表"""

    def __init__(self):
        self.builders: Dict[str, Callable[..., Cmdp]] = {}
        self.defaults: Dict[str, Dict[str, Any]] = {}

    def register_env(self, name: str, builder: Callable[..., Cmdp], **defaults):
        self.builders[name] = builder
        self.defaults[name] = defaults
        logger.debug(f"注册环境: {name}")

    def make_env(self, name: str, **params) -> Cmdp:
        if name not in self.builders:
            raise ValidationError(f"未知环境 {name}，可选: {self.list_envs()}")
        kwargs = {**self.defaults[name], **params}
        try:
            cmdp = self.builders[name](**kwargs)
        except TypeError as e:
            raise ValidationError(f"环境 {name} 的参数无效: {e}")
        logger.info(f"构造环境 {name}: {cmdp.n_states} 个状态, {cmdp.n_actions} 个动作, "
                    f"{cmdp.n_constraints} 个约束")
        return cmdp

    def list_envs(self) -> List[str]:
        return list(self.builders.keys())


def create_default_factory() -> EnvFactory:
    factory = EnvFactory()
    factory.register_env('paradox', paradoxical_cmdp)
    factory.register_env('catch', constrained_catch)
    factory.register_env('random', random_cmdp, seed=0, n_states=5, n_actions=3, n_constraints=1)
    return factory


_default_factory = None


def get_env_factory() -> EnvFactory:
    """获取默认环境工厂"""
    global _default_factory
    if _default_factory is None:
        _default_factory = create_default_factory()
    return _default_factory


def make_env(name: str, **params) -> Cmdp:
    return get_env_factory().make_env(name, **params)


def list_envs() -> List[str]:
    return get_env_factory().list_envs()
