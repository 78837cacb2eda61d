"""submod-swarm：分布式子模最大化规划器、基准感知问题与通信仿真"""

__version__ = "0.1.0"
