"""Service layer for problem construction and benchmarking"""

from .problem_service import problem_service
from .benchmark_service import benchmark_service

__all__ = ['problem_service', 'benchmark_service']
