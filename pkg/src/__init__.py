"""FEM updating benchmark: fish school search, particle swarm and genetic optimizers"""

__version__ = "1.0.0"

from . import config
from . import exceptions
from . import models
from . import storage

__all__ = ['config', 'exceptions', 'models', 'storage']
