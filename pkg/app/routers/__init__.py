from . import experiments, sweeps

__all__ = ['experiments', 'sweeps']
