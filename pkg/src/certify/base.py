"""Base certificate engine with shared functionality."""
import logging
import json
import threading
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, Iterator, Optional

from config_loader import EngineConfig

logger = logging.getLogger(__name__)


class CertificateEngine:
    """
    Base class with shared functionality for all certificate engines.

    Provides:
    - Engine caps from EngineConfig
    - Timed operations with structured metrics logging
    - Error formatting with context
    """

    def __init__(self, engine_config: Optional[EngineConfig] = None, metrics: bool = True):
        """
        Initialize base engine.

        Args:
            engine_config: Degree caps and resource bounds (defaults when None)
            metrics: Whether METRIC:: lines are emitted
        """
        self.config = engine_config or EngineConfig()
        self.metrics_enabled = metrics
        self.logger = logging.getLogger(self.__class__.__name__)

        # Performance tracking
        self._operation_count = 0
        self._total_time = 0.0
        self._stats_lock = threading.Lock()

    @contextmanager
    def _timed(self, operation: str, **context: Any) -> Iterator[Dict[str, Any]]:
        """
        Time an engine operation and log one metric line when it finishes.

        The yielded dict can be extended with result fields before exit.

        Example:
            with self._timed('cd_lower_bound', hom=hom.describe()) as metric:
                metric['degree'] = k
        """
        metric: Dict[str, Any] = {'operation': operation, **context}
        start_time = time.perf_counter()
        try:
            yield metric
            metric.setdefault('status', 'success')
        except Exception as e:
            metric['status'] = 'error'
            metric['error'] = type(e).__name__
            self.logger.error(self._format_error(e, {'operation': operation, **context}))
            raise
        finally:
            metric['duration_ms'] = (time.perf_counter() - start_time) * 1000
            self._log_metrics(metric)

    def _log_metrics(self, metrics: Dict[str, Any]) -> None:
        """
        Log structured metrics for monitoring.

        Args:
            metrics: Dictionary of metrics to log

        Example:
            self._log_metrics({
                'operation': 'homotopy_annihilate',
                'threshold': 2,
                'duration_ms': 15.5,
                'status': 'feasible'
            })
        """
        # Update internal stats
        if 'operation' in metrics and 'duration_ms' in metrics:
            with self._stats_lock:
                self._operation_count += 1
                self._total_time += metrics['duration_ms']

        if not self.metrics_enabled:
            return

        # Add common metadata
        metrics.update({
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'engine': self.__class__.__name__,
        })

        # Log as structured JSON for easy parsing
        self.logger.info(f"METRIC::{json.dumps(metrics, default=str)}")

    def _format_error(self, error: Exception, context: Dict[str, Any]) -> str:
        """
        Format error messages with context for better debugging.

        Args:
            error: The exception that occurred
            context: Additional context about the operation

        Returns:
            Formatted error message

        Example:
            error_msg = self._format_error(e, {
                'operation': 'bs_power_pullback',
                'hom': 'Z/16 -> Z/4 (t -> s^1)',
                'degree': 3
            })
        """
        context_str = ', '.join(f"{k}={v}" for k, v in context.items())

        # Resource limits carry the offending rank estimate
        limit_details = []
        if hasattr(error, 'rank_estimate'):
            limit_details.append(f"rank_estimate={error.rank_estimate}")
        if hasattr(error, 'limit'):
            limit_details.append(f"limit={error.limit}")
        limit_str = ', '.join(limit_details)

        parts = [
            f"Error: {str(error)}",
            f"Context: {context_str}" if context_str else None,
            f"Resources: {limit_str}" if limit_str else None,
        ]

        return ' | '.join(filter(None, parts))

    def get_engine_stats(self) -> Dict[str, Any]:
        """
        Get performance statistics for this engine.

        Returns:
            Dictionary with operation count and average time
        """
        avg_time = (self._total_time / self._operation_count) if self._operation_count > 0 else 0

        return {
            'engine': self.__class__.__name__,
            'operation_count': self._operation_count,
            'total_time_ms': self._total_time,
            'average_time_ms': avg_time
        }
