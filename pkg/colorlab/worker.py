# colorlab/worker.py
"""
Celery configuration for batch experiments
With no broker configured the app runs tasks eagerly in-process, so a
batch needs no Redis unless a broker_url is set in the experiment config.
"""
from typing import Optional

from loguru import logger

try:
    from celery import Celery
    CELERY_AVAILABLE = True
except ImportError:
    Celery = None
    CELERY_AVAILABLE = False


def create_app(broker_url: Optional[str] = None):
    """
    Build the colorlab Celery app

    Args:
        broker_url: Broker and result backend URL (e.g. redis://localhost:6379/0);
            None runs every task eagerly

    Returns:
        Celery app, or None when celery is not installed
    """
    if not CELERY_AVAILABLE:
        logger.warning("⚠️ celery not installed, batch items will run sequentially")
        return None

    app = Celery("colorlab_tasks", broker=broker_url, backend=broker_url)
    app.conf.update(
        task_serializer="json",
        accept_content=["json"],
        result_serializer="json",
        timezone="UTC",
        enable_utc=True,
        task_track_started=True,
        task_always_eager=broker_url is None,
        task_eager_propagates=True,
        worker_prefetch_multiplier=1,
        worker_max_tasks_per_child=50,
    )
    return app


def configure(app, broker_url: Optional[str]) -> None:
    """Point an existing app at a broker, or back to eager mode"""
    if app is None:
        return
    app.conf.update(
        broker_url=broker_url,
        result_backend=broker_url,
        task_always_eager=broker_url is None,
    )
    mode = f"broker {broker_url}" if broker_url else "eager mode"
    logger.info(f"Batch worker configured for {mode}")


celery_app = create_app()

# Register tasks on the app
if CELERY_AVAILABLE:
    from colorlab import tasks  # noqa
