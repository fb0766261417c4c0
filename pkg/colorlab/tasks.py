# colorlab/tasks.py
"""
Celery tasks for batch experiment items
"""
from loguru import logger

from colorlab.worker import CELERY_AVAILABLE, celery_app

if CELERY_AVAILABLE:
    from celery import Task

    class CallbackTask(Task):
        """Base task with callbacks for tracking"""
        def on_success(self, retval, task_id, args, kwargs):
            logger.info(f"Task {task_id} succeeded: {retval.get('name')}")

        def on_failure(self, exc, task_id, args, kwargs, einfo):
            logger.error(f"❌ Task {task_id} failed: {exc}")

    @celery_app.task(bind=True, base=CallbackTask, name="colorlab.tasks.run_item_task")
    def run_item_task(self, item: dict, settings: dict) -> dict:
        """Run one experiment item; arguments and result are plain JSON"""
        from colorlab.runner import run_item

        return run_item(item, settings)
else:
    run_item_task = None
