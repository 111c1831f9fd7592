"""
Signal handlers for the decomposition app.
"""
from django.db.models.signals import post_save, pre_save
from django.dispatch import receiver
from .models import BenchRecord, RunRecord
import logging

logger = logging.getLogger(__name__)


@receiver(pre_save, sender=RunRecord)
def run_record_pre_save(sender, instance, **kwargs):
    """
    Signal handler that runs before a RunRecord is saved.
    Used to track status changes.
    """
    if instance.pk:
        try:
            old_instance = RunRecord.objects.get(pk=instance.pk)
            if old_instance.status != instance.status:
                logger.info(f"Run {instance.pk} status changed from {old_instance.status} to {instance.status}")
        except RunRecord.DoesNotExist:
            pass


@receiver(post_save, sender=RunRecord)
def run_record_post_save(sender, instance, created, **kwargs):
    """Log new runs."""
    if created:
        logger.info(f"Run {instance.pk} recorded for '{instance.circuit_name}' ({instance.strategy})")


@receiver(post_save, sender=BenchRecord)
def bench_record_post_save(sender, instance, created, **kwargs):
    """
    Signal handler that runs after a BenchRecord is saved.
    Timed-out attempts are logged as warnings.
    """
    if created:
        if instance.timed_out:
            logger.warning(f"Bench row {instance.pk} timed out: {instance}")
        else:
            logger.debug(f"Bench row {instance.pk} recorded: {instance}")
