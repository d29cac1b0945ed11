import uuid

from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    """
    A saved run of a simulation design.

    The validated design is stored in `config` and the rendered report in
    `report`, so a run can be listed or re-emitted without recomputing it.
    """
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    ]

    MODE_CHOICES = [
        ('test', 'K-sample test'),
        ('cluster', 'Clustering'),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)

    design_id = models.CharField(max_length=100)
    mode = models.CharField(max_length=20, choices=MODE_CHOICES, default='test')
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')
    seed = models.BigIntegerField(default=0)
    n_replications = models.PositiveIntegerField()

    config = models.JSONField(default=dict, blank=True)
    report = models.JSONField(default=dict, blank=True)
    runtime_seconds = models.FloatField(blank=True, null=True)
    error_message = models.TextField(blank=True, default='')

    created_at = models.DateTimeField(auto_now_add=True)
    completed_at = models.DateTimeField(blank=True, null=True)

    class Meta:
        db_table = 'experiment_runs'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['design_id', 'status'], name='experiment__design__6f1c2a_idx'),
            models.Index(fields=['-created_at'], name='experiment__created_9b3e4d_idx'),
        ]

    def __str__(self):
        return f"{self.design_id} seed={self.seed} ({self.status})"

    def mark_running(self):
        self.status = 'running'
        self.save(update_fields=['status'])

    def mark_completed(self, report: dict, runtime_seconds: float):
        self.status = 'completed'
        self.report = report
        self.runtime_seconds = runtime_seconds
        self.completed_at = timezone.now()
        self.save(update_fields=['status', 'report', 'runtime_seconds', 'completed_at'])

    def mark_failed(self, error: Exception):
        self.status = 'failed'
        self.error_message = str(error)
        self.completed_at = timezone.now()
        self.save(update_fields=['status', 'error_message', 'completed_at'])
