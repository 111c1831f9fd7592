"""
Models for the decomposition app.
Defines RunRecord and BenchRecord, the persisted outcomes of pipeline runs and
benchmark attempts.
"""
from django.db import models
import logging

logger = logging.getLogger(__name__)

STRATEGY_CHOICES = (
    ('weighted', 'Weighted'),
    ('greedy', 'Greedy'),
    ('cut', 'Cut'),
)


class RunRecord(models.Model):
    """
    One run of the two-stage pipeline on a circuit.
    Results stay empty until the run finishes.
    """
    STATUS_CHOICES = (
        ('pending', 'Pending'),
        ('finished', 'Finished'),
        ('failed', 'Failed'),
        ('timed_out', 'Timed out'),
    )
    DIFFUSION_CHOICES = (
        ('auto', 'Auto'),
        ('none', 'None'),
    )

    circuit_name = models.CharField(max_length=255, help_text="Fixture name or label of the circuit")
    qubits = models.PositiveIntegerField(default=0, help_text="Number of qubits of the circuit")
    strategy = models.CharField(
        max_length=20,
        choices=STRATEGY_CHOICES,
        default='weighted',
        help_text="Decomposition driver used"
    )
    diffusion = models.CharField(
        max_length=10,
        choices=DIFFUSION_CHOICES,
        default='auto',
        help_text="Whether the diffusion stage was appended"
    )
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default='pending',
        help_text="Current status of the run"
    )
    terminal_terms = models.PositiveIntegerField(null=True, blank=True, help_text="Terms reaching the amplitude sum")
    peak_count = models.PositiveIntegerField(null=True, blank=True, help_text="Basis states above the threshold")
    threshold = models.FloatField(null=True, blank=True, help_text="Average of the largest and smallest probability")
    peaks = models.JSONField(default=list, blank=True, help_text="Peak basis indices")
    timings = models.JSONField(default=dict, blank=True, help_text="Wall time per pipeline phase in seconds")
    error = models.TextField(blank=True, help_text="Failure message, if any")
    created_at = models.DateTimeField(auto_now_add=True, help_text="When the run was created")
    updated_at = models.DateTimeField(auto_now=True, help_text="When the run was last updated")

    class Meta:
        verbose_name = "Run Record"
        verbose_name_plural = "Run Records"
        ordering = ["-created_at"]

    def __str__(self):
        """String representation of the RunRecord model."""
        return f"{self.circuit_name} ({self.strategy}, {self.status})"

    def mark_finished(self, result):
        """Store a RunResult and mark the run finished."""
        self.status = 'finished'
        self.terminal_terms = result.terminal_terms
        self.peak_count = result.peak_count
        self.threshold = result.threshold
        self.peaks = list(result.peaks)
        self.timings = {k: round(v, 6) for k, v in result.timings.items()}
        self.save()
        logger.info(f"Run {self.id} finished with {self.terminal_terms} terms and {self.peak_count} peaks")
        return self

    def mark_failed(self, message, timed_out=False):
        self.status = 'timed_out' if timed_out else 'failed'
        self.error = message
        self.save()
        logger.warning(f"Run {self.id} {self.status}: {message}")
        return self


class BenchRecord(models.Model):
    """
    One benchmark attempt: a (cell, seed, strategy) triple and its outcome.
    """
    qubits = models.PositiveIntegerField(help_text="Qubits of the generated circuit")
    nots = models.PositiveIntegerField(help_text="NOT gates in the generated circuit")
    cnots = models.PositiveIntegerField(help_text="CNOT gates in the generated circuit")
    mcts = models.PositiveIntegerField(help_text="MCT gates in the generated circuit")
    seed = models.BigIntegerField(help_text="Generator seed")
    strategy = models.CharField(max_length=20, choices=STRATEGY_CHOICES, help_text="Decomposition driver used")
    terminal_terms = models.PositiveIntegerField(null=True, blank=True, help_text="Terms, empty on timeout")
    timed_out = models.BooleanField(default=False, help_text="Whether the attempt hit its deadline")
    wall_ms = models.FloatField(help_text="Wall time of the attempt in milliseconds")
    created_at = models.DateTimeField(auto_now_add=True, help_text="When the row was recorded")

    class Meta:
        verbose_name = "Bench Record"
        verbose_name_plural = "Bench Records"
        ordering = ["qubits", "nots", "cnots", "mcts", "seed", "strategy"]

    def __str__(self):
        """String representation of the BenchRecord model."""
        outcome = 'timeout' if self.timed_out else f"{self.terminal_terms} terms"
        return f"q{self.qubits} n{self.nots} c{self.cnots} m{self.mcts} seed {self.seed} {self.strategy}: {outcome}"

    @property
    def cell(self):
        return (self.qubits, self.nots, self.cnots, self.mcts)
