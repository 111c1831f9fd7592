"""
Admin configuration for the decomposition app.
"""
from django.contrib import admin
from .models import BenchRecord, RunRecord


class RunRecordAdmin(admin.ModelAdmin):
    """Admin for RunRecord model"""
    list_display = ('id', 'circuit_name', 'strategy', 'diffusion', 'status', 'terminal_terms', 'peak_count', 'created_at')
    list_filter = ('strategy', 'diffusion', 'status', 'created_at')
    search_fields = ('circuit_name', 'error')
    readonly_fields = ('created_at', 'updated_at')


class BenchRecordAdmin(admin.ModelAdmin):
    """Admin for BenchRecord model"""
    list_display = ('id', 'qubits', 'nots', 'cnots', 'mcts', 'seed', 'strategy', 'terminal_terms', 'timed_out', 'wall_ms')
    list_filter = ('strategy', 'timed_out', 'qubits', 'mcts')
    search_fields = ('seed',)
    readonly_fields = ('created_at',)


# Register models with the admin site
admin.site.register(RunRecord, RunRecordAdmin)
admin.site.register(BenchRecord, BenchRecordAdmin)
