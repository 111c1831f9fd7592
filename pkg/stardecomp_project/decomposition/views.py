"""
Views for the decomposition app.
"""
from dataclasses import asdict
import logging
import time

from rest_framework import viewsets, filters, status, permissions
from rest_framework.decorators import action
from rest_framework.response import Response
from django_filters.rest_framework import DjangoFilterBackend

from .bench import BenchRow, aggregate as aggregate_rows
from .catalog import catalog_verify_all
from .circuits import load_fixture
from .conf import engine_setting
from .exceptions import DecompositionError, DecompositionTimeout
from .models import BenchRecord, RunRecord
from .serializers import BenchRecordSerializer, RunRecordSerializer, RunRequestSerializer
from .strategy import run_pipeline

logger = logging.getLogger(__name__)


class RunRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """API endpoint for listing pipeline runs and starting new ones."""
    queryset = RunRecord.objects.all()
    serializer_class = RunRecordSerializer
    permission_classes = [permissions.IsAuthenticatedOrReadOnly]
    filter_backends = [DjangoFilterBackend, filters.SearchFilter, filters.OrderingFilter]
    filterset_fields = ['strategy', 'diffusion', 'status']
    search_fields = ['circuit_name']
    ordering_fields = ['created_at', 'terminal_terms', 'peak_count']
    ordering = ['-created_at']

    @action(detail=False, methods=['post'], permission_classes=[permissions.IsAuthenticated])
    def execute(self, request):
        """Run the pipeline on an inline circuit or a named fixture."""
        serializer = RunRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data
        circuit = data['circuit'] if 'circuit' in data else load_fixture(data['fixture'])
        record = RunRecord.objects.create(
            circuit_name=circuit.name or data.get('fixture', 'inline'),
            qubits=circuit.qubits,
            strategy=data['strategy'],
            diffusion=data['diffusion'],
        )
        deadline = time.monotonic() + engine_setting('BENCH_TIMEOUT')
        try:
            result = run_pipeline(circuit, data['strategy'], data['diffusion'], deadline)
        except DecompositionError as exc:
            record.mark_failed(str(exc), timed_out=isinstance(exc, DecompositionTimeout))
            return Response(RunRecordSerializer(record).data, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        record.mark_finished(result)
        logger.info(f"Run {record.id} executed for {request.user}")
        return Response(RunRecordSerializer(record).data, status=status.HTTP_201_CREATED)


class BenchRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """API endpoint for benchmark rows."""
    queryset = BenchRecord.objects.all()
    serializer_class = BenchRecordSerializer
    filter_backends = [DjangoFilterBackend, filters.OrderingFilter]
    filterset_fields = ['qubits', 'nots', 'cnots', 'mcts', 'strategy', 'timed_out']
    ordering_fields = ['wall_ms', 'terminal_terms', 'seed']

    @action(detail=False, methods=['get'])
    def aggregate(self, request):
        """Per-cell ratio, improvement share and relevance over the filtered rows."""
        records = self.filter_queryset(self.get_queryset())
        rows = [
            BenchRow(r.qubits, r.nots, r.cnots, r.mcts, r.seed, r.strategy, r.terminal_terms, r.timed_out, r.wall_ms)
            for r in records
        ]
        return Response(aggregate_rows(rows))


class CatalogViewSet(viewsets.ViewSet):
    """API endpoint for the catalog verification report."""
    permission_classes = [permissions.AllowAny]

    def list(self, request):
        """Verify every rule and return one report per rule."""
        return Response([asdict(report) for report in catalog_verify_all()])
