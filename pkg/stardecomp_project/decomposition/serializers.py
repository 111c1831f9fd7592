"""
Serializers for the decomposition app.

Besides the model serializers, these validate the app's input documents:
circuit JSON, bench configs, annealing schedules and run requests.
"""
from rest_framework import serializers

from .circuits import GATE_KINDS, Circuit, Gate
from .conf import engine_setting
from .exceptions import CircuitError
from .models import BenchRecord, RunRecord

STRATEGIES = ('weighted', 'greedy', 'cut')


class GateSerializer(serializers.Serializer):
    """Serializer for one gate of a circuit document."""
    type = serializers.ChoiceField(choices=GATE_KINDS)
    target = serializers.IntegerField(min_value=0)
    control = serializers.IntegerField(min_value=0, required=False)
    controls = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)

    def validate(self, data):
        """Check that the control fields match the gate type."""
        kind = data['type']
        if kind in ('x', 'h') and ('control' in data or 'controls' in data):
            raise serializers.ValidationError(f"Gate '{kind}' takes no controls.")
        if kind == 'cx':
            if 'control' not in data:
                raise serializers.ValidationError("Gate 'cx' needs a control.")
            if data['control'] == data['target']:
                raise serializers.ValidationError("Control and target must differ.")
        if kind == 'mct':
            controls = data.get('controls')
            if not controls:
                raise serializers.ValidationError("Gate 'mct' needs a non-empty controls list.")
            if data['target'] in controls:
                raise serializers.ValidationError("Controls must exclude the target.")
            if len(set(controls)) != len(controls):
                raise serializers.ValidationError("Controls must be distinct.")
        return data

    def to_gate(self, data):
        if data['type'] == 'x':
            return Gate.x(data['target'])
        if data['type'] == 'h':
            return Gate.h(data['target'])
        if data['type'] == 'cx':
            return Gate.cx(data['control'], data['target'])
        return Gate.mct(data['controls'], data['target'])


class CircuitSerializer(serializers.Serializer):
    """Serializer for a circuit document; ``save()`` returns a Circuit."""
    qubits = serializers.IntegerField(min_value=1)
    gates = GateSerializer(many=True)
    name = serializers.CharField(required=False, allow_blank=True, default='')
    search_register = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        required=False,
        allow_empty=False,
    )
    verified = serializers.BooleanField(required=False, default=False)
    expected_peaks = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    expected_terms = serializers.DictField(child=serializers.IntegerField(min_value=0), required=False)

    def validate_expected_terms(self, value):
        """Validate the expected_terms field."""
        unknown = sorted(set(value) - set(STRATEGIES))
        if unknown:
            raise serializers.ValidationError(f"Unknown strategies: {unknown}")
        return value

    def validate(self, data):
        """Check every qubit index against the circuit width."""
        n = data['qubits']
        for index, gate in enumerate(data['gates']):
            used = [gate['target'], *gate.get('controls', []), *([gate['control']] if 'control' in gate else [])]
            out_of_range = [q for q in used if q >= n]
            if out_of_range:
                raise serializers.ValidationError(
                    {'gates': f"Gate {index}: qubits {out_of_range} out of range 0..{n - 1}"}
                )
        register = data.get('search_register')
        if register is not None and any(q >= n for q in register):
            raise serializers.ValidationError({'search_register': f"Register {register} does not fit {n} qubits"})
        return data

    def create(self, validated_data):
        """Build the Circuit."""
        gate_serializer = GateSerializer()
        gates = [gate_serializer.to_gate(g) for g in validated_data['gates']]
        register = validated_data.get('search_register')
        try:
            return Circuit(
                qubits=validated_data['qubits'],
                gates=gates,
                name=validated_data.get('name', ''),
                search_register=tuple(register) if register else None,
                verified=validated_data.get('verified', False),
                expected_peaks=validated_data.get('expected_peaks'),
                expected_terms=dict(validated_data.get('expected_terms', {})),
            )
        except CircuitError as exc:
            raise serializers.ValidationError(str(exc)) from None


class BenchConfigSerializer(serializers.Serializer):
    """Serializer for a benchmark grid; ``save()`` returns a BenchConfig."""
    qubits = serializers.ListField(child=serializers.IntegerField(min_value=3), allow_empty=False)
    nots = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    cnots = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    mcts = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    samples = serializers.IntegerField(min_value=1, default=lambda: engine_setting('BENCH_SAMPLES'))
    timeout = serializers.FloatField(min_value=0.001, default=lambda: engine_setting('BENCH_TIMEOUT'))
    seed_base = serializers.IntegerField(min_value=0, default=lambda: engine_setting('BENCH_SEED_BASE'))
    strategies = serializers.ListField(
        child=serializers.ChoiceField(choices=STRATEGIES),
        default=lambda: ['weighted', 'greedy'],
    )
    scalar_mode = serializers.BooleanField(default=True)

    def validate_strategies(self, value):
        """Validate the strategies field."""
        if len(set(value)) != len(value):
            raise serializers.ValidationError("Strategies must be distinct.")
        if not value:
            raise serializers.ValidationError("At least one strategy is required.")
        return value

    def create(self, validated_data):
        from .bench import BenchConfig

        return BenchConfig(
            qubits=tuple(validated_data['qubits']),
            nots=tuple(validated_data['nots']),
            cnots=tuple(validated_data['cnots']),
            mcts=tuple(validated_data['mcts']),
            samples=validated_data['samples'],
            timeout=validated_data['timeout'],
            seed_base=validated_data['seed_base'],
            strategies=tuple(validated_data['strategies']),
            scalar_mode=validated_data['scalar_mode'],
        )


class AnnealScheduleSerializer(serializers.Serializer):
    """Serializer for an annealing schedule; ``save()`` returns an AnnealSchedule."""
    initial_temperature = serializers.FloatField(min_value=0.0)
    cooling_factor = serializers.FloatField()
    steps = serializers.IntegerField(min_value=1)
    moves_per_step = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(default=0)
    greedy_share = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    patience = serializers.IntegerField(min_value=1, required=False)

    def validate_initial_temperature(self, value):
        """Validate the initial_temperature field."""
        if value <= 0:
            raise serializers.ValidationError("Temperature must be positive.")
        return value

    def validate_cooling_factor(self, value):
        """Validate the cooling_factor field."""
        if not 0 < value < 1:
            raise serializers.ValidationError("Cooling factor must lie strictly between 0 and 1.")
        return value

    def create(self, validated_data):
        from .discovery import AnnealSchedule

        return AnnealSchedule(**validated_data)


class RunRecordSerializer(serializers.ModelSerializer):
    """Serializer for the RunRecord model."""
    class Meta:
        model = RunRecord
        fields = [
            'id', 'circuit_name', 'qubits', 'strategy', 'diffusion', 'status',
            'terminal_terms', 'peak_count', 'threshold', 'peaks', 'timings',
            'error', 'created_at', 'updated_at'
        ]
        read_only_fields = fields


class BenchRecordSerializer(serializers.ModelSerializer):
    """Serializer for the BenchRecord model."""
    class Meta:
        model = BenchRecord
        fields = [
            'id', 'qubits', 'nots', 'cnots', 'mcts', 'seed', 'strategy',
            'terminal_terms', 'timed_out', 'wall_ms', 'created_at'
        ]
        read_only_fields = fields


class RunRequestSerializer(serializers.Serializer):
    """Serializer for a pipeline run request: an inline circuit or a fixture name."""
    circuit = serializers.JSONField(required=False)
    fixture = serializers.CharField(required=False)
    strategy = serializers.ChoiceField(choices=STRATEGIES, default='weighted')
    diffusion = serializers.ChoiceField(choices=('auto', 'none'), default='auto')

    def validate_circuit(self, value):
        """Validate the inline circuit document."""
        circuit = CircuitSerializer(data=value)
        if not circuit.is_valid():
            raise serializers.ValidationError(circuit.errors)
        return circuit.save()

    def validate_fixture(self, value):
        """Validate the fixture field."""
        from .circuits import fixture_names

        if value not in fixture_names():
            raise serializers.ValidationError(f"Unknown fixture '{value}'.")
        return value

    def validate(self, data):
        """Require exactly one circuit source."""
        if ('circuit' in data) == ('fixture' in data):
            raise serializers.ValidationError("Give exactly one of 'circuit' or 'fixture'.")
        return data
