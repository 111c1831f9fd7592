# Generated by Django 5.1.7 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('qubits', models.PositiveIntegerField(help_text='Qubits of the generated circuit')),
                ('nots', models.PositiveIntegerField(help_text='NOT gates in the generated circuit')),
                ('cnots', models.PositiveIntegerField(help_text='CNOT gates in the generated circuit')),
                ('mcts', models.PositiveIntegerField(help_text='MCT gates in the generated circuit')),
                ('seed', models.BigIntegerField(help_text='Generator seed')),
                ('strategy', models.CharField(choices=[('weighted', 'Weighted'), ('greedy', 'Greedy'), ('cut', 'Cut')], help_text='Decomposition driver used', max_length=20)),
                ('terminal_terms', models.PositiveIntegerField(blank=True, help_text='Terms, empty on timeout', null=True)),
                ('timed_out', models.BooleanField(default=False, help_text='Whether the attempt hit its deadline')),
                ('wall_ms', models.FloatField(help_text='Wall time of the attempt in milliseconds')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='When the row was recorded')),
            ],
            options={
                'verbose_name': 'Bench Record',
                'verbose_name_plural': 'Bench Records',
                'ordering': ['qubits', 'nots', 'cnots', 'mcts', 'seed', 'strategy'],
            },
        ),
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('circuit_name', models.CharField(help_text='Fixture name or label of the circuit', max_length=255)),
                ('qubits', models.PositiveIntegerField(default=0, help_text='Number of qubits of the circuit')),
                ('strategy', models.CharField(choices=[('weighted', 'Weighted'), ('greedy', 'Greedy'), ('cut', 'Cut')], default='weighted', help_text='Decomposition driver used', max_length=20)),
                ('diffusion', models.CharField(choices=[('auto', 'Auto'), ('none', 'None')], default='auto', help_text='Whether the diffusion stage was appended', max_length=10)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('finished', 'Finished'), ('failed', 'Failed'), ('timed_out', 'Timed out')], default='pending', help_text='Current status of the run', max_length=20)),
                ('terminal_terms', models.PositiveIntegerField(blank=True, help_text='Terms reaching the amplitude sum', null=True)),
                ('peak_count', models.PositiveIntegerField(blank=True, help_text='Basis states above the threshold', null=True)),
                ('threshold', models.FloatField(blank=True, help_text='Average of the largest and smallest probability', null=True)),
                ('peaks', models.JSONField(blank=True, default=list, help_text='Peak basis indices')),
                ('timings', models.JSONField(blank=True, default=dict, help_text='Wall time per pipeline phase in seconds')),
                ('error', models.TextField(blank=True, help_text='Failure message, if any')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='When the run was created')),
                ('updated_at', models.DateTimeField(auto_now=True, help_text='When the run was last updated')),
            ],
            options={
                'verbose_name': 'Run Record',
                'verbose_name_plural': 'Run Records',
                'ordering': ['-created_at'],
            },
        ),
    ]
