import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('design_id', models.CharField(max_length=100)),
                ('mode', models.CharField(choices=[('test', 'K-sample test'), ('cluster', 'Clustering')], default='test', max_length=20)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('seed', models.BigIntegerField(default=0)),
                ('n_replications', models.PositiveIntegerField()),
                ('config', models.JSONField(blank=True, default=dict)),
                ('report', models.JSONField(blank=True, default=dict)),
                ('runtime_seconds', models.FloatField(blank=True, null=True)),
                ('error_message', models.TextField(blank=True, default='')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'db_table': 'experiment_runs',
                'ordering': ['-created_at'],
                'indexes': [
                    models.Index(fields=['design_id', 'status'], name='experiment__design__6f1c2a_idx'),
                    models.Index(fields=['-created_at'], name='experiment__created_9b3e4d_idx'),
                ],
            },
        ),
    ]
