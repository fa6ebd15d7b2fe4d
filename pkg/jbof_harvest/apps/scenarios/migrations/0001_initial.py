# Generated by Django 4.2.7 on 2026-10-17 09:12

from django.db import migrations, models
import django.utils.timezone
import model_utils.fields
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, editable=False, verbose_name='created')),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, editable=False, verbose_name='modified')),
                ('uuid', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('name', models.CharField(blank=True, help_text='Scenario name, with the sweep point if any.', max_length=255)),
                ('variant', models.CharField(choices=[('conv', 'Conventional JBOF'), ('shrunk', 'Shrunk SSD resources, no sharing'), ('oc', 'Open-channel SSDs, firmware on the host'), ('vh', 'Virtual harvesting with write copyback'), ('vh-ideal', 'Virtual harvesting without copyback'), ('proch', 'Processor harvesting only'), ('xbof', 'Processor and DRAM harvesting')], max_length=16)),
                ('seed', models.PositiveIntegerField(default=0)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('succeeded', 'Succeeded'), ('failed', 'Failed')], db_index=True, default='pending', max_length=16)),
                ('config', models.JSONField(default=dict, help_text='Effective scenario configuration, defaults resolved.')),
                ('summary', models.JSONField(blank=True, default=dict, help_text='Headline metrics of a finished run.')),
                ('output_dir', models.CharField(blank=True, max_length=1024)),
                ('error', models.TextField(blank=True)),
            ],
            options={
                'ordering': ['-created'],
            },
        ),
    ]
