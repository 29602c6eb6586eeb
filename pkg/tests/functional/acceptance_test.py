"""Functional tests running the whole scenario registry.

Tests check that every registered scenario meets its expected verdict and
that the shifted exponential family holds across rates and origins.
"""
import csv
import io
import json


class TestRegistry:
    """End-to-end runs of 'verify'."""

    def test_every_scenario_meets_its_expectation(self, runner):
        """Test that 'verify --scenario all' exits 0 with one report per scenario."""
        result = runner.invoke(args=['verify', '--scenario', 'all', '--format', 'json'])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        names = [report['scenario'] for report in payload['reports']]
        assert names == sorted(names)
        for report in payload['reports']:
            assert report['verdict'] == report['expected'], report['scenario']

    def test_exponential_sweep_grid(self, runner):
        """Test that every rate and origin holds on all 288 rows."""
        result = runner.invoke(args=['verify', '--scenario', 'exponential-sweep'])

        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(result.stdout)))
        assert len(rows) == 288
        assert max(abs(float(row['residual'])) for row in rows) <= 1e-8
