"""
pytest configuration and fixtures
"""
import pytest
import tempfile
from pathlib import Path

import numpy as np
from hypothesis import settings as hypothesis_settings

from src.config.settings import Settings
from src.data import fixture_path, load_fixture
from src.generators.state_generator import StateGenerator, coherent, thermal
from src.models.distribution import MomentSequence
from src.validators.base_validator import BatteryConfig

SCHILLER_Q = (0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80)

# Hypothesis の締め切りなし
hypothesis_settings.register_profile("nonclassicality", deadline=None)
hypothesis_settings.load_profile("nonclassicality")


@pytest.fixture
def temp_dir():
    """一時ディレクトリを作成するフィクスチャ"""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


@pytest.fixture
def test_settings():
    """テスト用設定を作成するフィクスチャ"""
    return Settings(
        application={"name": "Test Analyzer", "version": "test-0.1.0", "description": "Test version"},
        tolerances={"psd_tol": 1e-8, "saturation_tol": 1e-5},
        battery={"max_hankel_order": 12, "enabled_checks": ["zeros", "first_order", "hankel_q"]},
    )


@pytest.fixture
def battery_config():
    """既定のバッテリー設定"""
    return BatteryConfig()


@pytest.fixture
def state_generator():
    return StateGenerator()


@pytest.fixture
def schiller_q():
    """実験で再構成された q_n（同梱データ）"""
    return MomentSequence.from_values(SCHILLER_Q)


@pytest.fixture
def schiller_file():
    return load_fixture("schiller")


@pytest.fixture
def schiller_path():
    return fixture_path("schiller")


@pytest.fixture
def coherent_dist():
    return coherent(10.0, 60)


@pytest.fixture
def thermal_dist():
    return thermal(1.0, 40)


@pytest.fixture
def rng():
    """乱数生成器（再現性のため固定シード）"""
    return np.random.default_rng(20240501)


@pytest.fixture
def mock_yaml_config(tmp_path):
    """モックYAML設定ファイルのフィクスチャ"""
    config_content = """
application:
  name: "Test Analyzer"
  version: "test-0.1.0"
  description: "Test version"

tolerances:
  psd_tol: 1.0e-8
  saturation_tol: 1.0e-5

battery:
  max_hankel_order: 12
  enabled_checks:
    - zeros
    - first_order
    - hankel_q

report:
  default_format: "json"
"""

    config_file = tmp_path / "test_config.yaml"
    config_file.write_text(config_content, encoding="utf-8")
    return config_file
