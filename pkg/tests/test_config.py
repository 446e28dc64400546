"""
Configuration management tests
"""
import logging

import pytest
from pathlib import Path

from rich.logging import RichHandler

from src.config.settings import (
    Settings,
    get_report_formats,
    get_settings,
    get_tolerances,
    reload_settings,
    setup_logging,
)
from src.models.report import FACTORIAL_CHECKS, CheckName
from src.validators.base_validator import BatteryConfig

pytestmark = pytest.mark.config

BUNDLED_CONFIG = Path(__file__).parent.parent / "config" / "nonclassicality.yaml"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """グローバル設定をテストごとに隔離"""
    monkeypatch.setattr("src.config.settings._settings_instance", None)


class TestSettings:
    """設定管理のテスト"""

    def test_default_settings_creation(self):
        """デフォルト設定の作成テスト"""
        settings = Settings()

        assert settings.application.name == "Photon Nonclassicality Analyzer"
        assert settings.application.version == "0.1.0"
        assert settings.tolerances.psd_tol == 1e-9
        assert settings.tolerances.zero_tol == 1e-12
        assert settings.battery.max_hankel_order == 50
        assert set(settings.battery.enabled_checks) == set(CheckName) - FACTORIAL_CHECKS
        assert settings.report.default_format == "text"

    def test_settings_from_yaml(self, mock_yaml_config):
        """YAML設定ファイルからの読み込みテスト"""
        settings = Settings.from_yaml(mock_yaml_config)

        assert settings.application.name == "Test Analyzer"
        assert settings.tolerances.psd_tol == 1e-8
        assert settings.tolerances.zero_tol == 1e-12
        assert settings.battery.enabled_checks == [CheckName.ZEROS, CheckName.FIRST_ORDER, CheckName.HANKEL_Q]
        assert settings.report.default_format == "json"

    def test_settings_from_nonexistent_yaml(self):
        """存在しないYAMLファイルの処理テスト"""
        settings = Settings.from_yaml(Path("nonexistent_config.yaml"))

        assert settings == Settings()

    def test_invalid_yaml_falls_back(self, tmp_path, caplog, monkeypatch):
        """壊れた設定ファイルは既定値に戻る"""
        monkeypatch.setattr(logging.getLogger("src"), "propagate", True)
        broken = tmp_path / "broken.yaml"
        broken.write_text("tolerances:\n  psd_tol: -1.0\n", encoding="utf-8")

        with caplog.at_level(logging.WARNING, logger="src.config.settings"):
            settings = Settings.from_yaml(broken)

        assert settings.tolerances.psd_tol == 1e-9
        assert "Failed to load config file" in caplog.text

    def test_unknown_check_falls_back(self, tmp_path):
        broken = tmp_path / "checks.yaml"
        broken.write_text("battery:\n  enabled_checks: [zeros, bogus]\n", encoding="utf-8")

        assert Settings.from_yaml(broken).battery.enabled_checks == Settings().battery.enabled_checks

    def test_empty_yaml(self, tmp_path):
        empty = tmp_path / "empty.yaml"
        empty.write_text("", encoding="utf-8")

        assert Settings.from_yaml(empty) == Settings()

    def test_to_yaml(self, test_settings, temp_dir):
        """YAML出力のテスト"""
        output_path = temp_dir / "nested" / "output_config.yaml"
        test_settings.to_yaml(output_path)

        assert output_path.exists()
        assert Settings.from_yaml(output_path) == test_settings

    def test_bundled_config_matches_defaults(self):
        """同梱の設定ファイルは既定値と一致する"""
        assert Settings.from_yaml(BUNDLED_CONFIG) == Settings()

    def test_singleton_pattern(self):
        """シングルトンパターンのテスト"""
        settings1 = get_settings()
        settings2 = get_settings()

        assert settings1 is settings2

    def test_reload_settings(self, mock_yaml_config):
        """設定再読み込みのテスト"""
        get_settings()
        reloaded_settings = reload_settings(mock_yaml_config)

        assert reloaded_settings.application.name == "Test Analyzer"
        assert get_settings() is reloaded_settings
        assert get_tolerances().psd_tol == 1e-8
        assert get_report_formats() == ["json", "text", "markdown"]


class TestBatteryConfigFromSettings:
    """設定からバッテリー設定への変換"""

    def test_values_carried(self, test_settings):
        cfg = BatteryConfig.from_settings(test_settings)

        assert cfg.psd_tol == 1e-8
        assert cfg.saturation_tol == 1e-5
        assert cfg.max_hankel_order == 12
        assert cfg.enabled_checks == frozenset({CheckName.ZEROS, CheckName.FIRST_ORDER, CheckName.HANKEL_Q})

    def test_overrides(self, test_settings):
        cfg = BatteryConfig.from_settings(test_settings, psd_tol=1e-6, max_hankel_order=0, enabled_checks=None)

        assert cfg.psd_tol == 1e-6
        assert cfg.max_hankel_order == 0
        assert CheckName.HANKEL_Q in cfg.enabled_checks

    def test_global_settings(self):
        assert BatteryConfig.from_settings() == BatteryConfig.from_settings(get_settings())


class TestLogging:
    """ログ設定のテスト"""

    @pytest.fixture(autouse=True)
    def restore_logger(self):
        package_logger = logging.getLogger("src")
        handlers, level, propagate = list(package_logger.handlers), package_logger.level, package_logger.propagate
        yield package_logger
        package_logger.handlers = handlers
        package_logger.setLevel(level)
        package_logger.propagate = propagate

    def test_rich_handler_installed_once(self, restore_logger):
        setup_logging("debug")
        setup_logging("info")

        rich_handlers = [h for h in restore_logger.handlers if isinstance(h, RichHandler)]
        assert len(rich_handlers) == 1
        assert restore_logger.level == logging.INFO
        assert restore_logger.propagate is False

    def test_level_from_settings(self, restore_logger, mock_yaml_config):
        reload_settings(mock_yaml_config)
        setup_logging()

        assert restore_logger.level == logging.WARNING
