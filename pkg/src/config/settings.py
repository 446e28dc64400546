"""
Configuration management for Photon Nonclassicality Analyzer
"""
import logging
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import BaseModel, Field
from rich.console import Console
from rich.logging import RichHandler

from src.models.report import FACTORIAL_CHECKS, CheckName

logger = logging.getLogger(__name__)


class ApplicationConfig(BaseModel):
    """アプリケーション設定"""
    name: str = "Photon Nonclassicality Analyzer"
    version: str = "0.1.0"
    description: str = "光子数分布から位相に依存しない非古典性を検出"


class ToleranceConfig(BaseModel):
    """数値許容誤差"""
    zero_tol: float = Field(default=1e-12, ge=0.0)
    norm_tol: float = Field(default=1e-9, ge=0.0)
    psd_tol: float = Field(default=1e-9, gt=0.0)
    saturation_tol: float = Field(default=1e-6, gt=0.0)
    tail_tol: float = Field(default=1e-10, gt=0.0)


class BatteryDefaults(BaseModel):
    """検査バッテリーの既定値"""
    max_hankel_order: int = Field(default=50, ge=0)
    enabled_checks: List[CheckName] = Field(
        default_factory=lambda: [c for c in CheckName if c not in FACTORIAL_CHECKS]
    )
    hamburger_only: bool = False


class GeneratorConfig(BaseModel):
    """状態生成の設定"""
    window_sigmas: float = Field(default=10.0, gt=0.0)
    min_nmax: int = Field(default=20, ge=0)
    figure_nmax: int = Field(default=200, ge=2)
    photon_added_tail_tol: float = Field(default=1e-9, gt=0.0)


class QuadratureConfig(BaseModel):
    """数値積分（オラクル）の設定"""
    rtol: float = Field(default=1e-11, gt=0.0)
    cutoff: float = Field(default=1e-18, gt=0.0)
    nodes_per_panel: int = Field(default=32, ge=2)
    initial_panels: int = Field(default=32, ge=1)
    max_doublings: int = Field(default=6, ge=0)


class ReportConfig(BaseModel):
    """レポート出力設定"""
    default_format: str = "text"
    formats: List[str] = ["json", "text", "markdown"]


class LoggingConfig(BaseModel):
    """ログ設定"""
    level: str = "WARNING"


class Settings(BaseModel):
    """メイン設定クラス"""
    application: ApplicationConfig = Field(default_factory=ApplicationConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    battery: BatteryDefaults = Field(default_factory=BatteryDefaults)
    generators: GeneratorConfig = Field(default_factory=GeneratorConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def from_yaml(cls, config_path: Optional[Path] = None) -> "Settings":
        """YAMLファイルから設定を読み込み"""
        if config_path is None:
            # デフォルトの設定ファイルパスを探索
            config_path = cls._find_config_file()

        if not config_path or not config_path.exists():
            # 設定ファイルがない場合はデフォルト設定を使用
            return cls()

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config_data = yaml.safe_load(f) or {}

            return cls(**config_data)
        except Exception as e:
            logger.warning("Failed to load config file %s: %s", config_path, e)
            logger.warning("Using default configuration.")
            return cls()

    @staticmethod
    def _find_config_file() -> Optional[Path]:
        """設定ファイルを探索"""
        possible_paths = [
            Path("config/nonclassicality.yaml"),
            Path("nonclassicality.yaml"),
            Path.home() / ".photon-nonclassicality" / "config.yaml"
        ]

        for path in possible_paths:
            if path.exists():
                return path

        return None

    def to_yaml(self, output_path: Path) -> None:
        """設定をYAMLファイルに出力"""
        output_path.parent.mkdir(parents=True, exist_ok=True)

        config_dict = self.model_dump(mode="json")

        with open(output_path, 'w', encoding='utf-8') as f:
            yaml.dump(config_dict, f, default_flow_style=False,
                      allow_unicode=True, sort_keys=False)


# グローバル設定インスタンス
_settings_instance: Optional[Settings] = None


def get_settings() -> Settings:
    """設定インスタンスを取得（シングルトンパターン）"""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = Settings.from_yaml()
    return _settings_instance


def reload_settings(config_path: Optional[Path] = None) -> Settings:
    """設定を再読み込み"""
    global _settings_instance
    _settings_instance = Settings.from_yaml(config_path)
    return _settings_instance


def setup_logging(level: Optional[str] = None) -> None:
    """パッケージのロガーに RichHandler を設定"""
    level = (level or get_settings().logging.level).upper()
    package_logger = logging.getLogger("src")
    package_logger.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in package_logger.handlers):
        package_logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False, markup=False))
    package_logger.propagate = False


# 便利関数
def get_tolerances() -> ToleranceConfig:
    """許容誤差の設定を取得"""
    return get_settings().tolerances


def get_report_formats() -> List[str]:
    """利用可能なレポート形式を取得"""
    return get_settings().report.formats
