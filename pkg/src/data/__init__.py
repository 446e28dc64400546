"""
Bundled reference data sets
"""
from pathlib import Path
from typing import List

from src.exporters.distribution_io import DistributionFile, read_distribution_file

DATA_DIR = Path(__file__).parent


def available_fixtures() -> List[str]:
    """同梱データの名前一覧"""
    return sorted(p.stem for p in DATA_DIR.glob("*.json"))


def fixture_path(name: str) -> Path:
    path = DATA_DIR / f"{name}.json"
    if not path.exists():
        raise ValueError(f"サポートされていないデータ: {name}. 利用可能: {available_fixtures()}")
    return path


def load_fixture(name: str) -> DistributionFile:
    """同梱データを読み込む（例: "schiller" は実験で再構成された q_n）"""
    return read_distribution_file(fixture_path(name))
