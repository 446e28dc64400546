"""
Reading and writing photon-number data files (JSON and CSV)

JSON: {"kind": "p" | "q" | "gamma", "values": [...], "zero_tol": ..., "norm_policy": ...,
       "log_values": [...]}
CSV:  columns n,value[,log_value] with an optional header row; the kind comes from the caller.

log_values (log p_n, null / -inf for an exact zero) is optional and only
valid for kind p. Generated files carry it so that tail entries below the
double-precision range keep their value.
"""
import csv
import io
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator
from scipy.special import gammaln

from src.models.distribution import (
    FactorialMomentSequence,
    MomentSequence,
    NormPolicy,
    PhotonDistribution,
    make_distribution,
)
from src.models.errors import InputFormatError

logger = logging.getLogger(__name__)


class SequenceKind(str, Enum):
    P = "p"
    Q = "q"
    GAMMA = "gamma"


class DistributionFile(BaseModel):
    """入力ファイル一つ分の内容"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: SequenceKind = SequenceKind.P
    values: Tuple[float, ...]
    zero_tol: Optional[float] = None
    norm_policy: Optional[NormPolicy] = None
    log_values: Optional[Tuple[float, ...]] = None

    @field_validator("log_values", mode="before")
    @classmethod
    def _check_logs(cls, values: Any) -> Any:
        if values is None:
            return None
        if not isinstance(values, (list, tuple)):
            raise InputFormatError("log_values must be an array of numbers", field="log_values")
        logs = []
        for n, value in enumerate(values):
            if value is None:
                logs.append(-math.inf)
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InputFormatError(f"expected a number, got {value!r}", field=f"log_values[{n}]")
            if math.isnan(value) or value == math.inf:
                raise InputFormatError(f"invalid log probability {value!r}", field=f"log_values[{n}]")
            logs.append(float(value))
        return logs

    @model_validator(mode="after")
    def _check_log_shape(self) -> "DistributionFile":
        if self.log_values is None:
            return self
        if self.kind != SequenceKind.P:
            raise InputFormatError("log_values is only allowed for kind p", field="log_values")
        if len(self.log_values) != len(self.values):
            raise InputFormatError(
                f"log_values has {len(self.log_values)} entries for {len(self.values)} values",
                field="log_values",
            )
        return self

    @field_validator("values", mode="before")
    @classmethod
    def _check_numbers(cls, values: Any) -> Any:
        if not isinstance(values, (list, tuple)):
            raise InputFormatError("values must be an array of numbers", field="values")
        if not values:
            raise InputFormatError("values is empty", field="values")
        for n, value in enumerate(values):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InputFormatError(f"expected a number, got {value!r}", field=f"values[{n}]")
            if not math.isfinite(value):
                raise InputFormatError(f"non-finite value {value!r}", field=f"values[{n}]")
        return values

    @field_validator("zero_tol")
    @classmethod
    def _check_zero_tol(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value < 0:
            raise InputFormatError("zero_tol must be nonnegative", field="zero_tol")
        return value

    def to_distribution(
        self,
        zero_tol: Optional[float] = None,
        norm_policy: Optional[NormPolicy] = None,
        default_zero_tol: float = 1e-12,
        norm_tol: float = 1e-9,
    ) -> PhotonDistribution:
        """p_n の分布に変換（kind=q は p_n = q_n / n!）

        Precedence for zero_tol and norm_policy: explicit argument, then the
        file's own setting, then the default.
        """
        if self.kind == SequenceKind.GAMMA:
            raise InputFormatError("factorial moments do not determine a finite p_n window", field="kind")
        values = np.asarray(self.values, dtype=float)
        if self.kind == SequenceKind.Q:
            if np.any(values < 0):
                n = int(np.flatnonzero(values < 0)[0])
                raise InputFormatError(f"negative moment {values[n]!r}", field=f"values[{n}]")
            n = np.arange(values.size, dtype=float)
            with np.errstate(divide="ignore"):
                values = np.exp(np.log(values) - gammaln(n + 1.0))
        if zero_tol is None:
            zero_tol = self.zero_tol if self.zero_tol is not None else default_zero_tol
        return make_distribution(
            [float(v) for v in values],
            norm_policy=norm_policy or self.norm_policy or NormPolicy.TRUNCATED,
            zero_tol=zero_tol,
            norm_tol=norm_tol,
            log_values=self.log_values,
        )

    def to_moments(self) -> Optional[MomentSequence]:
        """kind=q のときは入力の q_n をそのまま対数表現に"""
        if self.kind != SequenceKind.Q:
            return None
        return MomentSequence.from_values(self.values)

    def to_factorial_moments(self) -> FactorialMomentSequence:
        if self.kind != SequenceKind.GAMMA:
            raise InputFormatError(f"kind '{self.kind.value}' is not a factorial-moment sequence", field="kind")
        return FactorialMomentSequence.from_values(self.values)


def _field_of(error: ValidationError) -> Tuple[str, str]:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"])
    return first["msg"], field


def parse_json(text: str, kind: Optional[SequenceKind] = None) -> DistributionFile:
    """JSON 文字列を解析（ファイルに kind がなければ引数の kind を使う）"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise InputFormatError("top level must be a JSON object", line=1)
    if "values" not in data:
        raise InputFormatError("missing required key", field="values")
    if "kind" not in data and kind is not None:
        data = {**data, "kind": kind.value}
    try:
        return DistributionFile.model_validate(data)
    except ValidationError as e:
        message, field = _field_of(e)
        raise InputFormatError(message, field=field) from e


def parse_csv(text: str, kind: SequenceKind = SequenceKind.P) -> DistributionFile:
    """n,value[,log_value] の CSV を解析（先頭のヘッダ行と # で始まる行は読み飛ばす）"""
    values: List[float] = []
    logs: List[float] = []
    columns: Optional[int] = None
    header_seen = False
    for line_no, row in enumerate(csv.reader(io.StringIO(text.lstrip("﻿"))), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) not in (2, 3) or (columns is not None and len(row) != columns):
            expected = columns or "2 or 3"
            raise InputFormatError(f"expected {expected} columns, got {len(row)}", line=line_no)
        columns = len(row)
        n_text, value_text = (cell.strip() for cell in row[:2])
        try:
            n = int(n_text)
        except ValueError:
            if not values and not header_seen:
                header_seen = True
                continue
            raise InputFormatError(f"invalid index {n_text!r}", line=line_no, field="n")
        if n != len(values):
            raise InputFormatError(f"expected index {len(values)}, got {n}", line=line_no, field="n")
        try:
            value = float(value_text)
        except ValueError:
            raise InputFormatError(f"invalid number {value_text!r}", line=line_no, field="value")
        if not math.isfinite(value):
            raise InputFormatError(f"non-finite value {value_text!r}", line=line_no, field="value")
        values.append(value)
        if columns == 3:
            logs.append(_parse_log_cell(row[2].strip(), line_no))
    if not values:
        raise InputFormatError("no data rows", line=1)
    try:
        return DistributionFile(kind=kind, values=tuple(values), log_values=tuple(logs) if logs else None)
    except ValidationError as e:
        message, field = _field_of(e)
        raise InputFormatError(message, field=field) from e


def _parse_log_cell(text: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputFormatError(f"invalid number {text!r}", line=line_no, field="log_value")
    if math.isnan(value) or value == math.inf:
        raise InputFormatError(f"invalid log probability {text!r}", line=line_no, field="log_value")
    return value


def read_distribution_file(path: Path, kind: Optional[SequenceKind] = None) -> DistributionFile:
    """拡張子に応じて JSON か CSV を読み込む"""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(f"cannot read {path}: {e.strerror}") from e
    if path.suffix.lower() == ".csv":
        doc = parse_csv(text, kind or SequenceKind.P)
    else:
        doc = parse_json(text, kind)
    logger.debug("read %d %s values from %s", len(doc.values), doc.kind.value, path)
    return doc


def from_distribution(dist: PhotonDistribution) -> DistributionFile:
    """分布をファイル形式に（zero_tol と norm_policy も保存）"""
    return DistributionFile(
        kind=SequenceKind.P,
        values=dist.values,
        zero_tol=dist.zero_tol,
        norm_policy=dist.norm_policy,
        log_values=dist.log_values,
    )


def dumps_json(doc: DistributionFile) -> str:
    data: Dict[str, Any] = {"kind": doc.kind.value, "values": list(doc.values)}
    if doc.zero_tol is not None:
        data["zero_tol"] = doc.zero_tol
    if doc.norm_policy is not None:
        data["norm_policy"] = doc.norm_policy.value
    if doc.log_values is not None:
        # JSON に -Infinity はないので null
        data["log_values"] = [v if math.isfinite(v) else None for v in doc.log_values]
    return json.dumps(data, indent=2) + "\n"


def dumps_csv(doc: DistributionFile) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if doc.log_values is None:
        writer.writerow(["n", "value"])
        for n, value in enumerate(doc.values):
            writer.writerow([n, repr(float(value))])
    else:
        writer.writerow(["n", "value", "log_value"])
        for n, (value, log_value) in enumerate(zip(doc.values, doc.log_values)):
            writer.writerow([n, repr(float(value)), repr(float(log_value))])
    return buffer.getvalue()


def write_distribution_file(doc: DistributionFile, path: Path) -> Path:
    """拡張子に応じて JSON か CSV で書き出す"""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = dumps_csv(doc) if path.suffix.lower() == ".csv" else dumps_json(doc)
    path.write_text(text, encoding="utf-8")
    logger.debug("wrote %d values to %s", len(doc.values), path)
    return path
