"""
Relatórios - Tabelas, CSV, JSON e arquivos para gnuplot

Recebe listas de modelos pydantic (linhas de espectro, tabelas críticas,
soluções) e as converte com pandas para o formato pedido.
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ["N", "Q", "n", "l", "M0", "r0", "p0", "bound", "virial_residual"]
CRITICAL_COLUMNS = ["N", "Q", "y0", "coupling", "bound_character", "ratio_next", "law_ratio_next", "vs_two", "law_vs_two"]

FORMATS = ("table", "csv", "json")


def _plain(item: Any) -> Any:
    if isinstance(item, BaseModel):
        return item.model_dump(mode="json", by_alias=True)
    return item


def to_frame(rows: Iterable[Any], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Converte linhas (modelos ou dicts) num DataFrame com colunas fixas."""
    records = [_plain(row) for row in rows]
    frame = pd.DataFrame.from_records(records)
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    return frame


def render(data: Union[BaseModel, dict, List[Any]], fmt: str = "table", columns: Optional[Sequence[str]] = None) -> str:
    """
    Formata o resultado.

    Args:
        data: um resultado isolado ou uma lista de linhas
        fmt: table, csv ou json
        columns: ordem das colunas (tabelas e CSV)

    Returns:
        str: texto pronto para imprimir
    """
    if fmt not in FORMATS:
        raise ValueError(f"formato desconhecido: {fmt}")
    if fmt == "json":
        if isinstance(data, list):
            return json.dumps([_plain(row) for row in data], indent=2)
        return json.dumps(_plain(data), indent=2)

    rows = data if isinstance(data, list) else [data]
    frame = to_frame(rows, columns)
    if fmt == "csv":
        return frame.to_csv(index=False, float_format="%.12g")
    return frame.to_string(index=False, float_format=lambda v: f"{v:.10g}")


def write_gnuplot(path: Union[str, Path], x: Sequence[float], y: Sequence[float], header: str = "") -> Path:
    """Grava um arquivo de duas colunas (x y) para gnuplot."""
    path = Path(path)
    frame = pd.DataFrame({"x": list(x), "y": list(y)})
    with path.open("w", encoding="utf-8") as handle:
        if header:
            handle.write(f"# {header}\n")
        frame.to_csv(handle, sep=" ", header=False, index=False, float_format="%.12g")
    logger.info(f"Arquivo gnuplot gravado em {path} ({len(frame)} pontos)")
    return path
