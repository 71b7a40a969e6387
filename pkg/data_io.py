"""
File formats: score-file and pool-file ingestion, JSON/CSV writers for reports,
curves, experiment tables, correlation matrices and oracle results.

Input schema: header `label,score[,group]`, UTF-8, comma separated, '.' decimal.
All floats are written with 17 significant digits.
"""
import json
import os
import sys

import numpy as np
import pandas as pd

from calibration import ALL_METRICS
from errors import InputParseError, InputReadError
from logger import debug
from metrics import LabeledScores
from rank_analysis import ModelPool
from utils import format_float

LABEL_COLUMN = 'label'
SCORE_COLUMN = 'score'
GROUP_COLUMN = 'group'


def _read_table(path):
    """
    Raw string table of a CSV file. Blank lines are dropped but the index keeps
    the file position of every record: record at index i sits on line i + 2.
    """
    if not os.path.exists(path):
        raise InputReadError(f"{path}: no such file")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False,
                            encoding='utf-8', skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise InputParseError(f"{path}: empty file", line=1)
    except (OSError, UnicodeDecodeError) as e:
        raise InputReadError(f"{path}: {e}")
    except pd.errors.ParserError as e:
        raise InputParseError(f"{path}: {e}")
    frame.columns = [str(c).strip() for c in frame.columns]
    # short records come back as NaN even with keep_default_na=False
    frame = frame.fillna('')
    blank = (frame.map(str.strip) == '').all(axis=1)
    if blank.any():
        debug("Skipping %d blank lines in %s", int(blank.sum()), path)
        frame = frame[~blank]
    if frame.empty:
        raise InputParseError(f"{path}: header but no records", line=2)
    return frame


def _line_of(column, position):
    return int(column.index[position]) + 2


def _parse_labels(column, path):
    values = column.str.strip()
    bad = ~values.isin(['0', '1'])
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise InputParseError(f"{path}: label must be 0 or 1, got {column.iloc[row]!r}",
                              line=_line_of(column, row))
    return (values == '1').to_numpy().astype(np.int8)


def _parse_scores(column, path, name=SCORE_COLUMN):
    numbers = pd.to_numeric(column.str.strip(), errors='coerce').to_numpy(dtype=np.float64)
    bad = ~np.isfinite(numbers)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise InputParseError(f"{path}: {name} must be a finite number, got {column.iloc[row]!r}",
                              line=_line_of(column, row))
    return numbers


def read_scores(path):
    """
    Parse a score file.

    Returns:
        tuple: (LabeledScores, group array or None)

    Raises:
        InputReadError: missing / unreadable file
        InputParseError: bad header or record, with the 1-based line number
    """
    frame = _read_table(path)
    for required in (LABEL_COLUMN, SCORE_COLUMN):
        if required not in frame.columns:
            raise InputParseError(f"{path}: header must contain '{LABEL_COLUMN},{SCORE_COLUMN}[,{GROUP_COLUMN}]'", line=1)

    labels = _parse_labels(frame[LABEL_COLUMN], path)
    scores = _parse_scores(frame[SCORE_COLUMN], path)
    groups = frame[GROUP_COLUMN].str.strip().to_numpy() if GROUP_COLUMN in frame.columns else None
    debug("Read %d records from %s", len(frame), path)
    return LabeledScores(labels, scores), groups


def split_groups(data, groups):
    """group id -> LabeledScores, sorted by group id"""
    return {
        str(name): data.subset(np.flatnonzero(groups == name))
        for name in sorted(set(groups.tolist()))
    }


def read_pool_csv(path, dataset_id=None):
    """
    Pool file: one `label` column and one score column per model; the header
    names the models.
    """
    frame = _read_table(path)
    if LABEL_COLUMN not in frame.columns:
        raise InputParseError(f"{path}: pool header must contain '{LABEL_COLUMN}'", line=1)
    labels = _parse_labels(frame[LABEL_COLUMN], path)
    names = [c for c in frame.columns if c != LABEL_COLUMN]
    scores = np.stack([_parse_scores(frame[name], path, name=name) for name in names]) if names else np.empty((0, len(frame)))
    return ModelPool(
        dataset_id=dataset_id or os.path.splitext(os.path.basename(path))[0],
        labels=labels,
        scores=scores,
        model_names=tuple(names),
    )


class Float17Encoder(json.JSONEncoder):
    """
    JSON encoder writing floats (numpy ones included) with 17 significant
    digits and non-finite floats as null. Layout follows json.dumps: `indent`
    and `separators` are honored, dict order is kept.
    """

    def iterencode(self, o, _one_shot=False):
        yield self._encode(o, 0)

    def encode(self, o):
        return ''.join(self.iterencode(o))

    def _encode(self, o, level):
        if o is None:
            return 'null'
        if isinstance(o, (bool, np.bool_)):
            return 'true' if o else 'false'
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(o) or 'null'
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=self.ensure_ascii)
        if isinstance(o, dict):
            items = [
                f"{json.dumps(str(k), ensure_ascii=self.ensure_ascii)}{self.key_separator}{self._encode(v, level + 1)}"
                for k, v in o.items()
            ]
            return self._container('{', items, '}', level)
        if isinstance(o, (list, tuple, np.ndarray)):
            return self._container('[', [self._encode(v, level + 1) for v in o], ']', level)
        return self._encode(self.default(o), level)

    def _container(self, open_, items, close, level):
        if not items:
            return open_ + close
        if self.indent is None:
            return open_ + self.item_separator.join(items) + close
        pad = ' ' * self.indent if isinstance(self.indent, int) else self.indent
        inner = '\n' + pad * (level + 1)
        return open_ + inner + (self.item_separator + inner).join(items) + '\n' + pad * level + close


def dumps(obj):
    """
    Deterministic JSON text: insertion order kept, 2-space indent, floats at
    17 significant digits, non-finite floats as null.
    """
    return json.dumps(obj, cls=Float17Encoder, indent=2, ensure_ascii=False) + '\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return format_float(value) or ''
    return str(value)


def _frame_to_csv(frame):
    return frame.map(_cell).to_csv(index=False, lineterminator='\n')


def reports_to_json(reports, drift=None):
    """One report as an object, several as a list; drift reports appended under 'drift'"""
    body = [r.to_dict() for r in reports]
    if drift is None:
        return dumps(body[0] if len(body) == 1 else body)
    return dumps({'reports': body, 'drift': [d.to_dict() for d in drift]})


def reports_to_csv(reports):
    """One row per report: group,n,n_pos,pi,pi0 then the metric columns in canonical order"""
    present = {m for r in reports for m in r.values}
    metrics = [m for m in ALL_METRICS if m in present]
    rows = [
        {
            'group': r.group,
            'n': r.n,
            'n_pos': r.n_pos,
            'pi': r.pi,
            'pi0': r.pi0,
            **{m: r.values.get(m) for m in metrics},
        }
        for r in reports
    ]
    return _frame_to_csv(pd.DataFrame(rows, columns=['group', 'n', 'n_pos', 'pi', 'pi0'] + metrics))


def curve_to_csv(curve):
    """`# {"kind", "auc", "clamped"}` comment line, then x,y rows"""
    header = json.dumps({'kind': curve.kind, 'auc': curve.auc, 'clamped': bool(curve.clamped)},
                        cls=Float17Encoder, ensure_ascii=False)
    frame = pd.DataFrame({'x': curve.x, 'y': curve.y})
    return f"# {header}\n" + _frame_to_csv(frame)


def table_to_csv(table):
    """sweep_value,metric,mean,ci"""
    frame = table.to_frame().rename(columns={'ci_half_width': 'ci'})
    return _frame_to_csv(frame)


def table_to_json(table):
    return dumps(table.to_dict())


def matrix_to_csv(result):
    """Square matrix with a header row and a first column of column labels"""
    frame = pd.DataFrame(result.matrix, columns=result.names)
    frame.insert(0, 'metric', result.names)
    return _frame_to_csv(frame)


def matrix_to_json(result):
    return dumps({
        'names': result.names,
        'matrix': result.matrix,
        'datasets': result.datasets,
        'skipped': result.skipped,
        'skipped_ids': result.skipped_ids,
    })


def dataset_to_csv(data):
    """label,score rows of a LabeledScores"""
    return _frame_to_csv(pd.DataFrame({LABEL_COLUMN: data.labels.astype(int), SCORE_COLUMN: data.scores}))


def oracle_to_json(result):
    return dumps(result.to_dict())


def write_output(text, output=None):
    """
    Write an artifact to output, or stdout when output is None.

    Raises:
        InputReadError: the output path cannot be written
    """
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(output, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise InputReadError(f"{output}: {e}")
    debug("Wrote %d bytes to %s", len(text), output)
