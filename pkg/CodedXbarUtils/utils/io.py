import csv
import io
import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Union, Any, TextIO

import json_tricks

from CodedXbarUtils.utils import CSV_HEADER
from CodedXbarUtils.utils.utils import PatternParseError

logger = logging.getLogger(__name__)


def write_line_to_file(file, dict_to_store, mode='a+'):
    with file.open(mode) as fh:
        try:
            json_tricks.dump(dict_to_store, fh)
        except TypeError as e:
            logger.error(f"Failed to serialize dictionary to JSON. Received the following types as "
                         f"input:\n{_get_dict_types(dict_to_store)}")
            raise e
        fh.write(os.linesep)


def read_lines_from_file(file: Path) -> List[Dict]:
    with Path(file).open('r') as fh:
        return [json_tricks.loads(line) for line in fh if line.strip()]


def _get_dict_types(d):
    assert isinstance(d, Dict), f"Expected to display items types for a dictionary, but received object of " \
                                f"type {type(d)}"
    return {k: type(v) if not isinstance(v, Dict) else _get_dict_types(v) for k, v in d.items()}


def load_json_text(text: str, source: str = '<string>') -> Any:
    """ json.loads with the position of a syntax error preserved. """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise PatternParseError(f'{source}: {e.msg} at line {e.lineno} column {e.colno}',
                                line=e.lineno, column=e.colno) from e


def load_json_file(path: Union[str, Path]) -> Any:
    path = Path(path)
    with path.open('r', encoding='utf-8') as fh:
        return load_json_text(fh.read(), source=str(path))


def rows_to_csv(rows: List[Dict], header: List[str] = None) -> str:
    """ Renders rows as CSV text. Line endings are fixed so outputs compare byte-wise. """
    header = CSV_HEADER if header is None else header
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: row[key] for key in header})
    return buffer.getvalue()


def write_csv(rows: List[Dict], out: Union[str, Path, TextIO, None], header: List[str] = None) -> str:
    text = rows_to_csv(rows, header)
    if out is None:
        return text
    if isinstance(out, (str, Path)):
        out = Path(out)
        out.parent.mkdir(exist_ok=True, parents=True)
        out.write_text(text, encoding='utf-8')
    else:
        out.write(text)
    return text
