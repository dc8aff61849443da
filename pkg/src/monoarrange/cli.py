"""Command-line entry point: ``arrange <input.musicxml> <arrangement.toml>``.

Exit codes: 0 success, 1 unreadable or invalid input, 2 part/instrument
count mismatch, 3 no feasible arrangement. The output file is only created
on success.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .arranger import arrange
from .errors import ArrangeError, CountMismatchError
from .instruments import load_arrangement, load_catalog
from .musicxml import load_musicxml, save_musicxml
from .pitch import concert_pc_of_fifths, pitch_class_name

log = logging.getLogger('monoarrange')

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_COUNT = 2
EXIT_INFEASIBLE = 3


@dataclass
class CliConfig:
    input_path: Path
    arrangement_path: Path
    catalog_path: Path | None = None
    output_path: Path | None = None
    verbosity: int = 0

    def resolved_output(self) -> Path:
        if self.output_path is not None:
            return self.output_path
        return self.input_path.with_name(self.input_path.stem + '.arranged.musicxml')


def _write_atomic(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(prefix=f'.{path.name}.', dir=path.parent or '.')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def run(config: CliConfig) -> int:
    try:
        catalog = load_catalog(config.catalog_path)
        try:
            request = config.arrangement_path.read_text(encoding='utf-8')
        except OSError as exc:
            raise ArrangeError(f'{config.arrangement_path}: {exc.strerror}') from None
        slots = load_arrangement(request, catalog, str(config.arrangement_path))
        try:
            data = config.input_path.read_bytes()
        except OSError as exc:
            raise ArrangeError(f'{config.input_path}: {exc.strerror}') from None
        try:
            doc = load_musicxml(data)
        except ArrangeError as exc:
            raise ArrangeError(f'{config.input_path}: {exc}') from None

        log.info('%s: %d parts, arranging for %s', config.input_path, len(doc.piece.parts),
                 ', '.join(s.id for s in slots))
        result = arrange(doc.piece, slots)
    except CountMismatchError as exc:
        log.error('%s', exc)
        return EXIT_COUNT
    except ArrangeError as exc:
        log.error('%s', exc)
        return EXIT_INPUT

    if result is None:
        log.error('no feasible arrangement: no key, octave shifts and assignment fit every part')
        return EXIT_INFEASIBLE

    for i, part in enumerate(doc.piece.parts):
        slot = result.slots[result.assignment[i]]
        log.info('part %s (%s) -> %s, shift %+d', part.id, part.name or '-', slot.id, result.shifts[i])
    log.debug('key offset %+d, concert key %s major', result.key_offset,
              pitch_class_name(concert_pc_of_fifths(result.concert_fifths), result.concert_fifths))

    output = config.resolved_output()
    try:
        _write_atomic(output, save_musicxml(result, doc))
    except OSError as exc:
        log.error('%s: %s', output, exc.strerror)
        return EXIT_INPUT
    print(result.metrics_line())
    log.info('wrote %s', output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='arrange',
        description='Re-arrange a MusicXML piece of monophonic parts for another set of instruments.',
    )
    parser.add_argument('input', type=Path, help='score-partwise MusicXML file')
    parser.add_argument('arrangement', type=Path, help='TOML file of instrument = count pairs')
    parser.add_argument('--catalog', type=Path, help='instrument metadata TOML (default: bundled catalog)')
    parser.add_argument('--output', '-o', type=Path, help='output file (default: <input>.arranged.musicxml)')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more diagnostics; repeat for debug output')
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='arrange: %(message)s', stream=sys.stderr, force=True)
    config = CliConfig(args.input, args.arrangement, args.catalog, args.output, args.verbose)
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
