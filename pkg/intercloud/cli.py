# -*- coding: utf8 -*-
# Copyright 2012 -- 2013 Harald Schilly <harald.schilly@univie.ac.at>
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

r"""
Command Line
============

::

    intercloud run --topology F --scenario F [--seed N] [--out F]
    intercloud udf pack DIRECTORY ARCHIVE
    intercloud udf unpack ARCHIVE DIRECTORY
    intercloud udf verify ARCHIVE
    intercloud check-transfer --topology F (--image ID | --app ID) [--src ID] --dst ID
    intercloud trust-table --topology F [--at TICK]

Topology and scenario arguments may also name a bundled file, e.g.
``--topology fig2 --scenario c1-to-fc1``. ``--src`` and ``--dst`` are
platform ids or clouds (``name@domain``, meaning the platform they run).

Exit codes:

== ==========================================================
0  success (``check-transfer``: feasible, ``udf verify``: clean)
1  ``check-transfer``: infeasible
2  parse error or unreadable input
3  reference to an undeclared entity, or a transfer whose
   source or destination is of the wrong platform kind
4  ``udf``: the archive is malformed
== ==========================================================

Diagnostics go to stderr, they name ``file:line`` where that makes sense.
"""

import os
import sys

from .config import Config
from .utils import data_file

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_PARSE = 2
EXIT_REFERENCE = 3
EXIT_FORMAT = 4


def make_parser():
    from argparse import ArgumentParser
    parser = ArgumentParser(prog='intercloud',
                            description='Intercloud - simulator of a federation of clouds.')
    Config.add_arguments(parser)
    subparsers = parser.add_subparsers(dest='command', metavar='command')

    run = subparsers.add_parser('run', help='execute a scenario script, write its trace')
    run.add_argument('--topology', required=True)
    run.add_argument('--scenario', required=True)
    run.add_argument('--seed', type=int, default=None,
                     help='seed of the simulator [default: core.seed of the config]')
    run.add_argument('--out', default='-', help="trace file, '-' is stdout [default: %(default)s]")

    udf = subparsers.add_parser('udf', help='uniform data format archives')
    udf_sub = udf.add_subparsers(dest='udf_command', metavar='action')
    pack = udf_sub.add_parser('pack', help='pack a directory')
    pack.add_argument('directory')
    pack.add_argument('archive')
    unpack = udf_sub.add_parser('unpack', help='restore files with their attributes')
    unpack.add_argument('archive')
    unpack.add_argument('directory')
    verify = udf_sub.add_parser('verify', help='check all checksums')
    verify.add_argument('archive')

    ct = subparsers.add_parser('check-transfer', help='feasibility of moving a workload')
    ct.add_argument('--topology', required=True)
    what = ct.add_mutually_exclusive_group(required=True)
    what.add_argument('--image')
    what.add_argument('--app')
    ct.add_argument('--src', help='default: where the workload is deployed')
    ct.add_argument('--dst', required=True)

    tt = subparsers.add_parser('trust-table', help='all pairwise trust decisions')
    tt.add_argument('--topology', required=True)
    tt.add_argument('--at', type=int, default=0, help='tick [default: %(default)s]')
    return parser


def resolve(path, ext):
    """
    ``path`` itself if it exists, otherwise the bundled file of that name.
    """
    if os.path.exists(path):
        return path
    for candidate in (data_file(path), data_file(path + ext)):
        if os.path.exists(candidate):
            return candidate
    return path


def _error(msg):
    print("intercloud: %s" % msg, file=sys.stderr)


def cmd_run(topology_path, scenario_path, seed=None, out_path='-', config=None):
    """
    Loads both files, executes the scenario and writes the trace.

    :return: exit code
    """
    from .topology import TopologyError, load_topology
    from .scenario import ScenarioError, ScenarioReferenceError, ScenarioScript
    from .core import Simulator
    config = config if config is not None else Config(testing_mode=True)
    logger = config.get_logger('CLI')
    try:
        topo = load_topology(resolve(topology_path, '.topo'), config)
        script = ScenarioScript.load(resolve(scenario_path, '.scn'))
        script.bind(topo)
    except ScenarioReferenceError as ex:
        _error(ex)
        return EXIT_REFERENCE
    except (TopologyError, ScenarioError) as ex:
        _error(ex)
        return EXIT_PARSE

    sim = Simulator(topo, config=config, seed=seed)
    trace = script.play(sim)
    sim.stop()
    logger.info("summary:\n%s" % trace.summary())
    if out_path == '-':
        sys.stdout.write(trace.serialize())
    else:
        trace.write(out_path)
    return EXIT_OK


def _read_directory(directory):
    files = []
    for dirpath, dirnames, filenames in os.walk(directory):
        dirnames.sort()
        for fn in sorted(filenames):
            full = os.path.join(dirpath, fn)
            rel = os.path.relpath(full, directory).replace(os.sep, '/')
            st = os.stat(full)
            with open(full, 'rb') as f:
                files.append((rel, st.st_mode & 0o7777, int(st.st_mtime), f.read()))
    return files


def _write_entries(entries, directory):
    for e in entries:
        target = os.path.join(directory, *e.path.split('/'))
        parent = os.path.dirname(target)
        if parent and not os.path.isdir(parent):
            os.makedirs(parent)
        with open(target, 'wb') as f:
            f.write(e.payload)
        os.chmod(target, e.attributes.mode & 0o7777)
        os.utime(target, (e.attributes.modified_at, e.attributes.modified_at))


def cmd_udf(action, paths, config=None):
    """
    ``pack DIRECTORY ARCHIVE``, ``unpack ARCHIVE DIRECTORY`` or ``verify ARCHIVE``.

    :return: exit code
    """
    from intercloud_lib.udf import FormatError, UdfError, udf_pack, udf_unpack, udf_verify
    config = config if config is not None else Config(testing_mode=True)
    logger = config.get_logger('CLI')
    try:
        if action == 'pack':
            directory, archive = paths
            if not os.path.isdir(directory):
                _error("%s is not a directory" % directory)
                return EXIT_PARSE
            data = udf_pack(_read_directory(directory))
            with open(archive, 'wb') as f:
                f.write(data)
            logger.info("packed %s into %s, %d bytes" % (directory, archive, len(data)))
            return EXIT_OK

        with open(paths[0], 'rb') as f:
            data = f.read()
        if action == 'verify':
            err = udf_verify(data)
            if err is not None:
                _error("%s: %s" % (paths[0], err))
                return EXIT_FORMAT
            print("%s: ok" % paths[0])
            return EXIT_OK
        if action == 'unpack':
            entries = udf_unpack(data)
            _write_entries(entries, paths[1])
            logger.info("unpacked %d files into %s" % (len(entries), paths[1]))
            return EXIT_OK
    except FormatError as ex:
        _error("%s: %s" % (paths[0], ex))
        return EXIT_FORMAT
    except (UdfError, OSError, ValueError) as ex:
        _error(ex)
        return EXIT_PARSE
    _error("unknown udf action '%s'" % action)
    return EXIT_PARSE


def _platform(topo, text):
    from intercloud_lib.trust import CloudId
    if text in topo.platforms:
        return topo.platforms[text]
    return topo.platform_of(CloudId.parse(text))


def cmd_check_transfer(topology_path, dst, image=None, app=None, src=None, config=None):
    """
    Prints the :class:`~intercloud_lib.platform.FeasibilityReport`.

    :return: exit code, 0 iff feasible
    """
    from .topology import TopologyError, load_topology
    from intercloud_lib.platform import TransferError, check_api_compat, check_vm_transfer
    config = config if config is not None else Config(testing_mode=True)
    try:
        topo = load_topology(resolve(topology_path, '.topo'), config)
    except TopologyError as ex:
        _error(ex)
        return EXIT_PARSE
    wid, kind = (image, 'image') if image is not None else (app, 'app')
    w = topo.workloads.get(wid)
    if w is None or w.kind != kind:
        _error("undeclared %s %s" % (kind, wid))
        return EXIT_REFERENCE
    try:
        dst_platform = _platform(topo, dst)
        src_platform = _platform(topo, src) if src is not None else topo.platform_of(w.deployed_on)
    except (KeyError, ValueError) as ex:
        _error("undeclared platform or cloud: %s" % str(ex).strip("'\""))
        return EXIT_REFERENCE
    try:
        if kind == 'image':
            report = check_vm_transfer(w.item, src_platform, dst_platform)
        else:
            report = check_api_compat(w.item.requirements, dst_platform)
    except TransferError as ex:
        _error(ex)
        return EXIT_REFERENCE
    print(report)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_trust_table(topology_path, at=0, config=None):
    """
    One line per ordered pair of admitted clouds.

    :return: exit code
    """
    from .topology import TopologyError, load_topology
    from intercloud_lib.trust import trust_table
    config = config if config is not None else Config(testing_mode=True)
    try:
        topo = load_topology(resolve(topology_path, '.topo'), config)
    except TopologyError as ex:
        _error(ex)
        return EXIT_PARSE
    for decision in trust_table(topo.trust, at):
        print("requester=%s %s" % (decision.requester, decision))
    return EXIT_OK


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_PARSE
    config = Config(args)
    config.get_logger('CLI').debug('cmdln options: %s' % args)

    if args.command == 'run':
        return cmd_run(args.topology, args.scenario, args.seed, args.out, config)
    if args.command == 'udf':
        if args.udf_command is None:
            parser.print_help(sys.stderr)
            return EXIT_PARSE
        paths = {'pack': (getattr(args, 'directory', None), getattr(args, 'archive', None)),
                 'unpack': (getattr(args, 'archive', None), getattr(args, 'directory', None)),
                 'verify': (getattr(args, 'archive', None),)}[args.udf_command]
        return cmd_udf(args.udf_command, paths, config)
    if args.command == 'check-transfer':
        return cmd_check_transfer(args.topology, args.dst, args.image, args.app,
                                  args.src, config)
    return cmd_trust_table(args.topology, args.at, config)


if __name__ == '__main__':
    sys.exit(main())
