# -*- coding: utf8 -*-
# Copyright 2012 Harald Schilly <harald.schilly@univie.ac.at>
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
Configuration
=============

Reads the config file ``~/.intercloud/config.ini`` (a default one is
created if none is present) and replaces values stored within it with those
given via optional command-line arguments.

The command-line options are shared by all subcommands of the
:mod:`command line interface <intercloud.cli>`, see :meth:`.Config.add_arguments`.

.. inheritance-diagram:: intercloud.config
"""

_EPILOG = """\
Note: By default, the 'debug' mode is enabled automatically.
Disable it via the '-O' flag of the python interpreter.
"""

_DEFAULTS = [
    ('core', [('loglevel', '40'), ('seed', '0')]),
    ('trust', [('validity', '1000'), ('cap', 'full'), ('minimum', 'marginal')]),
    ('simulation', [('hop_latency', '1'), ('max_ticks', '1000000')]),
]


class Config:

    def __init__(self, args=None, testing_mode=False):
        """
        :param argparse.Namespace args: parsed command-line options, see :meth:`.add_arguments`
        :param boolean testing_mode: if True, signals that it is run by the unittests.
                                     No file is read or written then.
        """
        import os
        self.args = args
        self.testing_mode = testing_mode
        self._appdata_dir = os.path.expanduser("~/.intercloud")
        self.config_fn = os.path.join(self._appdata_dir, 'config.ini')
        if args is not None and getattr(args, 'config_file', None):
            self.config_fn = args.config_file
        self._loggers = {}
        self._create()

    @staticmethod
    def add_arguments(parser):
        """
        Adds the common options to an :class:`argparse.ArgumentParser`.
        """
        from intercloud import __version__
        parser.epilog = _EPILOG

        parser.add_argument('-c', '--config-file',
                            dest="config_file",
                            help='configuration file [default: ~/.intercloud/config.ini]',
                            default=None)

        parser.add_argument('--version', action='version', version=__version__)

        parser.add_argument("-v",
                            action="count",
                            dest="verbosity",
                            default=0,
                            help="verbosity level: -v, -vv, or -vvv")

        parser.add_argument('--lf', '--log-focus',
                            dest="logger_focus",
                            action="append",
                            default=[],
                            help=' '.join(["List names of loggers, which should be shown verbosely.",
                                           "You can specify this option multiple times!",
                                           "e.g. --lf=TRUST --lf=MSG"]))
        return parser

    def _create(self):
        import os
        from configparser import ConfigParser
        from .utils import info, create_logger
        logger = create_logger("CONFG", 40)

        cfgp = ConfigParser()
        for section, entries in _DEFAULTS:
            cfgp.add_section(section)
            for k, v in entries:
                cfgp.set(section, k, v)

        if not self.testing_mode:
            # create the file with the defaults if necessary
            if not os.path.exists(self.config_fn):
                try:
                    d = os.path.dirname(self.config_fn)
                    if d and not os.path.exists(d):
                        os.makedirs(d)
                    with open(self.config_fn, 'w') as configfile:
                        cfgp.write(configfile)
                except OSError as ex:
                    logger.warning("cannot write '%s': %s" % (self.config_fn, ex))
            cfgp.read(self.config_fn)

        # override specific settings
        args = self.args
        if args is not None:
            _cur_verb = cfgp.getint('core', 'loglevel')
            if getattr(args, 'verbosity', 0):
                cfgp.set('core', 'loglevel', str(max(0, _cur_verb - 10 * args.verbosity)))
            if getattr(args, 'seed', None) is not None:
                cfgp.set('core', 'seed', str(args.seed))

        def allcfgp(sep='.'):
            ret = {}
            for s in cfgp.sections():
                for k, v in cfgp.items(s):
                    ret['%s%s%s' % (s, sep, str(k))] = v
            return ret

        from intercloud_lib.trust import TrustLevel
        from intercloud import __version__

        self.loglevel = cfgp.getint('core', 'loglevel')
        self.seed = cfgp.getint('core', 'seed')
        self.validity = cfgp.getint('trust', 'validity')
        self.default_cap = TrustLevel.parse(cfgp.get('trust', 'cap'))
        self.default_minimum = TrustLevel.parse(cfgp.get('trust', 'minimum'))
        self.hop_latency = cfgp.getint('simulation', 'hop_latency')
        self.max_ticks = cfgp.getint('simulation', 'max_ticks')
        self.logger_focus = [] if args is None else list(getattr(args, 'logger_focus', []))
        self.version = __version__

        if self.validity <= 0:
            raise ValueError("trust.validity must be positive")
        if self.hop_latency < 1:
            raise ValueError("simulation.hop_latency must be at least 1")

        logger = create_logger("CONFG", self.loglevel)
        logger.info('config.ini: %s' % allcfgp())
        if not self.testing_mode:
            self.environment = info()
            logger.info("Environment: %s" % self.environment)

    @property
    def debug(self):
        return __debug__

    @property
    def default_policy(self):
        from intercloud_lib.trust import AcceptancePolicy
        return AcceptancePolicy(self.default_cap, self.default_minimum)

    def get_logger(self, name, loglevel=None):
        assert len(name) <= 5, 'Length of logger name > 5: "%s"' % name
        name = "%-5s" % name
        loglevel = loglevel or self.loglevel
        # logger focus
        lf = [_.upper() for _ in ["%-5s" % _ for _ in self.logger_focus]]
        if name in lf:
            loglevel = 1
        # cache
        key = '%s::%s' % (name, loglevel)
        if key in self._loggers:
            return self._loggers[key]
        from .utils import create_logger
        l = create_logger(name, loglevel)
        self._loggers[key] = l
        return l
