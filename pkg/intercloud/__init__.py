"""
This is the simulation framework of Intercloud. It holds a federation of
clouds (see :mod:`intercloud.topology`), drives it with scenario scripts and
records what happens in a trace. The protocols themselves live in
:mod:`intercloud_lib`.

.. moduleauthor:: Harald Schilly <harald.schilly@univie.ac.at>

"""
__version__ = '0.1'
