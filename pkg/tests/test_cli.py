#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# pylint: disable=wrong-import-position

import json
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../core')))

import momentpc  # noqa: E402
from momentpc import cli as momentpccli  # noqa: E402
from momentpccore.experiments import CSV_HEADER_PREFIX, readTable  # noqa: E402
from momentpccore.utils import ConfigurationError  # noqa: E402


def test_sweep_to_file(tmpdir):
    path = os.path.join(tmpdir, "pcerrors.csv")
    assert momentpccli(['sweep', '--kappa', '1-3', '--out', path]) == 0

    table = readTable(path)
    assert table.experiment == 'fig-pcerrors'
    assert len(table.rows) == 3 * 3 * 2
    assert set(table.column('method')) == {'gp', 'sc', 'ls'}


def test_sweep_to_stdout(capsys):
    assert momentpccli(['sweep', '-k', '1,2', '-f', 'sin2', '-m', 'gp,constrained-L2', '--moments', '1-2']) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith(CSV_HEADER_PREFIX + " experiment=fig-pcerrors")
    assert lines[1] == "kappa,method,moment,truth,estimate,error"
    assert len(lines) == 2 + 2 * 2 * 2


def test_config_file(tmpdir):
    configPath = os.path.join(tmpdir, "experiment.cfg")
    with open(configPath, 'wt', encoding='utf-8') as file:
        file.write("experiment = fig-conSC\nkappa = 1-5\n")

    path = os.path.join(tmpdir, "conSC.csv")
    assert momentpccli(['sweep', '--config', configPath, '-k', '2', '--seed', '7', '-o', path]) == 0

    table = readTable(path)
    assert table.experiment == 'fig-conSC'
    assert set(table.column('kappa')) == {'2'}
    assert set(table.column('method')) == {'sc', 'ls', 'constrained-l2'}


def test_ode_and_window(tmpdir):
    path = os.path.join(tmpdir, "ode.csv")
    assert momentpccli(['ode', '-k', '1', '--step', '0.1', '--horizon', '1', '-o', path]) == 0
    table = readTable(path)
    assert table.experiment == 'ode-linear'
    assert len(table.rows) == 11 * 2

    path = os.path.join(tmpdir, "window.csv")
    arguments = ['window', '-k', '1', '--window-factors', '1,2', '--step', '0.1', '--horizon', '2', '-o', path]
    assert momentpccli(arguments) == 0
    table = readTable(path)
    assert table.experiment == 'window-sweep'
    assert table.column('window_length') == ['2', '4']


def test_selftest(tmpdir, capsys):
    path = os.path.join(tmpdir, "selftest.json")
    assert momentpccli(['selftest', '--out', path]) == 0
    assert json.loads(capsys.readouterr().out)['passed'] is True
    with open(path, 'rt', encoding='utf-8') as file:
        assert json.load(file)['passed'] is True


def test_version(capsys):
    with pytest.raises(SystemExit) as exception:
        momentpccli(['--version'])
    assert exception.value.code == 0
    output = capsys.readouterr().out
    assert output.startswith("momentpc " + momentpc.__version__)
    assert "momentpccore" in output


def test_invalid_arguments():
    with pytest.raises(ConfigurationError):
        momentpccli(['sweep', '--method', 'magic'])
    with pytest.raises(SystemExit):
        momentpccli(['sweep', '--function', 'unknown'])
    with pytest.raises(SystemExit):
        momentpccli([])


def test_main_reports_errors(tmpdir, capsys, monkeypatch):
    monkeypatch.setattr(sys, 'argv', ['momentpc', 'sweep', '--config', os.path.join(tmpdir, "missing.cfg")])
    with pytest.raises(SystemExit) as exception:
        momentpc.main()
    assert exception.value.code == 1
    assert "[Error]" in capsys.readouterr().out
