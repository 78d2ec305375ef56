import pytest

from plantwatch.network import (Channel, DuplicateTickError, HistorianStore,
                                HistorianView, Message, ScadaView, TamperHook,
                                UnknownTagError, export_csv, load_csv)


def channel(*hooks):
    ch = Channel("l0.up.plc1", 0, "rio1", "plc1")
    for hook in hooks:
        ch.install(hook)
    return ch


def test_rewrite_hook_targets_one_tag():
    ch = channel(TamperHook("rewrite", (10, 20), "LIT101", 999.0))
    assert ch.deliver(Message("LIT101", 650.0, 15)).value == 999.0
    assert ch.deliver(Message("FIT101", 3.0, 15)).value == 3.0
    assert ch.deliver(Message("LIT101", 650.0, 21)).value == 650.0


def test_offset_hook():
    ch = channel(TamperHook("offset", (0, 5), "LIT101", -100.0))
    assert ch.deliver(Message("LIT101", 650.0, 3)).value == 550.0


def test_drop_and_disconnect():
    ch = channel(TamperHook("drop", (0, 5), "LIT101"))
    assert ch.deliver(Message("LIT101", 650.0, 3)) is None
    assert ch.deliver(Message("FIT101", 3.0, 3)) is not None
    ch = channel(TamperHook("disconnect", (0, 5)))
    assert ch.deliver(Message("FIT101", 3.0, 3)) is None


def test_delay_hook_matures():
    ch = channel(TamperHook("delay", (0, 5), "LIT101", 3))
    assert ch.deliver(Message("LIT101", 650.0, 2)) is None
    assert ch.matured(3) == []
    assert [m.value for m in ch.matured(5)] == [650.0]
    assert ch.matured(5) == []


def test_remove_expired():
    ch = channel(TamperHook("drop", (0, 5)))
    ch.remove_expired(6)
    assert ch.hooks == []


def test_historian_append_monotonic():
    store = HistorianStore()
    store.append(1, {"LIT101": 650.0})
    with pytest.raises(DuplicateTickError):
        store.append(1, {"LIT101": 650.0})
    store.append(2, {"LIT101": 649.0})
    assert store.query("LIT101", (1, 2)) == [(1, 650.0), (2, 649.0)]
    with pytest.raises(UnknownTagError):
        store.query("LIT301", (0, 10))


def test_historian_mutation_logged():
    store = HistorianStore()
    store.add_mutation((5, 10), "LIT101", 760.0)
    store.append(4, {"LIT101": 650.0})
    store.append(5, {"LIT101": 649.0})
    assert store.latest("LIT101") == 760.0
    assert store.tamper_log == [(5, "LIT101", 649.0, 760.0)]
    assert HistorianView(store).get("LIT101") == 760.0
    assert HistorianView(store).get("LIT301") is None


def test_scada_staleness_and_defacement():
    scada = ScadaView()
    scada.update(1, {"LIT101": 650.0}, expected=1)
    assert not scada.defaced
    scada.update(2, {}, expected=1)
    assert scada.defaced
    assert scada.stale_age["LIT101"] == 1


def test_csv_round_trip(tmp_path):
    store = HistorianStore()
    store.append(1, {"LIT101": 650.25, "MV101": "Open", "P101": "Off"})
    store.append(2, {"LIT101": 649.5, "MV101": "Opening", "P101": "On"})
    path = tmp_path / "hist.csv"
    export_csv(store, path)
    columns, rows = load_csv(path)
    assert columns[0] == "LIT101"
    assert rows[0][0] == 1
    assert rows[0][1]["LIT101"] == 650.25
    assert rows[1][1]["MV101"] == "Opening"
    assert rows[1][1]["P101"] == "On"
    # forward fill: a tag absent from a later row keeps its last value
    store.append(3, {"LIT101": 648.0})
    export_csv(store, path)
    _, rows = load_csv(path)
    assert rows[2][1]["MV101"] == "Opening"


def test_csv_header_validated(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,LIT101\n1,650\n")
    with pytest.raises(ValueError):
        load_csv(path)
