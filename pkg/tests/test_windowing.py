import pytest
from hypothesis import given, strategies as st

from conftest import make_samples
from streamnorm.core import Sample, UsageError
from streamnorm.windowing import WindowAssembler, tumbling_windows


def test_no_emission_below_capacity():
    asm = WindowAssembler(5)
    assert [asm.push(s) for s in make_samples(range(4))] == [None] * 4


def test_fifth_push_emits_first_window():
    asm = WindowAssembler(5)
    samples = make_samples(range(5))
    out = [asm.push(s) for s in samples]
    window = out[-1]
    assert window.id == 1 and window.samples == tuple(samples)
    assert asm.buffered == 0


def test_twelve_pushes():
    asm = WindowAssembler(5)
    emitted = [w for s in make_samples(range(12)) if (w := asm.push(s))]
    assert [w.id for w in emitted] == [1, 2]
    assert asm.buffered == 2
    tail = asm.flush()
    assert tail.id == 3 and [s.ordinal for s in tail.samples] == [10, 11]
    assert asm.flush() is None


def test_flush_on_even_division_is_noop():
    windows = list(tumbling_windows(make_samples(range(10)), 5))
    assert [len(w) for w in windows] == [5, 5]
    assert WindowAssembler(5).flush() is None


def test_out_of_order_ordinal():
    asm = WindowAssembler(3)
    asm.push(Sample(4, (1.0,)))
    with pytest.raises(UsageError):
        asm.push(Sample(4, (1.0,)))
    with pytest.raises(UsageError):
        asm.push(Sample(2, (1.0,)))


def test_arity_change_rejected():
    asm = WindowAssembler(3)
    asm.push(Sample(0, (1.0,)))
    with pytest.raises(UsageError):
        asm.push(Sample(1, (1.0, 2.0)))


def test_window_size_must_be_positive():
    with pytest.raises(UsageError):
        WindowAssembler(0)


@given(st.integers(0, 200), st.integers(1, 30))
def test_windows_partition_the_stream(length, size):
    samples = make_samples(range(length))
    windows = list(tumbling_windows(samples, size))
    assert [s for w in windows for s in w.samples] == samples
    assert [w.id for w in windows] == list(range(1, len(windows) + 1))
    assert all(len(w) == size for w in windows[:-1])
    if windows:
        assert 1 <= len(windows[-1]) <= size
