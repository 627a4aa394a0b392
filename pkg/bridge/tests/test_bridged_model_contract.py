"""The codec-side model contract holds when backed by the mock responder.

These checks mirror the codec's own model invariants: determinism,
canonical ordering, unit sums, and cache-wrapper equivalence.  The codec
package is exercised as an installed dependency here; the responder is
still reached only through the stdio protocol.
"""

from __future__ import annotations

import shlex
import sys

import pytest

from dcstego import cached, next_token_dist, truncate_top_p
from dcstego.bridge import BridgedModel
from dcstego.errors import BridgeError, ContextError


@pytest.fixture
def bridged(table_file):
    command = f"{shlex.quote(sys.executable)} -m lmbridge.mock --table {table_file}"
    model = BridgedModel.spawn(command)
    yield model
    model.close()


def test_info_handshake(bridged):
    assert bridged.alphabet_size == 4


def test_determinism(bridged):
    contexts = [(), (0,), (0, 1), (3, 2, 1)]
    first = [next_token_dist(bridged, ctx) for ctx in contexts]
    second = [next_token_dist(bridged, ctx) for ctx in contexts]
    assert first == second


def test_canonical_tables(bridged):
    dist = next_token_dist(bridged, (0,))
    assert dist.tokens == (0, 1, 2)  # zero entry dropped, descending order
    assert sum(dist.probs) == pytest.approx(1.0, abs=1e-9)
    entries = dist.entries()
    assert entries == sorted(entries, key=lambda e: (-e[1], e[0]))


def test_truncation_happens_codec_side(bridged):
    full = next_token_dist(bridged, (0,))
    cut = truncate_top_p(full, 0.8)
    assert len(cut) < len(full)
    assert sum(cut.probs) == pytest.approx(1.0, abs=1e-9)


def test_context_validation(bridged):
    with pytest.raises(ContextError):
        next_token_dist(bridged, (99,))


def test_cache_wrapper_over_bridge(bridged):
    model = cached(bridged)
    a = model.distribution((0, 1))
    b = model.distribution((0, 1))
    assert a == b
    assert model.hits == 1 and model.misses == 1


def test_tokenize_round_trip(bridged):
    tokens = bridged.tokenize("0 3 2")
    assert tokens == [0, 3, 2]
    assert bridged.detokenize(tokens) == "0 3 2"


def test_closed_bridge_raises(bridged):
    bridged.close()
    with pytest.raises(BridgeError):
        bridged.distribution((0,))
