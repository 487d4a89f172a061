import math

import numpy as np
import pytest

from gfqc.application.services.codec import (
    CodecParams,
    CodecService,
    bits_to_symbols,
    build_prior,
    decode,
    distortion,
    encode,
    resolve_code,
    symbols_to_bits,
)
from gfqc.application.services.construction import build_code, code_for_bits
from gfqc.application.services.message_passing import is_codeword
from gfqc.application.services.peeling import leaf_removal
from gfqc.application.services.rank_solver import generic_rank_solver
from gfqc.config import Settings
from gfqc.domain.errors import (
    ConfigurationError,
    CorruptStreamError,
    DimensionMismatchError,
    HeaderMismatchError,
)
from gfqc.domain.models.block import CompressedBlock, SourceBlock
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.messages import RbpParams
from gfqc.infrastructure.repositories.stream import pack_block, unpack_block

FAST = CodecParams(strength=1.5, rbp=RbpParams(gamma0=0.9, gamma1=0.99))


def test_bits_to_symbols_big_endian():
    symbols, pad = bits_to_symbols(np.array([0, 1, 1, 1]), 2)
    assert symbols.tolist() == [1, 3]
    assert pad == 0


def test_padding():
    symbols, pad = bits_to_symbols(np.array([1, 0, 1, 1, 0, 1, 1]), 2)
    assert len(symbols) == 4
    assert pad == 1
    assert symbols.tolist() == [2, 3, 1, 2]


def test_symbol_round_trip(rng):
    for p in range(1, 9):
        bits = rng.integers(0, 2, size=7 * p + 3)
        symbols, pad = bits_to_symbols(bits, p)
        back = symbols_to_bits(symbols, p)
        assert len(back) == len(bits) + pad
        assert np.array_equal(back[: len(bits)], bits)
        assert not back[len(bits):].any()


def test_distortion():
    assert distortion(np.array([0, 1, 1, 0]), np.array([0, 0, 1, 0])) == 0.25
    assert distortion(np.array([1, 0, 1]), np.array([1, 0, 1])) == 0.0
    assert distortion(np.array([1, 0]), np.array([0, 1])) == 1.0
    with pytest.raises(DimensionMismatchError):
        distortion(np.array([1, 0]), np.array([1]))


def test_prior_shapes():
    uniform = build_prior(np.array([3, 0, 5]), 0.0, 3)
    assert np.allclose(uniform.vectors, 1.0 / 8)

    binary = build_prior(np.array([0, 1]), 2.0, 1)
    assert binary.vectors[0, 1] / binary.vectors[0, 0] == pytest.approx(math.exp(-2.0))
    assert binary.vectors[1, 0] / binary.vectors[1, 1] == pytest.approx(math.exp(-2.0))

    peaked = build_prior(np.array([6]), 1.9, 3)
    assert np.argmax(peaked.vectors[0]) == 6
    # symbols 2 and 7 both differ from 6 in one bit
    assert peaked.vectors[0, 2] == pytest.approx(peaked.vectors[0, 7])
    with pytest.raises(ConfigurationError):
        build_prior(np.array([0]), -1.0, 1)


def test_params_from_settings():
    params = CodecParams.from_settings(Settings(strength=2.0, gamma0=0.95), schedule_seed=4)
    assert params.strength == 2.0
    assert params.rbp.gamma0 == 0.95
    assert params.rbp.schedule_seed == 4


def test_codeword_source_is_kept(small_code, random_codeword, rng):
    code, order = small_code
    word = random_codeword(code, order, rng)
    bits = symbols_to_bits(word, code.p)
    report = encode(SourceBlock(bits), code, CodecParams(strength=3.0), order=order)
    assert not report.fallback
    assert report.distortion == 0.0
    assert np.array_equal(report.block.payload, word[order.info_set])
    assert np.array_equal(decode(report.block, code).bits, bits)


def test_round_trip(small_code, rng):
    code, order = small_code
    bits = rng.integers(0, 2, size=code.n_bits)
    report = encode(SourceBlock(bits), code, FAST, order=order)
    assert not report.fallback
    assert report.block.payload_bits == (code.n_sym - code.m_sym) * code.p
    assert report.block.rate == pytest.approx(code.rate)

    restored = decode(report.block, code)
    assert is_codeword(code, restored.symbols)
    assert np.array_equal(restored.symbols, report.codeword)
    assert distortion(bits, restored.bits) == pytest.approx(report.distortion)
    assert report.distortion < 0.5

    again = encode(SourceBlock(restored.bits), code, CodecParams(strength=3.0), order=order)
    assert again.distortion == 0.0
    assert np.array_equal(again.codeword, restored.symbols)


def test_decode_matches_gaussian_elimination(rng):
    checked = 0
    for seed in range(40):
        p = 1 + seed % 3
        n_sym = int(rng.integers(10, 51))
        code = build_code(n_sym, n_sym // 2, p, seed, b=1, construction="random")
        order = leaf_removal(code)
        if not order.is_empty_core:
            continue
        payload = rng.integers(0, code.q, size=len(order.info_set))
        header_block = encode_header_only(code, payload)
        word = decode(header_block, code, order).symbols
        oracle = generic_rank_solver(code, dict(zip(order.info_set.tolist(), payload.tolist())))
        assert np.array_equal(word, oracle)
        checked += 1
    assert checked >= 20


def encode_header_only(code: SparseCode, payload: np.ndarray) -> CompressedBlock:
    """A block carrying ``payload`` for ``code``, built without running the encoder."""
    report = encode(
        SourceBlock(np.zeros(code.n_bits, dtype=np.int64)),
        code,
        CodecParams(strength=3.0),
    )
    return CompressedBlock(report.block.header, payload.astype(np.int64))


def test_all_zero_payload_gives_zero_codeword(small_code):
    code, order = small_code
    block = encode_header_only(code, np.zeros(len(order.info_set), dtype=np.int64))
    restored = decode(block, code)
    assert not restored.symbols.any()
    assert not restored.bits.any()


def test_padding_is_stripped():
    for seed in range(50):
        code = code_for_bits(61, 0.5, 2, seed, b=1)
        order = leaf_removal(code)
        if order.is_empty_core:
            break
    assert code.n_sym == 31
    bits = np.random.default_rng(5).integers(0, 2, size=61)
    report = encode(SourceBlock(bits), code, FAST, order=order)
    assert report.block.header.pad_bits == 1
    restored = decode(unpack_block(pack_block(report.block)), code)
    assert len(restored.bits) == 61


def test_fallback_block_is_lossless(small_code, rng):
    code, order = small_code
    bits = rng.integers(0, 2, size=code.n_bits)
    params = CodecParams(rbp=RbpParams(ell_max=1, t_max=2))
    report = encode(SourceBlock(bits), code, params, order=order)
    assert report.fallback
    assert report.block.header.fallback
    assert report.distortion == 0.0
    assert report.trials == 2
    restored = decode(unpack_block(pack_block(report.block)))
    assert restored.fallback
    assert np.array_equal(restored.bits, bits)


def test_nonempty_core_is_rejected(rng):
    code = build_code(20, 10, 2, 0)
    with pytest.raises(ConfigurationError):
        encode(SourceBlock(rng.integers(0, 2, size=40)), code)


def test_codec_service_round_trip(small_code, rng):
    code, _ = small_code
    service = CodecService(code, FAST)
    bits = rng.integers(0, 2, size=code.n_bits)
    report = service.compress(bits)
    restored = service.decompress(unpack_block(pack_block(report.block)))
    assert len(restored.bits) == code.n_bits
    if not report.fallback:
        assert is_codeword(code, restored.symbols)
        assert distortion(bits, restored.bits) == pytest.approx(report.distortion)


def test_codec_service_rejects_a_core_with_a_hint():
    with pytest.raises(ConfigurationError, match="another --seed or a larger --b"):
        CodecService(build_code(20, 10, 2, 0))


def test_generated_service_uses_the_construction_tuple():
    seed = next(
        s for s in range(50) if leaf_removal(code_for_bits(60, 0.5, 2, s, 1)).is_empty_core
    )
    service = CodecService.generated(60, 0.5, 2, seed, b=1)
    assert service.code.same_graph(code_for_bits(60, 0.5, 2, seed, 1))
    assert service.order.is_empty_core


def test_source_must_fill_the_code(small_code):
    code, _ = small_code
    with pytest.raises(DimensionMismatchError):
        encode(SourceBlock(np.zeros(code.n_bits + code.p, dtype=np.int64)), code)


def test_code_is_regenerated_from_the_header(small_code, rng):
    code, order = small_code
    bits = rng.integers(0, 2, size=code.n_bits)
    report = encode(SourceBlock(bits), code, FAST, order=order)
    block = unpack_block(pack_block(report.block))
    assert resolve_code(block.header).same_graph(code)
    assert np.array_equal(decode(block).symbols, report.codeword)


def test_wrong_code_is_detected(small_code, rng):
    code, order = small_code
    report = encode(SourceBlock(rng.integers(0, 2, size=code.n_bits)), code, FAST, order=order)
    other = build_code(code.n_sym, code.m_base, code.p, code.seed + 1, code.b)
    with pytest.raises(HeaderMismatchError):
        decode(report.block, other)
    random_twin = build_code(code.n_sym, code.m_base, code.p, code.seed, code.b, "random")
    with pytest.raises(HeaderMismatchError):
        decode(report.block, random_twin)


def test_external_codes_are_embedded(small_code, rng):
    code, order = small_code
    external = SparseCode(
        n_sym=code.n_sym, m_sym=code.m_sym, p=code.p, seed=code.seed, b=code.b,
        edge_check=code.edge_check, edge_var=code.edge_var, edge_coef=code.edge_coef,
    )
    report = encode(SourceBlock(rng.integers(0, 2, size=code.n_bits)), external, FAST, order=order)
    assert report.block.header.embedded
    block = unpack_block(pack_block(report.block))
    assert block.code_text is not None
    assert np.array_equal(decode(block).symbols, report.codeword)


def test_corrupted_payloads(small_code, rng):
    code, order = small_code
    report = encode(SourceBlock(rng.integers(0, 2, size=code.n_bits)), code, FAST, order=order)
    short = CompressedBlock(report.block.header, report.block.payload[:-1])
    with pytest.raises(CorruptStreamError):
        decode(short, code)
    wild = report.block.payload.copy()
    wild[0] = code.q
    with pytest.raises(CorruptStreamError):
        decode(CompressedBlock(report.block.header, wild), code)
