"""Pure-Python implementations of the hot kernels.

These are the reference routes: the exhaustive scan literally attempts a full
decode of every candidate bit string, and the flat executor mirrors the tree
interpreter for programs without EXEC/DVT.  The compiled twins in _speedups
must agree with these bit for bit (exercised by the backend tests).
"""

from __future__ import annotations

from .encoding import DecodeError, EncodingTable, decode

# Flat slot kinds shared with the compiled backend.
K_HALT = 0
K_INC = 1
K_DEC = 2
K_OUT = 3
K_IN = 4
K_WHILE = 5
K_WEND = 6
K_END = 7
K_EXEC = 8
K_DVT = 9
K_INVALID = 15

_KIND_BY_NAME = {
    "HALT": K_HALT,
    "INC": K_INC,
    "DEC": K_DEC,
    "OUT": K_OUT,
    "IN": K_IN,
    "WHILE": K_WHILE,
    "WEND": K_WEND,
    "EXEC": K_EXEC,
    "DVT": K_DVT,
    "END": K_END,
}


def opcode_kinds(table: EncodingTable) -> list[int]:
    """Map each 4-bit opcode value 0..15 to its kind under `table`."""
    kinds = [K_INVALID] * 16
    for code, name in table.name_by_code.items():
        kinds[int(code, 2)] = _KIND_BY_NAME[name]
    return kinds


def scan_length(length: int, table: EncodingTable) -> list[str]:
    """All valid programs of exactly `length` bits, in lexicographic order,
    found by exhaustively decoding every candidate string."""
    found = []
    for value in range(1 << length):
        bits = format(value, f"0{length}b")
        try:
            decode(bits, table)
        except DecodeError:
            continue
        found.append(bits)
    return found


def exec_flat(ops, regsel, jumps, tape, k):
    """Run a flattened meta-free program for k steps.

    Returns (step_rows, outputs): one row per step with
    (r0, r1, r2, r3, input_cursor, outputs_so_far, halted).
    """
    regs = [0, 0, 0, 0]
    cursor = 0
    outputs: list[int] = []
    pc = 0
    halted = False
    end_index = len(ops) - 1
    rows = []
    for _ in range(k):
        if not halted:
            kind = ops[pc]
            if kind == K_END or kind == K_HALT:
                # A step starting on END only happens for the empty program.
                halted = True
            else:
                reg = regsel[pc]
                if kind == K_INC:
                    regs[reg] += 1
                    pc += 1
                elif kind == K_DEC:
                    if regs[reg]:
                        regs[reg] -= 1
                    pc += 1
                elif kind == K_OUT:
                    outputs.append(regs[reg])
                    pc += 1
                elif kind == K_IN:
                    regs[reg] = tape[cursor] if cursor < len(tape) else 0
                    cursor += 1
                    pc += 1
                elif kind == K_WHILE:
                    pc = pc + 1 if regs[reg] else jumps[pc]
                else:  # K_WEND
                    pc = jumps[pc] if regs[reg] else pc + 1
                if pc == end_index:
                    halted = True
        rows.append((regs[0], regs[1], regs[2], regs[3], cursor, len(outputs), halted))
    return rows, outputs
