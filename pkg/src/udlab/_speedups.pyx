# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the hot kernels in udlab._pykernels.

scan_length validates every candidate bit string of a given length with a
single left-to-right pass over the packed integer; only the accepted strings
are materialized (and re-decoded by the strict Python decoder upstream).
exec_flat steps a flattened meta-free program with C integer registers; it
raises OverflowError rather than silently wrapping, and the caller falls back
to the exact pure path.
"""

from libc.stdlib cimport free, malloc

cdef enum:
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

cdef unsigned long long _REG_LIMIT = (<unsigned long long>1) << 63


def scan_length(int length, kinds_seq):
    """All valid program bit strings of exactly `length` bits, lexicographic."""
    if length < 1 or length > 60:
        raise ValueError("scan length must be in 1..60")
    cdef int kinds[16]
    cdef int j
    for j in range(16):
        kinds[j] = kinds_seq[j]

    cdef unsigned long long total = (<unsigned long long>1) << length
    cdef unsigned long long value
    cdef int pos, depth, sp, op, kind, status
    # Each EXEC nests at least 8 more bits, so the stack stays shallow.
    cdef int stack[64]
    out = []
    for value in range(total):
        pos = 0
        depth = 0
        sp = 0
        status = 0
        while status == 0:
            if pos + 4 > length:
                status = -1
                break
            op = <int>((value >> (length - pos - 4)) & 15)
            pos += 4
            kind = kinds[op]
            if kind == K_END:
                if depth != 0:
                    status = -1
                elif sp > 0:
                    sp -= 1
                    depth = stack[sp]
                else:
                    status = 1 if pos == length else -1
            elif kind == K_WEND:
                if depth == 0:
                    status = -1
                else:
                    depth -= 1
            elif kind == K_WHILE:
                if pos + 2 > length:
                    status = -1
                else:
                    pos += 2
                    depth += 1
            elif K_INC <= kind <= K_IN:
                if pos + 2 > length:
                    status = -1
                else:
                    pos += 2
            elif kind == K_EXEC:
                stack[sp] = depth
                sp += 1
                depth = 0
            elif kind == K_HALT or kind == K_DVT:
                pass
            else:
                status = -1
        if status == 1:
            out.append(format(value, "0%db" % length))
    return out


def exec_flat(ops_seq, regsel_seq, jumps_seq, tape_seq, long long k):
    """Run a flattened meta-free program for k steps; see _pykernels.exec_flat."""
    cdef int n = len(ops_seq)
    cdef int tape_n = len(tape_seq)
    cdef int *ops = <int *>malloc(n * sizeof(int))
    cdef int *regsel = <int *>malloc(n * sizeof(int))
    cdef int *jumps = <int *>malloc(n * sizeof(int))
    cdef unsigned long long *tape = NULL
    if tape_n:
        tape = <unsigned long long *>malloc(tape_n * sizeof(unsigned long long))
    if ops == NULL or regsel == NULL or jumps == NULL or (tape_n and tape == NULL):
        free(ops); free(regsel); free(jumps); free(tape)
        raise MemoryError()

    cdef int i
    try:
        for i in range(n):
            ops[i] = ops_seq[i]
            regsel[i] = regsel_seq[i]
            jumps[i] = jumps_seq[i]
        for i in range(tape_n):
            tape[i] = tape_seq[i]

        return _run(ops, regsel, jumps, n, tape, tape_n, k)
    finally:
        free(ops); free(regsel); free(jumps); free(tape)


cdef _run(int *ops, int *regsel, int *jumps, int n,
          unsigned long long *tape, int tape_n, long long k):
    cdef unsigned long long regs[4]
    regs[0] = regs[1] = regs[2] = regs[3] = 0
    cdef long long cursor = 0
    cdef int pc = 0
    cdef int end_index = n - 1
    cdef bint halted = 0
    cdef int kind, reg
    cdef long long t
    rows = []
    outputs = []
    for t in range(k):
        if not halted:
            kind = ops[pc]
            if kind == K_END or kind == K_HALT:
                halted = 1
            else:
                reg = regsel[pc]
                if kind == K_INC:
                    if regs[reg] >= _REG_LIMIT:
                        raise OverflowError("register exceeds the compiled range")
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
                    regs[reg] = tape[cursor] if cursor < tape_n else 0
                    cursor += 1
                    pc += 1
                elif kind == K_WHILE:
                    pc = pc + 1 if regs[reg] else jumps[pc]
                else:  # K_WEND
                    pc = jumps[pc] if regs[reg] else pc + 1
                if pc == end_index:
                    halted = 1
        rows.append((regs[0], regs[1], regs[2], regs[3], cursor, len(outputs), halted))
    return rows, outputs
