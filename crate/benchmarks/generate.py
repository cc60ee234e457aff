#!/usr/bin/env python3
"""Writes the benchmark PLAs from their arithmetic definitions.

Each file lists the full ON-set, one minterm row per input vector with at
least one active output.
"""
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def bits(v, width):
    return format(v, f"0{width}b") if width else ""


def write(name, n_in, n_out, fn):
    rows = []
    for x in range(1 << n_in):
        y = fn(x)
        if y:
            rows.append(f"{bits(x, n_in)} {bits(y, n_out)}")
    text = [f".i {n_in}", f".o {n_out}", f".p {len(rows)}", *rows, ".e", ""]
    (HERE / f"{name}.pla").write_text("\n".join(text))


def ones(x):
    return bin(x).count("1")


def main():
    write("xor5", 5, 1, lambda x: ones(x) & 1)
    write("rd53", 5, 3, ones)
    write("rd73", 7, 3, ones)
    write("rd84", 8, 4, ones)
    write("9sym", 9, 1, lambda x: int(3 <= ones(x) <= 6))
    write("sym10", 10, 1, lambda x: int(4 <= ones(x) <= 7))
    # the two low bits of a square are x0 and 0
    write("squar5", 5, 8, lambda x: (x * x) >> 2)
    write("adr4", 8, 5, lambda x: (x >> 4) + (x & 15))
    write("mlp4", 8, 8, lambda x: (x >> 4) * (x & 15))
    # 3-bit adder with carry-in: a2 a1 a0 b2 b1 b0 cin
    write("z4ml", 7, 4, lambda x: (x >> 4) + ((x >> 1) & 7) + (x & 1))


if __name__ == "__main__":
    main()
