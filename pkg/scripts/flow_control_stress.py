"""Push random traffic both ways across a small-buffer link from two threads
and check nothing is lost or reordered. Prints throughput and CTS stalls."""
import argparse
import random
import threading
import time

from amsms.transport import LinkConfig, WouldBlock, create_link


def side(tx, rx, payload, expect, rng, stats, key):
    sent, got, stalls = 0, bytearray(), 0
    while sent < len(payload) or len(got) < expect:
        if sent < len(payload):
            try:
                sent += tx.write(payload[sent:sent + rng.randint(1, 64)], timeout=0.001)
            except WouldBlock:
                stalls += 1
        if rng.random() < 0.05:
            rx.set_cts(rng.random() < 0.5)
        else:
            rx.set_cts(True)
        got += rx.read(rng.randint(1, 64), timeout=0.001)
    rx.set_cts(True)
    stats[key] = (bytes(got), stalls)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--bytes", type=int, default=50_000)
    parser.add_argument("--capacity", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    a, b = create_link(LinkConfig(buffer_capacity_bytes=args.capacity))
    pa, pb = rng.randbytes(args.bytes), rng.randbytes(args.bytes)
    stats = {}
    t0 = time.perf_counter()
    threads = [
        threading.Thread(target=side, args=(a, a, pa, len(pb), random.Random(1), stats, "a")),
        threading.Thread(target=side, args=(b, b, pb, len(pa), random.Random(2), stats, "b")),
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    dt = time.perf_counter() - t0
    ok = stats["b"][0] == pa and stats["a"][0] == pb
    print(f"{2 * args.bytes} bytes in {dt:.2f}s, stalls a={stats['a'][1]} b={stats['b'][1]}, "
          f"intact={ok}")


if __name__ == "__main__":
    main()
